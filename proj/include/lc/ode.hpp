#pragma once

#include <functional>
#include <string>
#include <vector>

#include "lc/channel.hpp"
#include "lc/matrix.hpp"

namespace lc {

/// A conserved quantity of the flow; drift away from its initial value is a
/// direct check on both the derivation and the integrator.
struct OdeInvariant {
    std::string name;
    std::function<double(const std::vector<double>&)> value;
};

struct OdeSystem {
    std::string name;
    std::vector<std::string> state_names;
    std::vector<double> y0;
    std::function<std::vector<double>(const std::vector<double>&)> rhs;
    std::vector<OdeInvariant> invariants;
    /// Optimality residual, e.g. |alpha - beta P|; zero at a critical point.
    std::function<double(const std::vector<double>&)> residual;
    /// Suboptimality gap: objective minus its analytic minimum (when known).
    std::function<double(const std::vector<double>&)> error;
    /// End-to-end linear map P(state) for the matrix systems.
    std::function<Matrix(const std::vector<double>&)> product;
    /// For chains started on the fully symmetric manifold: the exact 1-D flow
    /// dp/dt = f(p) of the end-to-end product, used to classify reached roots.
    std::function<double(double)> reduced;
    /// Product coordinate for the reduced flow.
    std::function<double(const std::vector<double>&)> reduced_coord;
    std::vector<std::string> notes;
    bool expect_convergence = true;
};

struct IntegrateOptions {
    double h = 1e-3;
    double t_max = 2000.0;
    double halt_rhs_norm = 1e-12;      // early halt once the flow is this slow...
    std::size_t halt_consecutive = 100;  // ...for this many consecutive steps
    double min_h = 1e-6;               // step-halving floor on non-finite states
    std::size_t snapshot_stride = 1000;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<std::vector<double>> states;  // snapshots, incl. initial and final
    std::vector<double> final_state;
    double final_time = 0.0;
    bool aborted = false;       // went non-finite even at the minimum step
    bool halted_early = false;  // RHS norm stayed under the halt threshold
};

/// Classical fixed-step RK4. On a non-finite step the step size is halved and
/// the step retried down to min_h; failure there aborts with the trajectory
/// collected so far.
Trajectory integrate(const OdeSystem& sys, const IntegrateOptions& opt = {});

struct InvariantReport {
    std::string name;
    double max_drift = 0.0;
};

struct AnalyzeOptions {
    double cauchy_window = 10.0;  // time units
    double cauchy_tol = 1e-9;
    double rhs_tol = 1e-9;
};

struct OdeAnalysis {
    bool converged = false;
    double final_residual = 0.0;
    double final_rhs_norm = 0.0;
    double final_error = 0.0;
    std::vector<InvariantReport> invariants;
    std::string sign_pattern;  // "+-", "-+", "++", "--" at the reached root, chains only
};

/// Convergence = not aborted, trailing snapshots within cauchy_window of the
/// end all within cauchy_tol of the final state, and a final RHS norm under
/// rhs_tol. Also reports the worst invariant drift seen along the trajectory.
OdeAnalysis analyze(const OdeSystem& sys, const Trajectory& traj, const AnalyzeOptions& opt = {});

/// Sign of f just left/right of a root, e.g. "+-" is attracting from both
/// sides and "-+" repelling. eps is the probe offset.
std::string classify_root(const std::function<double(double)>& f, double root, double eps = 1e-4);

/// One explicit Euler step y + h f(y); the discrete-update comparison uses it.
std::vector<double> euler_step(const OdeSystem& sys, const std::vector<double>& y, double h);

// ---- system builders ------------------------------------------------------

/// Single-unit chain of depth L with an adaptive channel. State layout is
/// a_1..a_L, c_1..c_{L-1}; P = prod a_i and the drive is (alpha - beta P).
/// algorithm RBP: the error reaches a_i through the downstream channel
/// product; SRBP: through c_i alone. The top channel weight is pinned to 1.
OdeSystem build_chain(std::size_t L, double alpha, double beta, Algorithm algorithm,
                      const std::vector<double>& a0, const std::vector<double>& c0);

/// Depth-2 single-unit chain under the contrastive (two-phase) rule.
/// State layout: a1, a2, c1.
OdeSystem build_chain_stdp(double alpha, double beta, const std::vector<double>& y0);

/// 1 -> N -> 1 with a direct channel into the hidden layer.
/// State layout: a_1..a_N, b_1..b_N, c_1..c_N; P = sum a_i b_i.
OdeSystem build_expansive(std::size_t N, double alpha, double beta,
                          const std::vector<double>& a0, const std::vector<double>& b0,
                          const std::vector<double>& c0);

/// N -> 1 -> N with a direct channel into the hidden unit. A is 1xN, B is
/// Nx1, C is 1xN; state layout: A row, B column, C row.
OdeSystem build_compressive(std::size_t N, const Matrix& sigma_ii, const Matrix& sigma_ti,
                            const Matrix& a0, const Matrix& b0, const Matrix& c0);

struct GeneralLinearSpec {
    std::vector<std::size_t> sizes;  // n_0 .. n_L
    Matrix sigma_ii;                 // n_0 x n_0
    Matrix sigma_ti;                 // n_L x n_0
    Algorithm algorithm = Algorithm::RBP;
};

/// Arbitrary-width linear network with adaptive channel matrices
/// C_i (n_i x n_{i+1}). State layout: A_1..A_L then C_1..C_{L-1}, each
/// row-major. P = A_L ... A_1.
OdeSystem build_general_linear(const GeneralLinearSpec& spec, const std::vector<Matrix>& a0,
                               const std::vector<Matrix>& c0);

/// Two-layer scalar system with transfer o = s^mu on the hidden unit and a
/// direct channel. State layout: a1, a2, c1. Fractional mu leaves the domain
/// when a1 < 0; the integrator then aborts with the partial trajectory.
OdeSystem build_nonlinear_power(double mu, double alpha, double beta,
                                const std::vector<double>& y0);

}  // namespace lc
