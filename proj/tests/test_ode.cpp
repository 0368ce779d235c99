#include <doctest.h>

#include <cmath>

#include "lc/ode.hpp"
#include "lc/verify.hpp"

using namespace lc;

namespace {

OdeSystem exponential_decay(double x0) {
    OdeSystem sys;
    sys.name = "decay";
    sys.state_names = {"x"};
    sys.y0 = {x0};
    sys.rhs = [](const std::vector<double>& y) { return std::vector<double>{-y[0]}; };
    return sys;
}

double final_gap(const Trajectory& a, const Trajectory& b) {
    double g = 0.0;
    for (std::size_t i = 0; i < a.final_state.size(); ++i)
        g = std::max(g, std::fabs(a.final_state[i] - b.final_state[i]));
    return g;
}

}  // namespace

TEST_CASE("integrator reproduces exp(-t) to high accuracy") {
    IntegrateOptions opt;
    opt.t_max = 1.0;
    opt.halt_rhs_norm = 0.0;
    const Trajectory tr = integrate(exponential_decay(1.0), opt);
    CHECK(!tr.aborted);
    CHECK(tr.final_time == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::fabs(tr.final_state[0] - std::exp(-1.0)) <= 1e-8);
}

TEST_CASE("halving the step shrinks the error about sixteenfold") {
    auto err_at = [](double h) {
        IntegrateOptions opt;
        opt.h = h;
        opt.t_max = 1.0;
        opt.halt_rhs_norm = 0.0;
        return std::fabs(integrate(exponential_decay(1.0), opt).final_state[0] - std::exp(-1.0));
    };
    const double ratio = err_at(0.1) / err_at(0.05);
    CHECK(ratio > 12.0);
    CHECK(ratio < 20.0);
}

TEST_CASE("a zero field halts early and stays put") {
    OdeSystem sys;
    sys.y0 = {0.3, -0.7};
    sys.rhs = [](const std::vector<double>& y) { return std::vector<double>(y.size(), 0.0); };
    const Trajectory tr = integrate(sys);
    CHECK(tr.halted_early);
    CHECK(tr.final_state[0] == 0.3);
    CHECK(tr.final_state[1] == -0.7);
}

TEST_CASE("euler step is y + h f(y)") {
    const OdeSystem sys = exponential_decay(2.0);
    const std::vector<double> y1 = euler_step(sys, {2.0}, 0.25);
    CHECK(y1[0] == doctest::Approx(2.0 - 0.25 * 2.0).epsilon(1e-15));
}

TEST_CASE("depth-2 adaptive chain reaches the optimum with conserved couplings") {
    const OdeSystem sys = build_chain(2, 1.0, 1.0, Algorithm::RBP, {0.1, 0.1}, {0.1});
    const Trajectory tr = integrate(sys);
    const OdeAnalysis an = analyze(sys, tr);
    CHECK(an.converged);
    CHECK(std::fabs(1.0 - sys.product(tr.final_state)(0, 0)) <= 1e-6);
    REQUIRE(!an.invariants.empty());
    for (const InvariantReport& inv : an.invariants) CHECK(inv.max_drift <= 1e-10);
    CHECK(an.sign_pattern == "+-");  // symmetric start: the reached root attracts
}

TEST_CASE("chain invariants barely drift over a long horizon from random starts") {
    RngStream rng(70);
    for (const Algorithm alg : {Algorithm::RBP, Algorithm::SRBP}) {
        std::vector<double> a0(3), c0(2);
        for (double& v : a0) v = rng.uniform(-0.5, 0.5);
        for (double& v : c0) v = rng.uniform(-0.5, 0.5);
        const OdeSystem sys = build_chain(3, 1.0, 1.0, alg, a0, c0);
        IntegrateOptions opt;
        opt.t_max = 100.0;
        opt.halt_rhs_norm = 0.0;
        const Trajectory tr = integrate(sys, opt);
        if (tr.aborted) continue;  // random SRBP starts may genuinely blow up
        const OdeAnalysis an = analyze(sys, tr);
        for (const InvariantReport& inv : an.invariants) CHECK(inv.max_drift <= 1e-9);
    }
}

TEST_CASE("chains reject the exact-gradient algorithm") {
    CHECK_THROWS_AS(build_chain(2, 1.0, 1.0, Algorithm::BP, {0.1, 0.1}, {0.1}), config_error);
}

TEST_CASE("fan-out system with one hidden unit collapses to the depth-2 chain") {
    IntegrateOptions opt;
    opt.t_max = 50.0;
    const OdeSystem chain = build_chain(2, 0.8, 1.2, Algorithm::SRBP, {0.2, -0.1}, {0.3});
    const OdeSystem fan = build_expansive(1, 0.8, 1.2, {0.2}, {-0.1}, {0.3});
    CHECK(final_gap(integrate(chain, opt), integrate(fan, opt)) <= 1e-12);
}

TEST_CASE("fan-in system with one input and output collapses to the depth-2 chain") {
    IntegrateOptions opt;
    opt.t_max = 50.0;
    const Matrix sii(1, 1, 1.2), sti(1, 1, 0.8);
    const OdeSystem chain = build_chain(2, 0.8, 1.2, Algorithm::SRBP, {0.2, -0.1}, {0.3});
    const OdeSystem fan =
        build_compressive(1, sii, sti, Matrix(1, 1, 0.2), Matrix(1, 1, -0.1), Matrix(1, 1, 0.3));
    CHECK(final_gap(integrate(chain, opt), integrate(fan, opt)) <= 1e-12);
}

TEST_CASE("all-width-one matrix system collapses to the chain") {
    IntegrateOptions opt;
    opt.t_max = 50.0;
    GeneralLinearSpec spec;
    spec.sizes = {1, 1, 1};
    spec.sigma_ii = Matrix(1, 1, 1.2);
    spec.sigma_ti = Matrix(1, 1, 0.8);
    spec.algorithm = Algorithm::RBP;
    const OdeSystem gen = build_general_linear(
        spec, {Matrix(1, 1, 0.2), Matrix(1, 1, -0.1)}, {Matrix(1, 1, 0.3)});
    const OdeSystem chain = build_chain(2, 0.8, 1.2, Algorithm::RBP, {0.2, -0.1}, {0.3});
    CHECK(final_gap(integrate(chain, opt), integrate(gen, opt)) <= 1e-12);
}

TEST_CASE("linear-exponent nonlinearity collapses to the chain") {
    IntegrateOptions opt;
    opt.t_max = 50.0;
    const OdeSystem pw = build_nonlinear_power(1.0, 1.0, 1.0, {0.2, 0.15, 0.3});
    const OdeSystem chain = build_chain(2, 1.0, 1.0, Algorithm::SRBP, {0.2, 0.15}, {0.3});
    CHECK(final_gap(integrate(chain, opt), integrate(pw, opt)) <= 1e-12);
}

TEST_CASE("quadratic hidden unit converges from a small positive start") {
    const OdeSystem sys = build_nonlinear_power(2.0, 1.0, 1.0, {0.3, 0.3, 0.3});
    const Trajectory tr = integrate(sys);
    const OdeAnalysis an = analyze(sys, tr);
    CHECK(an.converged);
    CHECK(an.final_residual <= 1e-8);
}

TEST_CASE("fractional exponent leaves its domain for negative activity") {
    const OdeSystem sys = build_nonlinear_power(1.5, 1.0, 1.0, {-0.3, 0.3, 0.3});
    const Trajectory tr = integrate(sys);
    CHECK(tr.aborted);
}

TEST_CASE("the known divergent depth-3 initialization really diverges") {
    const double f0 = 0.5, e = std::exp(-f0);
    const OdeSystem sys = build_chain(3, 1.0, 1.0, Algorithm::SRBP, {f0, e, -e}, {f0, -e});
    IntegrateOptions opt;
    opt.t_max = 800.0;
    const Trajectory tr = integrate(sys, opt);
    const OdeAnalysis an = analyze(sys, tr);
    CHECK(!an.converged);
}

TEST_CASE("a frozen fan-out start keeps its residual") {
    // a = c = 0 pins the whole flow at a non-optimal critical point
    const OdeSystem sys = build_expansive(2, 1.0, 1.0, {0.0, 0.0}, {0.4, -0.2}, {0.0, 0.0});
    const Trajectory tr = integrate(sys);
    const OdeAnalysis an = analyze(sys, tr);
    CHECK(tr.halted_early);
    CHECK(an.final_residual == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("root classification by flanking signs") {
    const auto f = [](double p) { return 1.0 - p; };  // attracting at p = 1
    CHECK(classify_root(f, 1.0) == "+-");
    const auto g = [](double p) { return p; };  // repelling at p = 0
    CHECK(classify_root(g, 0.0) == "-+");
}

TEST_CASE("full-batch discrete updates shadow the averaged flow") {
    LinearStatsSpec spec;
    spec.n = 1000;
    spec.seed = 71;
    spec.target_map = Matrix(1, 1, 0.8);
    spec.noise_sd = 0.1;
    const LinearStats stats = gen_linear_stats(spec);
    const double gap = sgd_vs_ode(stats, {0.1, 0.15, 0.2}, 1e-3, 2.0);
    CHECK(gap <= 1e-2);
}
