#include "lc/ode.hpp"

#include <cmath>
#include <limits>

namespace lc {

namespace {

bool finite(const std::vector<double>& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

std::vector<double> axpy(const std::vector<double>& y, double h, const std::vector<double>& k) {
    std::vector<double> out(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + h * k[i];
    return out;
}

}  // namespace

Trajectory integrate(const OdeSystem& sys, const IntegrateOptions& opt) {
    if (sys.y0.empty()) throw config_error("integrate: system has no initial state");
    if (opt.h <= 0.0 || opt.min_h <= 0.0) throw config_error("integrate: step sizes must be > 0");

    Trajectory traj;
    std::vector<double> y = sys.y0;
    double t = 0.0;
    double h = opt.h;
    std::size_t slow_steps = 0;
    std::size_t step = 0;

    traj.times.push_back(0.0);
    traj.states.push_back(y);

    const std::size_t max_steps = static_cast<std::size_t>(opt.t_max / opt.min_h) + 1;

    while (t < opt.t_max - 1e-12 && step < max_steps) {
        const double hs = std::min(h, opt.t_max - t);

        // rk4 with step halving on non-finite values
        std::vector<double> y_new;
        double h_try = hs;
        bool ok = false;
        while (h_try >= opt.min_h) {
            const std::vector<double> k1 = sys.rhs(y);
            if (!finite(k1)) break;  // the state itself poisons the flow
            const std::vector<double> k2 = sys.rhs(axpy(y, 0.5 * h_try, k1));
            const std::vector<double> k3 = sys.rhs(axpy(y, 0.5 * h_try, k2));
            const std::vector<double> k4 = sys.rhs(axpy(y, h_try, k3));
            std::vector<double> cand(y.size());
            for (std::size_t i = 0; i < y.size(); ++i)
                cand[i] = y[i] + h_try / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
            if (finite(k2) && finite(k3) && finite(k4) && finite(cand)) {
                y_new = std::move(cand);
                if (norm2(k1) < opt.halt_rhs_norm)
                    ++slow_steps;
                else
                    slow_steps = 0;
                ok = true;
                break;
            }
            h_try *= 0.5;
        }
        if (!ok) {
            traj.aborted = true;
            break;
        }
        if (h_try < h) h = h_try;  // stay conservative once halving was needed

        y = std::move(y_new);
        t += h_try;
        ++step;

        if (step % opt.snapshot_stride == 0) {
            traj.times.push_back(t);
            traj.states.push_back(y);
        }
        if (slow_steps >= opt.halt_consecutive) {
            traj.halted_early = true;
            break;
        }
    }

    if (traj.times.back() != t) {
        traj.times.push_back(t);
        traj.states.push_back(y);
    }
    traj.final_state = y;
    traj.final_time = t;
    return traj;
}

OdeAnalysis analyze(const OdeSystem& sys, const Trajectory& traj, const AnalyzeOptions& opt) {
    OdeAnalysis an;
    const std::vector<double>& yf = traj.final_state;

    if (finite(yf)) {
        const std::vector<double> k = sys.rhs(yf);
        an.final_rhs_norm = finite(k) ? norm2(k) : std::numeric_limits<double>::infinity();
        if (sys.residual) an.final_residual = sys.residual(yf);
        if (sys.error) an.final_error = sys.error(yf);
    } else {
        an.final_rhs_norm = std::numeric_limits<double>::infinity();
        an.final_residual = std::numeric_limits<double>::infinity();
    }

    for (const OdeInvariant& inv : sys.invariants) {
        InvariantReport rep;
        rep.name = inv.name;
        const double i0 = inv.value(traj.states.front());
        for (const auto& s : traj.states) {
            const double v = inv.value(s);
            const double d = std::fabs(v - i0);
            if (!std::isfinite(d)) {
                rep.max_drift = std::numeric_limits<double>::infinity();
                break;
            }
            rep.max_drift = std::max(rep.max_drift, d);
        }
        an.invariants.push_back(std::move(rep));
    }

    bool cauchy_ok = traj.halted_early;
    if (!cauchy_ok && !traj.aborted) {
        cauchy_ok = true;
        bool any = false;
        for (std::size_t s = 0; s + 1 < traj.states.size(); ++s) {
            if (traj.times[s] < traj.final_time - opt.cauchy_window) continue;
            any = true;
            for (std::size_t i = 0; i < yf.size(); ++i)
                if (std::fabs(traj.states[s][i] - yf[i]) > opt.cauchy_tol) cauchy_ok = false;
        }
        if (!any) cauchy_ok = false;
    }

    an.converged = !traj.aborted && cauchy_ok && an.final_rhs_norm <= opt.rhs_tol;
    if (an.converged && sys.reduced && sys.reduced_coord)
        an.sign_pattern = classify_root(sys.reduced, sys.reduced_coord(yf));
    return an;
}

std::string classify_root(const std::function<double(double)>& f, double root, double eps) {
    const double fl = f(root - eps);
    const double fr = f(root + eps);
    std::string s;
    s += fl >= 0.0 ? '+' : '-';
    s += fr >= 0.0 ? '+' : '-';
    return s;
}

std::vector<double> euler_step(const OdeSystem& sys, const std::vector<double>& y, double h) {
    return axpy(y, h, sys.rhs(y));
}

// ---- builders ---------------------------------------------------------------

OdeSystem build_chain(std::size_t L, double alpha, double beta, Algorithm algorithm,
                      const std::vector<double>& a0, const std::vector<double>& c0) {
    if (L < 2) throw config_error("chain: depth must be >= 2");
    if (algorithm == Algorithm::BP) throw config_error("chain: channel must be RBP or SRBP");
    if (a0.size() != L || c0.size() != L - 1)
        throw config_error("chain: need L forward and L-1 channel weights");

    OdeSystem sys;
    sys.name = algorithm == Algorithm::RBP ? "chain-arbp" : "chain-asrbp";
    for (std::size_t i = 1; i <= L; ++i) sys.state_names.push_back("a" + std::to_string(i));
    for (std::size_t i = 1; i < L; ++i) sys.state_names.push_back("c" + std::to_string(i));
    sys.y0 = a0;
    sys.y0.insert(sys.y0.end(), c0.begin(), c0.end());

    const bool srbp = algorithm == Algorithm::SRBP;
    sys.rhs = [L, alpha, beta, srbp](const std::vector<double>& y) {
        const double* a = y.data();          // a[0..L-1] = a_1..a_L
        const double* c = y.data() + L;      // c[0..L-2] = c_1..c_{L-1}
        double P = 1.0;
        for (std::size_t i = 0; i < L; ++i) P *= a[i];
        const double D = alpha - beta * P;

        std::vector<double> dy(2 * L - 1);
        // prefix products of a: pre[i] = a_1 ... a_i
        std::vector<double> pre(L + 1, 1.0);
        for (std::size_t i = 0; i < L; ++i) pre[i + 1] = pre[i] * a[i];
        // suffix products of c: suf[i] = c_{i+1} ... c_{L-1} (1-based i)
        std::vector<double> suf(L + 1, 1.0);
        for (std::size_t i = L - 1; i >= 1; --i) suf[i] = suf[i + 1] * c[i - 1];

        for (std::size_t i = 1; i <= L; ++i) {
            const double channel = srbp ? (i < L ? c[i - 1] : 1.0) : suf[i];
            dy[i - 1] = channel * pre[i - 1] * D;
        }
        for (std::size_t i = 1; i < L; ++i)
            dy[L + i - 1] = srbp ? pre[i] * D : pre[i] * suf[i + 1] * D;
        return dy;
    };

    auto product = [L](const std::vector<double>& y) {
        double P = 1.0;
        for (std::size_t i = 0; i < L; ++i) P *= y[i];
        return P;
    };
    sys.residual = [alpha, beta, product](const std::vector<double>& y) {
        return std::fabs(alpha - beta * product(y));
    };
    sys.product = [product](const std::vector<double>& y) {
        Matrix m(1, 1);
        m(0, 0) = product(y);
        return m;
    };
    if (beta > 0.0)
        sys.error = [alpha, beta, product](const std::vector<double>& y) {
            const double P = product(y);
            return 0.5 * beta * P * P - alpha * P + alpha * alpha / (2.0 * beta);
        };

    // on the fully symmetric manifold (all weights equal) the product obeys an
    // exact scalar flow, which is what the root classifier inspects
    bool symmetric = true;
    for (double v : a0)
        if (v != a0.front()) symmetric = false;
    for (double v : c0)
        if (v != a0.front()) symmetric = false;
    if (symmetric) {
        const double Ld = static_cast<double>(L);
        sys.reduced = [Ld, alpha, beta](double p) {
            return Ld * std::pow(std::fabs(p), 2.0 - 2.0 / Ld) * (alpha - beta * p);
        };
        sys.reduced_coord = product;
    }

    bool all_nonzero = true;
    for (std::size_t i = 1; i < L; ++i) {
        const double k = srbp ? c0[i - 1] * c0[i - 1] - a0[i - 1] * a0[i - 1]
                              : c0[i - 1] - a0[i];
        if (k == 0.0) all_nonzero = false;
        sys.notes.push_back("K_" + std::to_string(i) + " = " + std::to_string(k));
        if (srbp) {
            sys.invariants.push_back({"c" + std::to_string(i) + "^2 - a" + std::to_string(i) + "^2",
                                      [i](const std::vector<double>& y) {
                                          const std::size_t L2 = (y.size() + 1) / 2;
                                          return y[L2 + i - 1] * y[L2 + i - 1] -
                                                 y[i - 1] * y[i - 1];
                                      }});
        } else {
            sys.invariants.push_back({"c" + std::to_string(i) + " - a" + std::to_string(i + 1),
                                      [i](const std::vector<double>& y) {
                                          const std::size_t L2 = (y.size() + 1) / 2;
                                          return y[L2 + i - 1] - y[i];
                                      }});
            sys.invariants.push_back({"a" + std::to_string(i) + "^2 - c" + std::to_string(i) + "^2",
                                      [i](const std::vector<double>& y) {
                                          const std::size_t L2 = (y.size() + 1) / 2;
                                          return y[i - 1] * y[i - 1] -
                                                 y[L2 + i - 1] * y[L2 + i - 1];
                                      }});
        }
    }
    if (srbp) {
        sys.invariants.push_back({"a" + std::to_string(L) + " - c" + std::to_string(L - 1),
                                  [L](const std::vector<double>& y) {
                                      return y[L - 1] - y[2 * L - 2];
                                  }});
        sys.expect_convergence = all_nonzero;
        if (!all_nonzero) sys.notes.push_back("some K_i vanish: convergence not guaranteed");
    }
    return sys;
}

OdeSystem build_chain_stdp(double alpha, double beta, const std::vector<double>& y0) {
    if (y0.size() != 3) throw config_error("chain-stdp: state is (a1, a2, c1)");
    OdeSystem sys;
    sys.name = "chain-stdp";
    sys.state_names = {"a1", "a2", "c1"};
    sys.y0 = y0;
    sys.rhs = [alpha, beta](const std::vector<double>& y) {
        const double a1 = y[0], a2 = y[1], c1 = y[2];
        const double P = a1 * a2;
        const double D = alpha - beta * P;
        return std::vector<double>{c1 * D, (a1 + c1 * P) * D, c1 * P * D};
    };
    sys.residual = [alpha, beta](const std::vector<double>& y) {
        return std::fabs(alpha - beta * y[0] * y[1]);
    };
    if (beta > 0.0)
        sys.error = [alpha, beta](const std::vector<double>& y) {
            const double P = y[0] * y[1];
            return 0.5 * beta * P * P - alpha * P + alpha * alpha / (2.0 * beta);
        };
    return sys;
}

OdeSystem build_expansive(std::size_t N, double alpha, double beta, const std::vector<double>& a0,
                          const std::vector<double>& b0, const std::vector<double>& c0) {
    if (N < 1) throw config_error("expansive: N must be >= 1");
    if (a0.size() != N || b0.size() != N || c0.size() != N)
        throw config_error("expansive: need N weights per group");

    OdeSystem sys;
    sys.name = "expansive";
    for (std::size_t i = 0; i < N; ++i) sys.state_names.push_back("a" + std::to_string(i + 1));
    for (std::size_t i = 0; i < N; ++i) sys.state_names.push_back("b" + std::to_string(i + 1));
    for (std::size_t i = 0; i < N; ++i) sys.state_names.push_back("c" + std::to_string(i + 1));
    sys.y0 = a0;
    sys.y0.insert(sys.y0.end(), b0.begin(), b0.end());
    sys.y0.insert(sys.y0.end(), c0.begin(), c0.end());

    sys.rhs = [N, alpha, beta](const std::vector<double>& y) {
        const double* a = y.data();
        const double* b = y.data() + N;
        const double* c = y.data() + 2 * N;
        double P = 0.0;
        for (std::size_t i = 0; i < N; ++i) P += a[i] * b[i];
        const double D = alpha - beta * P;
        std::vector<double> dy(3 * N);
        for (std::size_t i = 0; i < N; ++i) {
            dy[i] = c[i] * D;
            dy[N + i] = a[i] * D;
            dy[2 * N + i] = a[i] * D;
        }
        return dy;
    };

    auto product = [N](const std::vector<double>& y) {
        double P = 0.0;
        for (std::size_t i = 0; i < N; ++i) P += y[i] * y[N + i];
        return P;
    };
    sys.residual = [alpha, beta, product](const std::vector<double>& y) {
        return std::fabs(alpha - beta * product(y));
    };
    sys.product = [product](const std::vector<double>& y) {
        Matrix m(1, 1);
        m(0, 0) = product(y);
        return m;
    };
    if (beta > 0.0)
        sys.error = [alpha, beta, product](const std::vector<double>& y) {
            const double P = product(y);
            return 0.5 * beta * P * P - alpha * P + alpha * alpha / (2.0 * beta);
        };

    double r0_sq = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double K = c0[i] - b0[i];
        sys.invariants.push_back(
            {"c" + std::to_string(i + 1) + " - b" + std::to_string(i + 1),
             [N, i](const std::vector<double>& y) { return y[2 * N + i] - y[N + i]; }});
        sys.invariants.push_back(
            {"a" + std::to_string(i + 1) + "^2 - b" + std::to_string(i + 1) + "^2 - 2K b",
             [N, i, K](const std::vector<double>& y) {
                 return y[i] * y[i] - y[N + i] * y[N + i] - 2.0 * K * y[N + i];
             }});
        const double r0 = 0.5 * (a0[i] + c0[i]);
        r0_sq += r0 * r0;
        sys.notes.push_back("r0_" + std::to_string(i + 1) + " = " + std::to_string(r0));
    }
    if (r0_sq == 0.0) {
        sys.expect_convergence = false;
        sys.notes.push_back("all r0 vanish: flow cannot reach the optimum");
    }
    return sys;
}

namespace {

Matrix unpack(const std::vector<double>& y, std::size_t offset, std::size_t rows,
              std::size_t cols) {
    Matrix m(rows, cols);
    std::copy(y.begin() + offset, y.begin() + offset + rows * cols, m.values().begin());
    return m;
}

void pack(std::vector<double>& y, const Matrix& m) {
    y.insert(y.end(), m.values().begin(), m.values().end());
}

}  // namespace

OdeSystem build_compressive(std::size_t N, const Matrix& sigma_ii, const Matrix& sigma_ti,
                            const Matrix& a0, const Matrix& b0, const Matrix& c0) {
    if (sigma_ii.rows() != N || sigma_ii.cols() != N || sigma_ti.rows() != N ||
        sigma_ti.cols() != N)
        throw config_error("compressive: moment matrices must be N x N");
    if (a0.rows() != 1 || a0.cols() != N || b0.rows() != N || b0.cols() != 1 || c0.rows() != 1 ||
        c0.cols() != N)
        throw config_error("compressive: A and C are 1 x N, B is N x 1");

    OdeSystem sys;
    sys.name = "compressive";
    for (std::size_t i = 0; i < N; ++i) sys.state_names.push_back("A" + std::to_string(i + 1));
    for (std::size_t i = 0; i < N; ++i) sys.state_names.push_back("B" + std::to_string(i + 1));
    for (std::size_t i = 0; i < N; ++i) sys.state_names.push_back("C" + std::to_string(i + 1));
    pack(sys.y0, a0);
    pack(sys.y0, b0);
    pack(sys.y0, c0);

    auto err_mat = [N, sigma_ii, sigma_ti](const std::vector<double>& y) {
        const Matrix A = unpack(y, 0, 1, N);
        const Matrix B = unpack(y, N, N, 1);
        return sigma_ti - matmul(matmul(B, A), sigma_ii);
    };

    sys.rhs = [N, err_mat](const std::vector<double>& y) {
        const Matrix A = unpack(y, 0, 1, N);
        const Matrix C = unpack(y, 2 * N, 1, N);
        const Matrix E = err_mat(y);
        const Matrix dA = matmul(C, E);
        const Matrix dB = matmul_nt(E, A);
        const Matrix dC = matmul_nt(A, E);
        std::vector<double> dy;
        dy.reserve(3 * N);
        pack(dy, dA);
        pack(dy, dB);
        pack(dy, dC);
        return dy;
    };

    sys.residual = [err_mat](const std::vector<double>& y) { return frobenius(err_mat(y)); };
    sys.product = [N](const std::vector<double>& y) {
        return matmul(unpack(y, N, N, 1), unpack(y, 0, 1, N));
    };
    for (std::size_t i = 0; i < N; ++i)
        sys.invariants.push_back({"C" + std::to_string(i + 1) + " - B" + std::to_string(i + 1),
                                  [N, i](const std::vector<double>& y) {
                                      return y[2 * N + i] - y[N + i];
                                  }});
    return sys;
}

OdeSystem build_general_linear(const GeneralLinearSpec& spec, const std::vector<Matrix>& a0,
                               const std::vector<Matrix>& c0) {
    const std::vector<std::size_t>& n = spec.sizes;
    if (n.size() < 3) throw config_error("general-linear: need at least one hidden layer");
    const std::size_t L = n.size() - 1;
    if (spec.algorithm == Algorithm::BP)
        throw config_error("general-linear: channel must be RBP or SRBP");
    const bool srbp = spec.algorithm == Algorithm::SRBP;
    if (a0.size() != L || c0.size() != L - 1)
        throw config_error("general-linear: need L forward and L-1 channel matrices");
    for (std::size_t i = 0; i < L; ++i)
        if (a0[i].rows() != n[i + 1] || a0[i].cols() != n[i])
            throw config_error("general-linear: A_" + std::to_string(i + 1) + " shape mismatch");
    for (std::size_t i = 0; i + 1 < L; ++i) {
        const std::size_t want_cols = srbp ? n[L] : n[i + 2];
        if (c0[i].rows() != n[i + 1] || c0[i].cols() != want_cols)
            throw config_error("general-linear: C_" + std::to_string(i + 1) + " shape mismatch");
    }
    if (spec.sigma_ii.rows() != n[0] || spec.sigma_ii.cols() != n[0] ||
        spec.sigma_ti.rows() != n[L] || spec.sigma_ti.cols() != n[0])
        throw config_error("general-linear: moment matrix shape mismatch");

    OdeSystem sys;
    sys.name = srbp ? "general-linear-asrbp" : "general-linear-arbp";

    std::vector<std::size_t> offs;  // offsets of A_1..A_L then C_1..C_{L-1}
    std::size_t total = 0;
    for (std::size_t i = 0; i < L; ++i) {
        offs.push_back(total);
        total += a0[i].size();
    }
    for (std::size_t i = 0; i + 1 < L; ++i) {
        offs.push_back(total);
        total += c0[i].size();
    }
    if (total > 10000) throw config_error("general-linear: state too large (> 1e4 entries)");
    sys.y0.reserve(total);
    for (const Matrix& m : a0) pack(sys.y0, m);
    for (const Matrix& m : c0) pack(sys.y0, m);
    for (std::size_t i = 0; i < L; ++i) sys.state_names.push_back("A" + std::to_string(i + 1));
    for (std::size_t i = 0; i + 1 < L; ++i) sys.state_names.push_back("C" + std::to_string(i + 1));

    auto unpack_all = [n, L, offs, srbp](const std::vector<double>& y, std::vector<Matrix>& A,
                                         std::vector<Matrix>& C) {
        A.resize(L);
        C.resize(L - 1);
        for (std::size_t i = 0; i < L; ++i) A[i] = unpack(y, offs[i], n[i + 1], n[i]);
        for (std::size_t i = 0; i + 1 < L; ++i)
            C[i] = unpack(y, offs[L + i], n[i + 1], srbp ? n[L] : n[i + 2]);
    };

    auto product = [unpack_all, L](const std::vector<double>& y) {
        std::vector<Matrix> A, C;
        unpack_all(y, A, C);
        Matrix P = A[0];
        for (std::size_t i = 1; i < L; ++i) P = matmul(A[i], P);
        return P;
    };
    sys.product = product;

    const Matrix sii = spec.sigma_ii, sti = spec.sigma_ti;
    sys.rhs = [unpack_all, product, L, sii, sti, srbp](const std::vector<double>& y) {
        std::vector<Matrix> A, C;
        unpack_all(y, A, C);
        const Matrix E = sti - matmul(product(y), sii);

        // pre[i] = A_i ... A_1 (pre[0] = I); csuf[i] = C_i ... C_{L-1} for RBP
        std::vector<Matrix> pre(L + 1);
        pre[0] = Matrix::identity(A[0].cols());
        for (std::size_t i = 0; i < L; ++i) pre[i + 1] = matmul(A[i], pre[i]);
        std::vector<Matrix> csuf(L + 1);
        if (!srbp) {
            csuf[L] = Matrix::identity(E.rows());
            for (std::size_t i = L - 1; i >= 1; --i) csuf[i] = matmul(C[i - 1], csuf[i + 1]);
        }

        std::vector<double> dy;
        dy.reserve(y.size());
        for (std::size_t i = 1; i <= L; ++i) {
            Matrix channel;
            if (srbp)
                channel = i < L ? C[i - 1] : Matrix::identity(E.rows());
            else
                channel = csuf[i];
            // dA_i = channel * E * (A_{i-1} ... A_1)^t
            const Matrix dAi = matmul_nt(matmul(channel, E), pre[i - 1]);
            pack(dy, dAi);
        }
        for (std::size_t i = 1; i < L; ++i) {
            // dC_i = A_i ... A_1 E^t (C_{L-1} ... C_{i+1})^t
            Matrix dCi = matmul_nt(pre[i], E);
            if (!srbp) dCi = matmul_nt(dCi, csuf[i + 1]);
            pack(dy, dCi);
        }
        return dy;
    };

    sys.residual = [product, sii, sti](const std::vector<double>& y) {
        return frobenius(sti - matmul(product(y), sii));
    };
    sys.error = [product, sii, sti](const std::vector<double>& y) {
        const Matrix P = product(y);
        const Matrix PS = matmul(P, sii);
        double e = 0.0;
        for (std::size_t i = 0; i < P.rows(); ++i)
            for (std::size_t j = 0; j < P.cols(); ++j)
                e += 0.5 * PS(i, j) * P(i, j) - sti(i, j) * P(i, j);
        return e;
    };

    if (!srbp) {
        double max_k = 0.0;
        for (std::size_t i = 0; i + 1 < L; ++i) {
            const std::size_t oc = offs[L + i], oa = offs[i + 1];
            const std::size_t rows = n[i + 1], cols = n[i + 2];
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t cidx = 0; cidx < cols; ++cidx) {
                    sys.invariants.push_back(
                        {"C" + std::to_string(i + 1) + "-A" + std::to_string(i + 2) + "t[" +
                             std::to_string(r) + "," + std::to_string(cidx) + "]",
                         [oc, oa, r, cidx, cols, i, n](const std::vector<double>& y) {
                             return y[oc + r * cols + cidx] - y[oa + cidx * n[i + 1] + r];
                         }});
                    max_k = std::max(max_k, std::fabs(c0[i](r, cidx) - a0[i + 1](cidx, r)));
                }
        }
        sys.notes.push_back("max |K| = " + std::to_string(max_k));
        if (max_k == 0.0) sys.notes.push_back("K = 0: flow coincides with the gradient flow");
    }
    return sys;
}

OdeSystem build_nonlinear_power(double mu, double alpha, double beta,
                                const std::vector<double>& y0) {
    if (y0.size() != 3) throw config_error("nonlinear-power: state is (a1, a2, c1)");
    OdeSystem sys;
    sys.name = "nonlinear-power";
    sys.state_names = {"a1", "a2", "c1"};
    sys.y0 = y0;
    sys.rhs = [mu, alpha, beta](const std::vector<double>& y) {
        const double a1 = y[0], a2 = y[1], c1 = y[2];
        const double o1 = std::pow(a1, mu);  // NaN off-domain; the integrator aborts
        const double D = alpha - beta * a2 * o1;
        return std::vector<double>{mu * std::pow(a1, mu - 1.0) * c1 * D, o1 * D, o1 * D};
    };
    sys.residual = [mu, alpha, beta](const std::vector<double>& y) {
        return std::fabs(alpha - beta * y[1] * std::pow(y[0], mu));
    };
    sys.invariants.push_back(
        {"c1 - a2", [](const std::vector<double>& y) { return y[2] - y[1]; }});
    sys.invariants.push_back({"mu c1^2 - a1^2", [mu](const std::vector<double>& y) {
                                  return mu * y[2] * y[2] - y[0] * y[0];
                              }});
    return sys;
}

}  // namespace lc
