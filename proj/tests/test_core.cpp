#include <doctest.h>

#include <cmath>

#include "lc/init.hpp"
#include "lc/matrix.hpp"
#include "lc/rng.hpp"
#include "lc/transfer.hpp"

using namespace lc;

namespace {

// independent triple-loop product used as the oracle for the tuned kernels
Matrix naive_matmul(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            out(i, j) = s;
        }
    return out;
}

Matrix random_matrix(std::size_t r, std::size_t c, RngStream& rng) {
    Matrix m(r, c);
    for (double& v : m.values()) v = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("matmul variants agree with the straightforward product") {
    RngStream rng(1);
    const Matrix a = random_matrix(7, 5, rng);
    const Matrix b = random_matrix(5, 9, rng);
    const Matrix ref = naive_matmul(a, b);
    CHECK(max_abs(matmul(a, b) - ref) <= 1e-13);
    CHECK(max_abs(matmul_nt(a, transpose(b)) - ref) <= 1e-13);
    CHECK(max_abs(matmul_tn(transpose(a), b) - ref) <= 1e-13);
}

TEST_CASE("matmul rejects mismatched inner dimensions") {
    Matrix a(2, 3), b(4, 2);
    CHECK_THROWS_AS(matmul(a, b), config_error);
}

TEST_CASE("rng streams are deterministic and substreams are independent") {
    RngStream a(42), b(42);
    for (int i = 0; i < 100; ++i) {
        CHECK(a.uniform() == b.uniform());
        CHECK(a.normal() == b.normal());
    }
    RngStream root(7);
    RngStream s1 = root.substream(1);
    RngStream s2 = root.substream(2);
    CHECK(s1.uniform() != s2.uniform());
    // substreams derive from the seed, not from the stream position
    RngStream root2(7);
    root2.uniform();
    CHECK(root2.substream(1).uniform() == RngStream(7).substream(1).uniform());
}

TEST_CASE("uniform stays in [0,1) and bernoulli respects p") {
    RngStream rng(3);
    int hits = 0;
    for (int i = 0; i < 20000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        if (rng.bernoulli(0.3)) ++hits;
    }
    CHECK(std::fabs(hits / 20000.0 - 0.3) < 0.02);
}

TEST_CASE("initializers: zero, determinism, and moment scaling") {
    RngStream rng(5);
    const Matrix z = sample(Initializer::zero(), 3, 3, rng);
    CHECK(max_abs(z) == 0.0);

    RngStream r1(9), r2(9);
    const Matrix m1 = sample(Initializer::scaled_normal(), 4, 6, r1);
    const Matrix m2 = sample(Initializer::scaled_normal(), 4, 6, r2);
    CHECK(max_abs(m1 - m2) == 0.0);

    // sample mean near 0 and variance near 2/(fanin+fanout) on a large draw
    RngStream r3(11);
    const Matrix big = sample(Initializer::scaled_normal(), 200, 300, r3);
    double mean = 0.0, var = 0.0;
    for (double v : big.values()) mean += v;
    mean /= double(big.size());
    for (double v : big.values()) var += (v - mean) * (v - mean);
    var /= double(big.size());
    CHECK(std::fabs(mean) < 1e-3);
    CHECK(std::fabs(var - 2.0 / 500.0) < 5e-4);

    RngStream r4(12);
    const Matrix uni = sample(Initializer::scaled_uniform(), 100, 100, r4);
    const double bound = std::sqrt(3.0 * 2.0 / 200.0);
    CHECK(max_abs(uni) <= bound);
}

TEST_CASE("analytic transfer derivatives match central differences") {
    RngStream rng(13);
    const double h = 1e-5;
    for (const TransferFunction f : {TransferFunction::identity(), TransferFunction::tanh_fn(),
                                     TransferFunction::logistic(), TransferFunction::relu(),
                                     TransferFunction::power(2.0), TransferFunction::power(1.5)}) {
        for (int i = 0; i < 100; ++i) {
            double s = 3.0 * rng.normal();
            if (f.kind == Transfer::Power) s = 0.1 + std::fabs(s);  // stay in-domain
            if (f.kind == Transfer::Relu && std::fabs(s) < 10.0 * h) continue;  // kink
            const std::vector<double> up = apply_transfer(f, {s + h});
            const std::vector<double> dn = apply_transfer(f, {s - h});
            const double fd = (up[0] - dn[0]) / (2.0 * h);
            const double an = transfer_derivative(f, {s})[0];
            CHECK(std::fabs(an - fd) / std::max(std::fabs(fd), 1e-6) <= 1e-5);
        }
    }
}

TEST_CASE("logistic derivative at 0.3 matches finite differences within 1e-8") {
    const double h = 1e-5;
    const TransferFunction f = TransferFunction::logistic();
    const double fd =
        (apply_transfer(f, {0.3 + h})[0] - apply_transfer(f, {0.3 - h})[0]) / (2.0 * h);
    CHECK(std::fabs(transfer_derivative(f, {0.3})[0] - fd) <= 1e-8);
}

TEST_CASE("softmax rows sum to one and resist overflow") {
    const TransferFunction f = TransferFunction::softmax();
    Matrix s(2, 4);
    s(0, 0) = 1000.0;
    s(0, 1) = 999.0;
    s(0, 2) = -1000.0;
    s(1, 3) = 3.5;
    const Matrix o = apply_transfer_rows(f, s);
    for (std::size_t i = 0; i < 2; ++i) {
        double sum = 0.0;
        for (std::size_t j = 0; j < 4; ++j) sum += o(i, j);
        CHECK(std::fabs(sum - 1.0) <= 1e-12);
    }
    CHECK_THROWS_AS(transfer_derivative(f, {1.0, 2.0}), config_error);
}

TEST_CASE("fractional power is undefined on negative inputs") {
    CHECK_THROWS_AS(apply_transfer(TransferFunction::power(1.5), {-0.3}), lc::domain_error);
    CHECK_NOTHROW(apply_transfer(TransferFunction::power(2.0), {-0.3}));
}

TEST_CASE("output deltas equal the negative pre-activation loss gradient") {
    // squared error with identity output: E = 1/2 ||t - s||^2, dE/ds = s - t
    const Loss loss{LossKind::SquaredError};
    const std::vector<double> t = {0.3, -1.2}, s = {0.5, 0.1};
    const std::vector<double> o = apply_transfer(TransferFunction::identity(), s);
    const std::vector<double> delta = output_delta(loss, t, o);
    const double h = 1e-6;
    for (std::size_t j = 0; j < 2; ++j) {
        std::vector<double> sp = s, sm = s;
        sp[j] += h;
        sm[j] -= h;
        const double fd = (loss_value(loss, t, apply_transfer(TransferFunction::identity(), sp)) -
                           loss_value(loss, t, apply_transfer(TransferFunction::identity(), sm))) /
                          (2.0 * h);
        CHECK(std::fabs(delta[j] + fd) <= 1e-7);
    }
}

TEST_CASE("cross-entropy deltas through softmax are T - O") {
    const Loss loss{LossKind::CrossEntropySoftmax};
    const std::vector<double> s = {0.2, -0.4, 1.1};
    const std::vector<double> o = apply_transfer(TransferFunction::softmax(), s);
    const std::vector<double> t = {0.0, 1.0, 0.0};
    const std::vector<double> delta = output_delta(loss, t, o);
    const double h = 1e-6;
    for (std::size_t j = 0; j < 3; ++j) {
        std::vector<double> sp = s, sm = s;
        sp[j] += h;
        sm[j] -= h;
        const double fd = (loss_value(loss, t, apply_transfer(TransferFunction::softmax(), sp)) -
                           loss_value(loss, t, apply_transfer(TransferFunction::softmax(), sm))) /
                          (2.0 * h);
        CHECK(std::fabs(delta[j] + fd) <= 1e-7);
    }
}

TEST_CASE("loss/output pairings are enforced") {
    CHECK_THROWS_AS(check_pairing(Loss{LossKind::CrossEntropySoftmax}, TransferFunction::tanh_fn()),
                    config_error);
    CHECK_NOTHROW(check_pairing(Loss{LossKind::CrossEntropySoftmax}, TransferFunction::softmax()));
    CHECK_NOTHROW(check_pairing(Loss{LossKind::CrossEntropyLogistic}, TransferFunction::logistic()));
    CHECK_NOTHROW(check_pairing(Loss{LossKind::SquaredError}, TransferFunction::identity()));
}
