#include <doctest.h>

#include <cmath>

#include "lc/datasets.hpp"
#include "lc/network.hpp"

using namespace lc;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, RngStream& rng) {
    Matrix m(r, c);
    for (double& v : m.values()) v = rng.normal();
    return m;
}

}  // namespace

TEST_CASE("linear layers compose to a single matrix product") {
    RngStream rng(21);
    NetworkParams net = make_network({4, 3, 2}, TransferFunction::identity(),
                                     TransferFunction::identity(), Initializer::scaled_normal(),
                                     rng);
    const Matrix X = random_matrix(5, 4, rng);
    const Matrix out = forward(net, X).outputs;
    const Matrix ref = matmul_nt(matmul_nt(X, net.weights[0]), net.weights[1]);
    CHECK(max_abs(out - ref) <= 1e-13);  // biases start at zero
}

TEST_CASE("forward trace is internally consistent") {
    RngStream rng(22);
    NetworkParams net = make_network({6, 5, 4, 3}, TransferFunction::tanh_fn(),
                                     TransferFunction::softmax(), Initializer::scaled_normal(),
                                     rng);
    const Matrix X = random_matrix(4, 6, rng);
    const ForwardResult fr = forward(net, X);
    for (std::size_t h = 0; h < net.depth(); ++h) {
        const Matrix ref = apply_transfer_rows(net.layers[h].transfer, fr.trace.preacts[h]);
        CHECK(max_abs(fr.trace.activations[h] - ref) == 0.0);
    }
    CHECK(max_abs(fr.outputs - fr.trace.activations[2]) == 0.0);
    CHECK(fr.trace.derivatives[2].empty());  // softmax top has no pointwise derivative
}

TEST_CASE("forward rejects mismatched input width") {
    RngStream rng(23);
    NetworkParams net = make_network({4, 2}, TransferFunction::identity(),
                                     TransferFunction::identity(), Initializer::scaled_normal(),
                                     rng);
    CHECK_THROWS_AS(forward(net, Matrix(1, 3)), config_error);
}

TEST_CASE("dropout: inverted scaling keeps expectations, output layer untouched") {
    RngStream rng(24);
    NetworkParams net = make_network({3, 50, 2}, TransferFunction::identity(),
                                     TransferFunction::identity(), Initializer::scaled_normal(),
                                     rng);
    Matrix X(1, 3);
    X(0, 0) = 0.5;
    X(0, 1) = -1.0;
    X(0, 2) = 0.25;

    const Matrix clean = forward(net, X).outputs;
    RngStream drop_rng(99);
    Matrix mean(1, 2);
    const int trials = 4000;
    for (int i = 0; i < trials; ++i) {
        const ForwardResult fr = forward(net, X, DropoutSpec{0.4}, &drop_rng);
        mean += fr.outputs;
        // surviving units are scaled by exactly 1/(1-p)
        const Matrix& mask = fr.trace.masks[0];
        for (double v : mask.values()) CHECK((v == 0.0 || std::fabs(v - 1.0 / 0.6) < 1e-12));
        CHECK(fr.trace.masks[1].empty());  // never the output layer
    }
    mean *= 1.0 / trials;
    CHECK(max_abs(mean - clean) < 0.15 * max_abs(clean) + 0.02);
}

TEST_CASE("dropout requires an rng and p < 1") {
    RngStream rng(25);
    NetworkParams net = make_network({2, 3, 2}, TransferFunction::tanh_fn(),
                                     TransferFunction::identity(), Initializer::scaled_normal(),
                                     rng);
    CHECK_THROWS_AS(forward(net, Matrix(1, 2), DropoutSpec{0.5}, nullptr), config_error);
    CHECK_THROWS_AS(forward(net, Matrix(1, 2), DropoutSpec{1.0}, &rng), config_error);
}

TEST_CASE("argmax scoring breaks ties toward the lowest index") {
    NetworkParams net;
    net.input_size = 2;
    net.layers = {{2, TransferFunction::identity(), false}};
    net.weights = {Matrix::identity(2)};
    net.biases = {Matrix(1, 2)};

    Dataset d;
    d.kind = TaskKind::Classification;
    d.features = Matrix(1, 2, 0.5);  // equal outputs -> tie
    d.targets = Matrix(1, 2);
    d.targets(0, 0) = 1.0;  // lowest index wins the tie, so this is "correct"
    const Score s = predict_and_score(net, d, Loss{LossKind::SquaredError});
    CHECK(s.accuracy == 1.0);

    d.targets(0, 0) = 0.0;
    d.targets(0, 1) = 1.0;
    CHECK(predict_and_score(net, d, Loss{LossKind::SquaredError}).accuracy == 0.0);
}

TEST_CASE("scoring an empty dataset is an error") {
    RngStream rng(26);
    NetworkParams net = make_network({2, 2}, TransferFunction::identity(),
                                     TransferFunction::identity(), Initializer::scaled_normal(),
                                     rng);
    Dataset d;
    CHECK_THROWS_AS(predict_and_score(net, d, Loss{LossKind::SquaredError}), config_error);
}

TEST_CASE("same seed gives the same network, different seed differs") {
    RngStream r1(31), r2(31), r3(32);
    const auto sizes = std::vector<std::size_t>{5, 4, 3};
    NetworkParams n1 = make_network(sizes, TransferFunction::tanh_fn(),
                                    TransferFunction::softmax(), Initializer::scaled_normal(), r1);
    NetworkParams n2 = make_network(sizes, TransferFunction::tanh_fn(),
                                    TransferFunction::softmax(), Initializer::scaled_normal(), r2);
    NetworkParams n3 = make_network(sizes, TransferFunction::tanh_fn(),
                                    TransferFunction::softmax(), Initializer::scaled_normal(), r3);
    CHECK(max_abs(n1.weights[0] - n2.weights[0]) == 0.0);
    CHECK(max_abs(n1.weights[0] - n3.weights[0]) != 0.0);
}
