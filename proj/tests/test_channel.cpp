#include <doctest.h>

#include <cmath>

#include "lc/channel.hpp"

using namespace lc;

namespace {

Matrix random_matrix(std::size_t r, std::size_t c, RngStream& rng) {
    Matrix m(r, c);
    for (double& v : m.values()) v = rng.normal();
    return m;
}

Matrix one_hot(std::size_t batch, std::size_t classes, RngStream& rng) {
    Matrix t(batch, classes);
    for (std::size_t i = 0; i < batch; ++i) t(i, rng.index(classes)) = 1.0;
    return t;
}

}  // namespace

TEST_CASE("channel config validation") {
    ChannelConfig cfg;
    cfg.algorithm = Algorithm::BP;
    cfg.architecture = Architecture::Distinct;
    CHECK_THROWS_AS(cfg.validate(3), config_error);
    cfg.architecture = Architecture::Conjoined;
    cfg.transfer = ChannelTransfer::Tanh;
    CHECK_THROWS_AS(cfg.validate(3), config_error);
    cfg.transfer = ChannelTransfer::Linear;
    cfg.adaptivity = Adaptivity::Hebbian;
    CHECK_THROWS_AS(cfg.validate(3), config_error);

    ChannelConfig distinct;
    distinct.algorithm = Algorithm::SRBP;
    distinct.architecture = Architecture::Distinct;
    CHECK_THROWS_AS(distinct.validate(3), config_error);  // missing channel sizes
    distinct.channel_sizes = {4, 4};
    CHECK_NOTHROW(distinct.validate(3));

    ChannelConfig stdp;
    stdp.algorithm = Algorithm::RBP;
    stdp.adaptivity = Adaptivity::Stdp;
    CHECK_THROWS_AS(stdp.validate(3), config_error);
}

TEST_CASE("backward deltas match the loss gradient for BP") {
    RngStream rng(41);
    NetworkParams net = make_network({5, 4, 3}, TransferFunction::tanh_fn(),
                                     TransferFunction::softmax(), Initializer::scaled_normal(),
                                     rng);
    const Matrix X = random_matrix(3, 5, rng);
    const Matrix T = one_hot(3, 3, rng);
    const Loss loss{LossKind::CrossEntropySoftmax};

    const ForwardResult fr = forward(net, X);
    const Matrix delta = output_delta_rows(loss, T, fr.outputs);
    const ErrorSignals es = backward_bp(net, fr.trace, delta);
    const WeightDeltas d = forward_weight_update(net, fr.trace, es, 1.0);

    auto mean_loss = [&]() {
        const Matrix out = forward(net, X).outputs;
        double total = 0.0;
        for (std::size_t i = 0; i < 3; ++i)
            total += loss_value(loss, {T.row(i), 3}, {out.row(i), 3});
        return total / 3.0;
    };
    const double h = 1e-6;
    for (std::size_t l = 0; l < 2; ++l)
        for (std::size_t i = 0; i < net.weights[l].size(); ++i) {
            double& w = net.weights[l].values()[i];
            const double saved = w;
            w = saved + h;
            const double ep = mean_loss();
            w = saved - h;
            const double em = mean_loss();
            w = saved;
            const double fd = (ep - em) / (2.0 * h);
            CHECK(std::fabs(d.weights[l].values()[i] + fd) <= 1e-5 * std::max(std::fabs(fd), 1e-3));
        }
}

TEST_CASE("random channel set to live transposes reproduces BP") {
    RngStream rng(42);
    NetworkParams net = make_network({4, 5, 4, 2}, TransferFunction::tanh_fn(),
                                     TransferFunction::softmax(), Initializer::scaled_normal(),
                                     rng);
    ChannelParams ch;
    ch.config.algorithm = Algorithm::RBP;
    for (std::size_t h = 0; h + 1 < net.depth(); ++h)
        ch.backward.push_back(transpose(net.weights[h + 1]));

    const Matrix X = random_matrix(6, 4, rng);
    const Matrix T = one_hot(6, 2, rng);
    const ForwardResult fr = forward(net, X);
    const Matrix delta = output_delta_rows(Loss{LossKind::CrossEntropySoftmax}, T, fr.outputs);
    const ErrorSignals bp = backward_bp(net, fr.trace, delta);
    const ErrorSignals rbp = backward(net, ch, fr.trace, delta);
    for (std::size_t h = 0; h < net.depth(); ++h)
        CHECK(max_abs(bp.signals[h] - rbp.signals[h]) <= 1e-12);
}

TEST_CASE("one hidden layer: sequential and direct channels coincide") {
    RngStream rng(43);
    NetworkParams net = make_network({5, 6, 3}, TransferFunction::tanh_fn(),
                                     TransferFunction::softmax(), Initializer::scaled_normal(),
                                     rng);
    ChannelConfig cr;
    cr.algorithm = Algorithm::RBP;
    ChannelConfig cs;
    cs.algorithm = Algorithm::SRBP;
    RngStream r1(7), r2(7);
    const ChannelParams chr = make_channel(cr, net, r1);
    const ChannelParams chs = make_channel(cs, net, r2);

    const Matrix X = random_matrix(4, 5, rng);
    const Matrix T = one_hot(4, 3, rng);
    const ForwardResult fr = forward(net, X);
    const Matrix delta = output_delta_rows(Loss{LossKind::CrossEntropySoftmax}, T, fr.outputs);
    const ErrorSignals a = backward(net, chr, fr.trace, delta);
    const ErrorSignals b = backward(net, chs, fr.trace, delta);
    CHECK(max_abs(a.signals[0] - b.signals[0]) == 0.0);
}

TEST_CASE("tanh channel is indistinguishable from linear for tiny deltas") {
    RngStream rng(44);
    NetworkParams net = make_network({4, 5, 5, 3}, TransferFunction::tanh_fn(),
                                     TransferFunction::softmax(), Initializer::scaled_normal(),
                                     rng);
    ChannelConfig lin;
    lin.algorithm = Algorithm::SRBP;
    RngStream r1(9), r2(9);
    ChannelParams ch_lin = make_channel(lin, net, r1);
    ChannelConfig tnh = lin;
    tnh.transfer = ChannelTransfer::Tanh;
    ChannelParams ch_tanh = make_channel(tnh, net, r2);

    const Matrix X = random_matrix(4, 4, rng);
    const ForwardResult fr = forward(net, X);
    Matrix delta(4, 3);
    for (double& v : delta.values()) v = 1e-6 * rng.normal();
    const ErrorSignals a = backward(net, ch_lin, fr.trace, delta);
    const ErrorSignals b = backward(net, ch_tanh, fr.trace, delta);
    for (std::size_t h = 0; h + 1 < net.depth(); ++h)
        CHECK(max_abs(a.signals[h] - b.signals[h]) <= 1e-10);
}

TEST_CASE("direct channel signals depend only on the local derivative") {
    RngStream rng(45);
    NetworkParams net = make_network({4, 5, 5, 3}, TransferFunction::tanh_fn(),
                                     TransferFunction::softmax(), Initializer::scaled_normal(),
                                     rng);
    ChannelConfig cs;
    cs.algorithm = Algorithm::SRBP;
    RngStream r1(10);
    const ChannelParams ch = make_channel(cs, net, r1);

    const Matrix X = random_matrix(4, 4, rng);
    const ForwardResult fr = forward(net, X);
    Matrix delta(4, 3);
    for (double& v : delta.values()) v = rng.normal();

    const ErrorSignals base = backward(net, ch, fr.trace, delta);
    ForwardTrace tampered = fr.trace;
    tampered.derivatives[1] = Matrix(4, 5, 0.123);  // poison layer 2's derivative
    const ErrorSignals after = backward(net, ch, tampered, delta);
    CHECK(max_abs(base.signals[0] - after.signals[0]) == 0.0);  // layer 1 unaffected
    CHECK(max_abs(base.signals[1] - after.signals[1]) != 0.0);

    // the sequential channel, by contrast, feeds layer 2's product into layer 1
    ChannelConfig cr;
    cr.algorithm = Algorithm::RBP;
    RngStream r2(10);
    const ChannelParams chr = make_channel(cr, net, r2);
    const ErrorSignals rbase = backward(net, chr, fr.trace, delta);
    const ErrorSignals rafter = backward(net, chr, tampered, delta);
    CHECK(max_abs(rbase.signals[0] - rafter.signals[0]) != 0.0);
}

TEST_CASE("separate-channel architecture with identity laterals reduces to the conjoined case") {
    RngStream rng(46);
    // identity hidden transfers so no mid-chain derivative factors intervene
    NetworkParams net = make_network({3, 4, 4, 2}, TransferFunction::identity(),
                                     TransferFunction::identity(), Initializer::scaled_normal(),
                                     rng);
    ChannelConfig conj;
    conj.algorithm = Algorithm::RBP;
    RngStream r1(11);
    const ChannelParams ch_conj = make_channel(conj, net, r1);

    ChannelConfig dist = conj;
    dist.architecture = Architecture::Distinct;
    dist.channel_sizes = {4, 4};
    ChannelParams ch_dist;
    ch_dist.config = dist;
    ch_dist.backward = ch_conj.backward;  // same shapes when widths match
    ch_dist.laterals = {Matrix::identity(4), Matrix::identity(4)};

    const Matrix X = random_matrix(5, 3, rng);
    const ForwardResult fr = forward(net, X);
    Matrix delta(5, 2);
    for (double& v : delta.values()) v = rng.normal();
    const ErrorSignals a = backward(net, ch_conj, fr.trace, delta);
    const ErrorSignals b = backward(net, ch_dist, fr.trace, delta);
    for (std::size_t h = 0; h + 1 < net.depth(); ++h)
        CHECK(max_abs(a.signals[h] - b.signals[h]) <= 1e-13);
}

TEST_CASE("width-1 separate channel still produces finite updates") {
    RngStream rng(47);
    NetworkParams net = make_network({6, 5, 4, 3}, TransferFunction::tanh_fn(),
                                     TransferFunction::softmax(), Initializer::scaled_normal(),
                                     rng);
    ChannelConfig cfg;
    cfg.algorithm = Algorithm::SRBP;
    cfg.architecture = Architecture::Distinct;
    cfg.channel_sizes = {1, 1};
    RngStream r1(12);
    const ChannelParams ch = make_channel(cfg, net, r1);
    const Matrix X = random_matrix(3, 6, rng);
    const Matrix T = one_hot(3, 3, rng);
    const ForwardResult fr = forward(net, X);
    const Matrix delta = output_delta_rows(Loss{LossKind::CrossEntropySoftmax}, T, fr.outputs);
    const ErrorSignals es = backward(net, ch, fr.trace, delta);
    const WeightDeltas d = forward_weight_update(net, fr.trace, es, 0.1);
    CHECK(es.all_finite());
    for (const Matrix& w : d.weights) CHECK(w.all_finite());
}

TEST_CASE("channel dropout masks: shapes, scaling, absence at p = 0") {
    RngStream rng(48);
    NetworkParams net = make_network({4, 5, 3}, TransferFunction::tanh_fn(),
                                     TransferFunction::softmax(), Initializer::scaled_normal(),
                                     rng);
    ChannelConfig cfg;
    cfg.algorithm = Algorithm::SRBP;
    CHECK(channel_dropout_mask(cfg, net, 7, rng).masks.empty());

    cfg.dropout_p = 0.25;
    const ChannelDropout d = channel_dropout_mask(cfg, net, 7, rng);
    REQUIRE(d.masks.size() == 1);
    CHECK(d.masks[0].rows() == 7);
    CHECK(d.masks[0].cols() == 5);
    for (double v : d.masks[0].values()) CHECK((v == 0.0 || std::fabs(v - 1.0 / 0.75) < 1e-12));
}

TEST_CASE("adaptive channel tracks the transposed forward weights exactly") {
    RngStream rng(49);
    NetworkParams net = make_network({3, 4, 4, 2}, TransferFunction::tanh_fn(),
                                     TransferFunction::softmax(), Initializer::scaled_normal(),
                                     rng);
    ChannelConfig cfg;
    cfg.algorithm = Algorithm::RBP;
    cfg.adaptivity = Adaptivity::Hebbian;
    RngStream r1(13);
    ChannelParams ch = make_channel(cfg, net, r1);

    std::vector<Matrix> gap0;
    for (std::size_t h = 0; h + 1 < net.depth(); ++h)
        gap0.push_back(ch.backward[h] - transpose(net.weights[h + 1]));

    const Matrix X = random_matrix(5, 3, rng);
    const Matrix T = one_hot(5, 2, rng);
    for (int step = 0; step < 25; ++step) {
        const ForwardResult fr = forward(net, X);
        const Matrix delta = output_delta_rows(Loss{LossKind::CrossEntropySoftmax}, T, fr.outputs);
        const ErrorSignals es = backward(net, ch, fr.trace, delta);
        const WeightDeltas d = forward_weight_update(net, fr.trace, es, 0.05);
        const std::vector<Matrix> cd = hebbian_channel_update(ch, net, fr.trace, es, 0.05);
        apply_deltas(net, d);
        apply_channel_deltas(ch, cd);
    }
    for (std::size_t h = 0; h + 1 < net.depth(); ++h) {
        const Matrix gap = ch.backward[h] - transpose(net.weights[h + 1]);
        CHECK(max_abs(gap - gap0[h]) <= 1e-12);
    }
}

TEST_CASE("direct-channel adaptation conserves c^2 - a^2 up to O(eta)") {
    NetworkParams net;
    net.input_size = 1;
    net.layers = {{1, TransferFunction::identity(), false},
                  {1, TransferFunction::identity(), false}};
    net.weights = {Matrix(1, 1), Matrix(1, 1)};
    net.weights[0](0, 0) = 0.2;
    net.weights[1](0, 0) = 0.3;
    net.biases = {Matrix(1, 1), Matrix(1, 1)};

    ChannelParams ch;
    ch.config.algorithm = Algorithm::SRBP;
    ch.config.adaptivity = Adaptivity::Hebbian;
    ch.backward = {Matrix(1, 1)};
    ch.backward[0](0, 0) = 0.4;

    RngStream rng(50);
    Matrix X(200, 1), T(200, 1);
    for (std::size_t i = 0; i < 200; ++i) {
        X(i, 0) = rng.normal();
        T(i, 0) = 0.9 * X(i, 0);
    }
    const double eta = 1e-3;
    const double K = 0.4 * 0.4 - 0.2 * 0.2;
    for (int step = 0; step < 1000; ++step) {
        const ForwardResult fr = forward(net, X);
        const Matrix delta = output_delta_rows(Loss{LossKind::SquaredError}, T, fr.outputs);
        const ErrorSignals es = backward(net, ch, fr.trace, delta);
        const WeightDeltas d = forward_weight_update(net, fr.trace, es, eta);
        const std::vector<Matrix> cd = hebbian_channel_update(ch, net, fr.trace, es, eta);
        apply_deltas(net, d);
        apply_channel_deltas(ch, cd);
        const double c = ch.backward[0](0, 0), a = net.weights[0](0, 0);
        CHECK(std::fabs(c * c - a * a - K) <= 20.0 * eta);
    }
}

TEST_CASE("adaptation on a fixed channel is rejected") {
    RngStream rng(51);
    NetworkParams net = make_network({3, 3, 2}, TransferFunction::tanh_fn(),
                                     TransferFunction::softmax(), Initializer::scaled_normal(),
                                     rng);
    ChannelConfig cfg;
    cfg.algorithm = Algorithm::SRBP;
    RngStream r1(14);
    const ChannelParams ch = make_channel(cfg, net, r1);
    const Matrix X = random_matrix(2, 3, rng);
    const ForwardResult fr = forward(net, X);
    const ErrorSignals es = backward(net, ch, fr.trace, Matrix(2, 2, 0.1));
    CHECK_THROWS_AS(hebbian_channel_update(ch, net, fr.trace, es, 0.1), config_error);
}

TEST_CASE("two-phase traces: clamped top, perturbed hidden layers") {
    RngStream rng(52);
    NetworkParams net = make_network({4, 5, 3}, TransferFunction::tanh_fn(),
                                     TransferFunction::softmax(), Initializer::scaled_normal(),
                                     rng);
    ChannelConfig cfg;
    cfg.algorithm = Algorithm::SRBP;
    cfg.adaptivity = Adaptivity::Stdp;
    RngStream r1(15);
    const ChannelParams ch = make_channel(cfg, net, r1);

    const Matrix X = random_matrix(3, 4, rng);
    const Matrix T = one_hot(3, 3, rng);
    const StdpTraces tr = stdp_traces(net, ch, X, T);
    CHECK(max_abs(tr.t2.activations[1] - T) == 0.0);  // clamped phase

    // phase-1 hidden activity equals f(S + C O^L), recomputed by hand
    const ForwardResult fr = forward(net, X);
    const Matrix fb = matmul_nt(fr.outputs, ch.backward[0]);
    const Matrix ref = apply_transfer_rows(net.layers[0].transfer, fr.trace.preacts[0] + fb);
    CHECK(max_abs(tr.t1.activations[0] - ref) == 0.0);

    const StdpUpdates up = stdp_updates(net, ch, tr, 0.1, 0.1);
    for (const Matrix& m : up.forward.weights) CHECK(m.all_finite());
    REQUIRE(up.channel.size() == 1);
    CHECK(up.channel[0].rows() == 5);
    CHECK(up.channel[0].cols() == 3);
}
