#include "lc/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace lc {

void TrainConfig::validate() const {
    if (eta < 0.0) throw config_error("train: eta must be >= 0");
    if (batch_size < 1) throw config_error("train: batch_size must be >= 1");
    if (momentum < 0.0 || momentum >= 1.0) throw config_error("train: momentum must be in [0,1)");
    if (lr_decay < 0.0 || lr_decay >= 1.0) throw config_error("train: lr_decay must be in [0,1)");
    if (dropout_p < 0.0 || dropout_p >= 1.0) throw config_error("train: dropout p must be in [0,1)");
    if (dropout_plc < 0.0 || dropout_plc >= 1.0)
        throw config_error("train: dropout p_lc must be in [0,1)");
}

bool EarlyStopMonitor::should_stop(double val_error) {
    if (has_prev_ && val_error - prev_error_ > rule_.threshold_pct / 100.0) return true;
    prev_error_ = val_error;
    has_prev_ = true;
    return false;
}

namespace {

Matrix gather_rows(const Matrix& src, const std::vector<std::size_t>& idx, std::size_t start,
                   std::size_t count) {
    Matrix out(count, src.cols());
    for (std::size_t i = 0; i < count; ++i) {
        const double* r = src.row(idx[start + i]);
        std::copy(r, r + src.cols(), out.row(i));
    }
    return out;
}

void record_channel_diagnostics(const NetworkParams& net, const ChannelParams& channel,
                                MetricsRecord& rec) {
    for (std::size_t h = 0; h < channel.backward.size(); ++h) {
        const Matrix& c = channel.backward[h];
        rec.channel_norms.push_back(frobenius(c));
        const Matrix& a_next = net.weights[h + 1];
        if (c.rows() == a_next.cols() && c.cols() == a_next.rows()) {
            double gap = 0.0;
            for (std::size_t i = 0; i < c.rows(); ++i)
                for (std::size_t j = 0; j < c.cols(); ++j)
                    gap += std::fabs(c(i, j) - a_next(j, i));
            rec.channel_gap.push_back(gap / static_cast<double>(c.size()));
        }
    }
}

}  // namespace

TrainResult train(NetworkParams net, ChannelParams channel, const Dataset& train_data,
                  const Dataset& val_data, const Loss& loss, const TrainConfig& cfg) {
    cfg.validate();
    check_pairing(loss, net.layers.back().transfer);
    if (train_data.feature_dim() != net.input_size)
        throw config_error("train: feature width != N_0");
    if (train_data.target_dim() != net.output_size())
        throw config_error("train: target width != N_L");

    RngStream root(cfg.seed);
    RngStream shuffle_rng = root.substream(1);
    RngStream dropout_rng = root.substream(2);
    RngStream channel_rng = root.substream(3);

    const std::size_t n = train_data.size();
    const std::size_t L = net.depth();
    double lr_ch = cfg.channel_eta ? *cfg.channel_eta : cfg.eta;

    // momentum velocities
    std::vector<Matrix> vel_w(L), vel_b(L);
    for (std::size_t h = 0; h < L; ++h) {
        vel_w[h] = Matrix(net.weights[h].rows(), net.weights[h].cols());
        vel_b[h] = Matrix(1, net.layer_size(h + 1));
    }
    std::vector<Matrix> vel_c(channel.backward.size());
    for (std::size_t h = 0; h < vel_c.size(); ++h)
        vel_c[h] = Matrix(channel.backward[h].rows(), channel.backward[h].cols());

    std::optional<DropoutSpec> dropout;
    if (cfg.dropout_p > 0.0) dropout = DropoutSpec{cfg.dropout_p};
    ChannelConfig ch_cfg = channel.config;
    ch_cfg.dropout_p = cfg.dropout_plc;

    std::optional<EarlyStopMonitor> stopper;
    if (cfg.early_stop) stopper.emplace(*cfg.early_stop);

    TrainResult result;
    double lr = cfg.eta;
    std::size_t iterations = 0;
    bool stop = false;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);

    for (std::size_t epoch = 0; epoch < cfg.epochs && !stop; ++epoch) {
        // Fisher-Yates from the dedicated stream
        for (std::size_t i = n; i > 1; --i) {
            const std::size_t j = shuffle_rng.index(i);
            std::swap(order[i - 1], order[j]);
        }

        for (std::size_t start = 0; start < n && !stop; start += cfg.batch_size) {
            const std::size_t count = std::min(cfg.batch_size, n - start);
            const Matrix inputs = gather_rows(train_data.features, order, start, count);
            const Matrix targets = gather_rows(train_data.targets, order, start, count);

            WeightDeltas fwd;
            std::vector<Matrix> ch_deltas;
            if (channel.config.adaptivity == Adaptivity::Stdp) {
                const StdpTraces traces = stdp_traces(net, channel, inputs, targets);
                StdpUpdates up = stdp_updates(net, channel, traces, lr, lr_ch);
                fwd = std::move(up.forward);
                ch_deltas = std::move(up.channel);
            } else {
                const ForwardResult fr = forward(net, inputs, dropout,
                                                 dropout ? &dropout_rng : nullptr);
                const Matrix delta = output_delta_rows(loss, targets, fr.outputs);
                const ChannelDropout ch_drop =
                    channel_dropout_mask(ch_cfg, net, count, channel_rng);
                const ErrorSignals signals = backward(net, channel, fr.trace, delta,
                                                      ch_drop.masks.empty() ? nullptr : &ch_drop);
                fwd = forward_weight_update(net, fr.trace, signals, lr);
                if (channel.config.adaptivity == Adaptivity::Hebbian)
                    ch_deltas = hebbian_channel_update(channel, net, fr.trace, signals, lr_ch);
            }

            // simultaneous application of forward and channel deltas
            for (std::size_t h = 0; h < L; ++h) {
                vel_w[h] = vel_w[h] * cfg.momentum + fwd.weights[h];
                vel_b[h] = vel_b[h] * cfg.momentum + fwd.biases[h];
                net.weights[h] += vel_w[h];
                net.biases[h] += vel_b[h];
            }
            for (std::size_t h = 0; h < ch_deltas.size(); ++h) {
                vel_c[h] = vel_c[h] * cfg.momentum + ch_deltas[h];
                channel.backward[h] += vel_c[h];
            }

            lr *= (1.0 - cfg.lr_decay);
            lr_ch *= (1.0 - cfg.lr_decay);
            ++iterations;

            if (!net.all_finite() || !channel.all_finite()) {
                result.diverged = true;
                stop = true;
                break;
            }
            if (cfg.max_iterations && iterations >= cfg.max_iterations) stop = true;

            if (stopper && iterations % cfg.early_stop->window == 0) {
                const Score val = predict_and_score(net, val_data, loss);
                const double err = val_data.kind == TaskKind::Classification
                                       ? 1.0 - val.accuracy
                                       : val.loss;
                if (stopper->should_stop(err)) {
                    result.stopped_early = true;
                    stop = true;
                }
            }
        }

        MetricsRecord rec;
        rec.epoch = epoch + 1;
        if (!result.diverged) {
            const Score tr = predict_and_score(net, train_data, loss);
            const Score va = predict_and_score(net, val_data, loss);
            rec.train_loss = tr.loss;
            rec.train_accuracy = tr.accuracy;
            rec.val_loss = va.loss;
            rec.val_accuracy = va.accuracy;
        } else {
            rec.train_loss = std::numeric_limits<double>::quiet_NaN();
            rec.val_loss = std::numeric_limits<double>::quiet_NaN();
        }
        record_channel_diagnostics(net, channel, rec);
        result.metrics.push_back(std::move(rec));
    }

    result.net = std::move(net);
    result.channel = std::move(channel);
    result.iterations = iterations;
    return result;
}

}  // namespace lc
