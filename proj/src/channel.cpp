#include "lc/channel.hpp"

#include <cmath>

namespace lc {

namespace {

Matrix apply_channel_transfer(ChannelTransfer g, Matrix u) {
    if (g == ChannelTransfer::Tanh)
        for (double& v : u.values()) v = std::tanh(v);
    return u;
}

Matrix channel_transfer_derivative(ChannelTransfer g, const Matrix& u) {
    Matrix d(u.rows(), u.cols(), 1.0);
    if (g == ChannelTransfer::Tanh)
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double t = std::tanh(u.values()[i]);
            d.values()[i] = 1.0 - t * t;
        }
    return d;
}

/// Forward-channel derivative with the forward dropout mask folded in
/// (dropped units carry no signal).
Matrix masked_derivative(const ForwardTrace& trace, std::size_t h) {
    Matrix d = trace.derivatives[h];
    if (trace.has_masks() && !trace.masks[h].empty()) d = hadamard(std::move(d), trace.masks[h]);
    return d;
}

void apply_mask_if_any(Matrix& m, const ChannelDropout* dropout, std::size_t h) {
    if (dropout && h < dropout->masks.size() && !dropout->masks[h].empty())
        m = hadamard(std::move(m), dropout->masks[h]);
}

}  // namespace

void ChannelConfig::validate(std::size_t depth) const {
    if (dropout_p < 0.0 || dropout_p >= 1.0)
        throw config_error("channel: p_lc must be in [0, 1)");
    if (algorithm == Algorithm::BP) {
        if (architecture != Architecture::Conjoined)
            throw config_error("channel: BP is defined on the transposed forward weights; Distinct is not allowed");
        if (transfer != ChannelTransfer::Linear)
            throw config_error("channel: BP requires a linear channel");
        if (adaptivity != Adaptivity::Fixed)
            throw config_error("channel: BP's channel cannot adapt");
    }
    if (architecture == Architecture::Distinct) {
        if (channel_sizes.size() != depth - 1)
            throw config_error("channel: Distinct needs channel sizes for layers 1.." +
                               std::to_string(depth - 1));
        for (std::size_t m : channel_sizes)
            if (m < 1) throw config_error("channel: channel layer sizes must be >= 1");
    }
    if (adaptivity == Adaptivity::Stdp) {
        if (algorithm != Algorithm::SRBP || architecture != Architecture::Conjoined)
            throw config_error("channel: the STDP rule is defined on a Conjoined SRBP channel");
    }
}

bool ChannelParams::all_finite() const {
    for (const auto& m : backward)
        if (!m.all_finite()) return false;
    for (const auto& m : laterals)
        if (!m.all_finite()) return false;
    return true;
}

bool ErrorSignals::all_finite() const {
    for (const auto& m : signals)
        if (!m.all_finite()) return false;
    return true;
}

ChannelParams make_channel(const ChannelConfig& config, const NetworkParams& net, RngStream& rng) {
    const std::size_t L = net.depth();
    config.validate(L);
    ChannelParams ch;
    ch.config = config;
    if (config.algorithm == Algorithm::BP) return ch;  // BP uses live transposes

    const std::size_t NL = net.output_size();
    if (config.architecture == Architecture::Conjoined) {
        for (std::size_t h = 0; h + 1 < L; ++h) {
            const std::size_t rows = net.layer_size(h + 1);
            const std::size_t cols =
                config.algorithm == Algorithm::RBP ? net.layer_size(h + 2) : NL;
            ch.backward.push_back(sample(config.init, rows, cols, rng));
        }
    } else {
        const auto& M = config.channel_sizes;
        for (std::size_t h = 0; h + 1 < L; ++h) {
            std::size_t cols;
            if (config.algorithm == Algorithm::SRBP) cols = NL;
            else cols = (h + 2 < L) ? M[h + 1] : NL;  // top channel layer receives the delta
            ch.backward.push_back(sample(config.init, M[h], cols, rng));
        }
        for (std::size_t h = 0; h + 1 < L; ++h)
            ch.laterals.push_back(sample(config.lateral_init, net.layer_size(h + 1), M[h], rng));
    }
    return ch;
}

ChannelDropout channel_dropout_mask(const ChannelConfig& config, const NetworkParams& net,
                                    std::size_t batch, RngStream& rng) {
    ChannelDropout d;
    const double p = config.dropout_p;
    if (p <= 0.0) return d;
    const double keep_scale = 1.0 / (1.0 - p);
    const std::size_t L = net.depth();
    for (std::size_t h = 0; h + 1 < L; ++h) {
        const std::size_t width = config.architecture == Architecture::Distinct
                                      ? config.channel_sizes[h]
                                      : net.layer_size(h + 1);
        Matrix mask(batch, width);
        for (double& v : mask.values()) v = rng.bernoulli(p) ? 0.0 : keep_scale;
        d.masks.push_back(std::move(mask));
    }
    return d;
}

ErrorSignals backward_bp(const NetworkParams& net, const ForwardTrace& trace, const Matrix& delta) {
    const std::size_t L = net.depth();
    ErrorSignals es;
    es.signals.resize(L);
    es.signals[L - 1] = delta;
    for (std::size_t h = L - 1; h-- > 0;) {
        Matrix u = matmul(es.signals[h + 1], net.weights[h + 1]);
        es.signals[h] = hadamard(std::move(u), masked_derivative(trace, h));
    }
    return es;
}

ErrorSignals backward_rbp(const NetworkParams& net, const ChannelParams& channel,
                          const ForwardTrace& trace, const Matrix& delta,
                          const ChannelDropout* dropout) {
    const std::size_t L = net.depth();
    ErrorSignals es;
    es.signals.resize(L);
    es.channel_preacts.resize(L - 1);
    es.signals[L - 1] = delta;
    for (std::size_t h = L - 1; h-- > 0;) {
        Matrix u = matmul_nt(es.signals[h + 1], channel.backward[h]);
        es.channel_preacts[h] = u;
        Matrix a = apply_channel_transfer(channel.config.transfer, std::move(u));
        apply_mask_if_any(a, dropout, h);
        es.signals[h] = hadamard(std::move(a), masked_derivative(trace, h));
    }
    return es;
}

ErrorSignals backward_srbp(const NetworkParams& net, const ChannelParams& channel,
                           const ForwardTrace& trace, const Matrix& delta,
                           const ChannelDropout* dropout) {
    const std::size_t L = net.depth();
    ErrorSignals es;
    es.signals.resize(L);
    es.channel_preacts.resize(L - 1);
    es.signals[L - 1] = delta;
    for (std::size_t h = 0; h + 1 < L; ++h) {
        Matrix u = matmul_nt(delta, channel.backward[h]);
        es.channel_preacts[h] = u;
        Matrix a = apply_channel_transfer(channel.config.transfer, std::move(u));
        apply_mask_if_any(a, dropout, h);
        es.signals[h] = hadamard(std::move(a), masked_derivative(trace, h));
    }
    return es;
}

ErrorSignals backward_distinct(const NetworkParams& net, const ChannelParams& channel,
                               const ForwardTrace& trace, const Matrix& delta,
                               const ChannelDropout* dropout) {
    const std::size_t L = net.depth();
    ErrorSignals es;
    es.signals.resize(L);
    es.channel_preacts.resize(L - 1);
    es.channel_activity.resize(L - 1);
    es.signals[L - 1] = delta;

    if (channel.config.algorithm == Algorithm::SRBP) {
        for (std::size_t h = 0; h + 1 < L; ++h) {
            Matrix u = matmul_nt(delta, channel.backward[h]);
            es.channel_preacts[h] = u;
            Matrix a = apply_channel_transfer(channel.config.transfer, std::move(u));
            apply_mask_if_any(a, dropout, h);
            es.channel_activity[h] = std::move(a);
        }
    } else {
        // sequential chain through the channel's own layers, top first
        Matrix incoming = delta;
        for (std::size_t h = L - 1; h-- > 0;) {
            Matrix u = matmul_nt(incoming, channel.backward[h]);
            es.channel_preacts[h] = u;
            Matrix a = apply_channel_transfer(channel.config.transfer, std::move(u));
            apply_mask_if_any(a, dropout, h);
            es.channel_activity[h] = a;
            incoming = std::move(a);
        }
    }
    for (std::size_t h = 0; h + 1 < L; ++h) {
        Matrix lateral = matmul_nt(es.channel_activity[h], channel.laterals[h]);
        es.signals[h] = hadamard(std::move(lateral), masked_derivative(trace, h));
    }
    return es;
}

ErrorSignals backward(const NetworkParams& net, const ChannelParams& channel,
                      const ForwardTrace& trace, const Matrix& delta,
                      const ChannelDropout* dropout) {
    if (channel.config.algorithm == Algorithm::BP) return backward_bp(net, trace, delta);
    if (channel.config.architecture == Architecture::Distinct)
        return backward_distinct(net, channel, trace, delta, dropout);
    return channel.config.algorithm == Algorithm::RBP
               ? backward_rbp(net, channel, trace, delta, dropout)
               : backward_srbp(net, channel, trace, delta, dropout);
}

WeightDeltas forward_weight_update(const NetworkParams& net, const ForwardTrace& trace,
                                   const ErrorSignals& signals, double eta) {
    const std::size_t L = net.depth();
    const double scale = eta / static_cast<double>(trace.batch);
    WeightDeltas d;
    d.weights.resize(L);
    d.biases.resize(L);
    for (std::size_t h = 0; h < L; ++h) {
        d.weights[h] = matmul_tn(signals.signals[h], trace.effective(h)) * scale;
        if (net.layers[h].has_bias) d.biases[h] = col_sums(signals.signals[h]) * scale;
        else d.biases[h] = Matrix(1, net.layer_size(h + 1));
    }
    return d;
}

void apply_deltas(NetworkParams& net, const WeightDeltas& deltas) {
    for (std::size_t h = 0; h < net.depth(); ++h) {
        net.weights[h] += deltas.weights[h];
        net.biases[h] += deltas.biases[h];
    }
}

std::vector<Matrix> hebbian_channel_update(const ChannelParams& channel, const NetworkParams& net,
                                           const ForwardTrace& trace, const ErrorSignals& signals,
                                           double eta) {
    if (channel.config.adaptivity != Adaptivity::Hebbian)
        throw config_error("hebbian_channel_update: channel adaptivity is not hebbian");
    const std::size_t L = net.depth();
    const double scale = eta / static_cast<double>(trace.batch);
    std::vector<Matrix> deltas(channel.backward.size());

    for (std::size_t h = 0; h + 1 < L; ++h) {
        // postsynaptic forward activity at the receiving layer, modulated by
        // the channel unit's own transfer derivative when non-linear
        Matrix post = trace.effective(h + 1);
        if (channel.config.architecture == Architecture::Distinct)
            post = matmul(post, channel.laterals[h]);  // project through the fixed laterals
        if (channel.config.transfer == ChannelTransfer::Tanh)
            post = hadamard(std::move(post),
                            channel_transfer_derivative(channel.config.transfer,
                                                        signals.channel_preacts[h]));
        // presynaptic signal arriving through the channel
        const Matrix* pre = nullptr;
        if (channel.config.algorithm == Algorithm::SRBP) {
            pre = &signals.signals[L - 1];
        } else if (channel.config.architecture == Architecture::Conjoined) {
            pre = &signals.signals[h + 1];
        } else {
            pre = (h + 2 < L) ? &signals.channel_activity[h + 1] : &signals.signals[L - 1];
        }
        deltas[h] = matmul_tn(post, *pre) * scale;
    }
    return deltas;
}

void apply_channel_deltas(ChannelParams& channel, const std::vector<Matrix>& deltas) {
    for (std::size_t h = 0; h < deltas.size(); ++h)
        if (!deltas[h].empty()) channel.backward[h] += deltas[h];
}

StdpTraces stdp_traces(const NetworkParams& net, const ChannelParams& channel, const Matrix& inputs,
                       const Matrix& targets) {
    if (channel.config.algorithm != Algorithm::SRBP ||
        channel.config.architecture != Architecture::Conjoined)
        throw config_error("stdp_traces: requires a Conjoined SRBP channel");
    const std::size_t L = net.depth();
    ForwardResult free_pass = forward(net, inputs);
    const Matrix& out_free = free_pass.outputs;

    StdpTraces tr;
    tr.t1 = free_pass.trace;
    tr.t2 = free_pass.trace;
    for (std::size_t h = 0; h + 1 < L; ++h) {
        const Matrix fb1 = matmul_nt(out_free, channel.backward[h]);
        const Matrix fb2 = matmul_nt(targets, channel.backward[h]);
        const TransferFunction& f = net.layers[h].transfer;
        tr.t1.activations[h] = apply_transfer_rows(f, free_pass.trace.preacts[h] + fb1);
        tr.t2.activations[h] = apply_transfer_rows(f, free_pass.trace.preacts[h] + fb2);
    }
    tr.t1.activations[L - 1] = out_free;
    tr.t2.activations[L - 1] = targets;  // clamped
    return tr;
}

StdpUpdates stdp_updates(const NetworkParams& net, const ChannelParams& channel,
                         const StdpTraces& traces, double eta, double channel_eta) {
    const std::size_t L = net.depth();
    const std::size_t batch = traces.t1.batch;
    const double scale = eta / static_cast<double>(batch);
    const double ch_scale = channel_eta / static_cast<double>(batch);
    const Matrix& out_free = traces.t1.activations[L - 1];

    StdpUpdates up;
    up.delta_o.resize(L);
    up.forward.weights.resize(L);
    up.forward.biases.resize(L);
    up.channel.resize(channel.backward.size());

    for (std::size_t h = 0; h < L; ++h)
        up.delta_o[h] = traces.t2.activations[h] - traces.t1.activations[h];

    for (std::size_t h = 0; h < L; ++h) {
        const Matrix pre = h == 0 ? traces.t1.inputs : traces.t1.activations[h - 1];
        up.forward.weights[h] = matmul_tn(up.delta_o[h], pre) * scale;
        if (net.layers[h].has_bias) up.forward.biases[h] = col_sums(up.delta_o[h]) * scale;
        else up.forward.biases[h] = Matrix(1, net.layer_size(h + 1));
    }
    for (std::size_t h = 0; h + 1 < L; ++h)
        up.channel[h] = matmul_tn(up.delta_o[h], out_free) * ch_scale;
    return up;
}

}  // namespace lc
