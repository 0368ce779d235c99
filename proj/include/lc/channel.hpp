#pragma once

#include <optional>
#include <vector>

#include "lc/init.hpp"
#include "lc/network.hpp"

namespace lc {

enum class Algorithm { BP, RBP, SRBP };
enum class Architecture { Conjoined, Distinct };
enum class ChannelTransfer { Linear, Tanh };
enum class Adaptivity { Fixed, Hebbian, Stdp };

struct ChannelConfig {
    Algorithm algorithm = Algorithm::BP;
    Architecture architecture = Architecture::Conjoined;
    ChannelTransfer transfer = ChannelTransfer::Linear;
    Adaptivity adaptivity = Adaptivity::Fixed;
    double dropout_p = 0.0;                  // p_lc
    Initializer init = Initializer::scaled_normal();
    Initializer lateral_init = Initializer::scaled_normal();
    std::vector<std::size_t> channel_sizes;  // Distinct only: sizes for layers 1..L-1

    void validate(std::size_t depth) const;
};

/// Backward matrices of the learning channel.
///
/// Conjoined RBP:  backward[h] is N_{h+1} x N_{h+2} for h = 0..L-2
///                 (i.e. C_{h+1}, feeding layer h+1 from layer h+2).
/// Conjoined SRBP: backward[h] is N_{h+1} x N_L.
/// Distinct:       backward matrices act on the channel's own layer sizes
///                 M_1..M_{L-1}; laterals[h] is N_{h+1} x M_{h+1}.
struct ChannelParams {
    ChannelConfig config;
    std::vector<Matrix> backward;
    std::vector<Matrix> laterals;  // Distinct only, always fixed

    bool all_finite() const;
};

ChannelParams make_channel(const ChannelConfig& config, const NetworkParams& net, RngStream& rng);

/// Per-layer error signals. signals[h] is batch x N_{h+1} for h = 0..L-1,
/// with signals[L-1] = T - O always. channel_preacts[h] holds the incoming
/// channel summation at layer h+1 (before the optional channel
/// non-linearity); channel_activity holds the Distinct channel unit outputs.
struct ErrorSignals {
    std::vector<Matrix> signals;
    std::vector<Matrix> channel_preacts;
    std::vector<Matrix> channel_activity;  // Distinct only

    bool all_finite() const;
};

/// Optional per-layer masks for the backward pass, scaled by 1/(1-p_lc).
struct ChannelDropout {
    std::vector<Matrix> masks;
};

/// Sample channel dropout masks for one batch. Shapes follow the signal the
/// mask applies to: Conjoined masks hidden-layer signals, Distinct masks the
/// channel unit activities. The top delta is never masked.
ChannelDropout channel_dropout_mask(const ChannelConfig& config, const NetworkParams& net,
                                    std::size_t batch, RngStream& rng);

/// Exact backpropagation signals: R^h = (f^h)' . (W^{h+1})^t R^{h+1}.
ErrorSignals backward_bp(const NetworkParams& net, const ForwardTrace& trace, const Matrix& delta);

/// RBP: R^h = (f^h)' . g(C_h R^{h+1}) with g the channel transfer applied to
/// the summation before the derivative product.
ErrorSignals backward_rbp(const NetworkParams& net, const ChannelParams& channel,
                          const ForwardTrace& trace, const Matrix& delta,
                          const ChannelDropout* dropout = nullptr);

/// SRBP: R^h = (f^h)' . g(C_h (T - O^L)).
ErrorSignals backward_srbp(const NetworkParams& net, const ChannelParams& channel,
                           const ForwardTrace& trace, const Matrix& delta,
                           const ChannelDropout* dropout = nullptr);

/// Distinct architecture: the delta travels through the channel's own layers
/// (sequentially for RBP, skipped for SRBP), then laterally into the forward
/// layers: R^h = (f^h)' . (C'_h u_h).
ErrorSignals backward_distinct(const NetworkParams& net, const ChannelParams& channel,
                               const ForwardTrace& trace, const Matrix& delta,
                               const ChannelDropout* dropout = nullptr);

/// Dispatch on the channel config.
ErrorSignals backward(const NetworkParams& net, const ChannelParams& channel,
                      const ForwardTrace& trace, const Matrix& delta,
                      const ChannelDropout* dropout = nullptr);

struct WeightDeltas {
    std::vector<Matrix> weights;
    std::vector<Matrix> biases;
};

/// Dw^h = eta/batch * (R^h)^t O^{h-1}; bias deltas use presynaptic 1.
WeightDeltas forward_weight_update(const NetworkParams& net, const ForwardTrace& trace,
                                   const ErrorSignals& signals, double eta);

void apply_deltas(NetworkParams& net, const WeightDeltas& deltas);

/// Channel matrix deltas for the Hebbian rule: outer product of the
/// backward-flowing signal (presynaptic in the channel) with the forward
/// activity at the receiving layer, times the channel transfer derivative
/// when the channel is non-linear. Throws config_error for fixed channels.
std::vector<Matrix> hebbian_channel_update(const ChannelParams& channel, const NetworkParams& net,
                                           const ForwardTrace& trace, const ErrorSignals& signals,
                                           double eta);

void apply_channel_deltas(ChannelParams& channel, const std::vector<Matrix>& deltas);

/// The two perturbed traces of the contrastive scheme: phase 1 adds the
/// channel feedback of O^L into each hidden layer's activation, phase 2
/// clamps the feedback to the target. activations[L-1] is the free output
/// (phase 1) and the target (phase 2).
struct StdpTraces {
    ForwardTrace t1;
    ForwardTrace t2;
};

StdpTraces stdp_traces(const NetworkParams& net, const ChannelParams& channel, const Matrix& inputs,
                       const Matrix& targets);

struct StdpUpdates {
    WeightDeltas forward;
    std::vector<Matrix> channel;
    std::vector<Matrix> delta_o;  // per layer, batch x N_h (diagnostic)
};

/// Temporal-difference rule: forward deltas use DO^h = O^h(t2) - O^h(t1)
/// against phase-1 presynaptic activity; channel deltas use the phase-1
/// fed-back output as the presynaptic term. Requires an SRBP-shaped channel.
StdpUpdates stdp_updates(const NetworkParams& net, const ChannelParams& channel,
                         const StdpTraces& traces, double eta, double channel_eta);

}  // namespace lc
