#pragma once

#include <optional>
#include <vector>

#include "lc/init.hpp"
#include "lc/matrix.hpp"
#include "lc/rng.hpp"
#include "lc/transfer.hpp"

namespace lc {

struct LayerSpec {
    std::size_t size = 1;
    TransferFunction transfer;
    bool has_bias = true;
};

/// Forward-channel parameters: weights[h] is N_h x N_{h-1}, biases[h] is
/// 1 x N_h. Layer indices run 1..L internally stored 0..L-1.
struct NetworkParams {
    std::size_t input_size = 0;
    std::vector<LayerSpec> layers;
    std::vector<Matrix> weights;
    std::vector<Matrix> biases;

    std::size_t depth() const { return layers.size(); }
    std::size_t output_size() const { return layers.back().size; }
    std::size_t layer_size(std::size_t h) const {  // h in 0..L, 0 = input
        return h == 0 ? input_size : layers[h - 1].size;
    }
    bool all_finite() const;
};

NetworkParams make_network(std::size_t input_size, const std::vector<LayerSpec>& layers,
                           const Initializer& init, RngStream& rng);

/// Convenience: uniform hidden transfer, explicit output transfer.
NetworkParams make_network(const std::vector<std::size_t>& sizes, const TransferFunction& hidden,
                           const TransferFunction& output, const Initializer& init, RngStream& rng);

struct DropoutSpec {
    double p = 0.0;  // drop probability for every hidden layer
};

/// Per-batch record of the forward pass. activations are pre-mask values
/// (O^h = f(S^h)); masks hold the inverted-dropout factors 0 or 1/(1-p) and
/// are empty when dropout is off. The presynaptic activity actually seen by
/// the next layer is activations[h] (.) masks[h].
struct ForwardTrace {
    std::size_t batch = 0;
    Matrix inputs;                      // batch x N_0
    std::vector<Matrix> preacts;        // S^h, batch x N_h
    std::vector<Matrix> activations;    // O^h = f(S^h), pre-mask
    std::vector<Matrix> derivatives;    // f'(S^h); empty matrix for softmax top
    std::vector<Matrix> masks;          // scaled dropout masks; empty if disabled

    bool has_masks() const { return !masks.empty(); }

    /// Activity feeding layer h+1 (mask applied). h in 0..L; 0 = inputs.
    Matrix effective(std::size_t h) const;
};

struct ForwardResult {
    Matrix outputs;  // batch x N_L
    ForwardTrace trace;
};

/// Forward pass over a batch (rows = examples). With dropout enabled, every
/// hidden layer is masked independently with survival scaling 1/(1-p); the
/// output layer is never dropped.
ForwardResult forward(const NetworkParams& net, const Matrix& inputs,
                      const std::optional<DropoutSpec>& dropout = std::nullopt,
                      RngStream* rng = nullptr);

struct Dataset;  // datasets.hpp

struct Score {
    double accuracy = 0.0;
    double loss = 0.0;
};

/// Dropout-free evaluation. Classification accuracy uses argmax with ties
/// broken toward the lowest index; single-column targets threshold at 0.5.
Score predict_and_score(const NetworkParams& net, const Dataset& data, const Loss& loss,
                        std::size_t eval_batch = 256);

}  // namespace lc
