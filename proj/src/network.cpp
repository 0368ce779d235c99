#include "lc/network.hpp"

#include <cmath>

#include "lc/datasets.hpp"

namespace lc {

bool NetworkParams::all_finite() const {
    for (const auto& w : weights)
        if (!w.all_finite()) return false;
    for (const auto& b : biases)
        if (!b.all_finite()) return false;
    return true;
}

NetworkParams make_network(std::size_t input_size, const std::vector<LayerSpec>& layers,
                           const Initializer& init, RngStream& rng) {
    if (layers.empty()) throw config_error("make_network: at least one layer required");
    NetworkParams net;
    net.input_size = input_size;
    net.layers = layers;
    std::size_t prev = input_size;
    for (const auto& spec : layers) {
        if (spec.size < 1) throw config_error("make_network: layer size must be >= 1");
        net.weights.push_back(sample(init, spec.size, prev, rng));
        net.biases.emplace_back(1, spec.size);  // biases start at zero
        prev = spec.size;
    }
    return net;
}

NetworkParams make_network(const std::vector<std::size_t>& sizes, const TransferFunction& hidden,
                           const TransferFunction& output, const Initializer& init, RngStream& rng) {
    if (sizes.size() < 2) throw config_error("make_network: need input and output sizes");
    std::vector<LayerSpec> layers;
    for (std::size_t i = 1; i < sizes.size(); ++i) {
        const bool top = (i + 1 == sizes.size());
        layers.push_back({sizes[i], top ? output : hidden, true});
    }
    return make_network(sizes[0], layers, init, rng);
}

Matrix ForwardTrace::effective(std::size_t h) const {
    if (h == 0) return inputs;
    const Matrix& act = activations[h - 1];
    if (masks.empty() || masks[h - 1].empty()) return act;
    return hadamard(act, masks[h - 1]);
}

ForwardResult forward(const NetworkParams& net, const Matrix& inputs,
                      const std::optional<DropoutSpec>& dropout, RngStream* rng) {
    if (inputs.cols() != net.input_size)
        throw config_error("forward: input width " + std::to_string(inputs.cols()) +
                           " != N_0 = " + std::to_string(net.input_size));
    const bool use_dropout = dropout && dropout->p > 0.0;
    if (use_dropout) {
        if (dropout->p >= 1.0) throw config_error("forward: dropout p must be < 1");
        if (!rng) throw config_error("forward: dropout requires an RNG stream");
    }

    const std::size_t L = net.depth();
    ForwardTrace trace;
    trace.batch = inputs.rows();
    trace.inputs = inputs;
    trace.preacts.resize(L);
    trace.activations.resize(L);
    trace.derivatives.resize(L);
    if (use_dropout) trace.masks.resize(L);

    Matrix current = inputs;
    for (std::size_t h = 0; h < L; ++h) {
        const LayerSpec& spec = net.layers[h];
        Matrix s = matmul_nt(current, net.weights[h]);
        if (spec.has_bias) {
            const Matrix& b = net.biases[h];
            for (std::size_t r = 0; r < s.rows(); ++r)
                for (std::size_t c = 0; c < s.cols(); ++c) s(r, c) += b(0, c);
        }
        Matrix o = apply_transfer_rows(spec.transfer, s);
        if (spec.transfer.has_derivative())
            trace.derivatives[h] = transfer_derivative_rows(spec.transfer, s);
        trace.preacts[h] = std::move(s);
        trace.activations[h] = o;

        const bool hidden = (h + 1 < L);
        if (use_dropout && hidden) {
            const double keep_scale = 1.0 / (1.0 - dropout->p);
            Matrix mask(o.rows(), o.cols());
            for (double& v : mask.values()) v = rng->bernoulli(dropout->p) ? 0.0 : keep_scale;
            o = hadamard(std::move(o), mask);
            trace.masks[h] = std::move(mask);
        }
        current = std::move(o);
    }
    return {current, std::move(trace)};
}

Score predict_and_score(const NetworkParams& net, const Dataset& data, const Loss& loss,
                        std::size_t eval_batch) {
    if (data.size() == 0) throw config_error("predict_and_score: empty dataset");
    if (data.feature_dim() != net.input_size)
        throw config_error("predict_and_score: feature width != N_0");

    const std::size_t n = data.size();
    const std::size_t c = data.target_dim();
    double total_loss = 0.0;
    std::size_t correct = 0;

    for (std::size_t start = 0; start < n; start += eval_batch) {
        const std::size_t count = std::min(eval_batch, n - start);
        Matrix batch(count, data.feature_dim());
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = 0; j < data.feature_dim(); ++j)
                batch(i, j) = data.features(start + i, j);
        const Matrix out = forward(net, batch).outputs;
        for (std::size_t i = 0; i < count; ++i) {
            std::span<const double> t(data.targets.row(start + i), c);
            std::span<const double> o(out.row(i), c);
            total_loss += loss_value(loss, t, o);
            if (data.kind == TaskKind::Classification) {
                if (c == 1) {
                    const int pred = o[0] > 0.5 ? 1 : 0;
                    if (pred == static_cast<int>(t[0])) ++correct;
                } else {
                    std::size_t po = 0, pt = 0;
                    for (std::size_t j = 1; j < c; ++j) {
                        if (o[j] > o[po]) po = j;  // strict: ties go to lowest index
                        if (t[j] > t[pt]) pt = j;
                    }
                    if (po == pt) ++correct;
                }
            }
        }
    }
    Score score;
    score.loss = total_loss / static_cast<double>(n);
    score.accuracy = data.kind == TaskKind::Classification
                         ? static_cast<double>(correct) / static_cast<double>(n)
                         : 0.0;
    return score;
}

}  // namespace lc
