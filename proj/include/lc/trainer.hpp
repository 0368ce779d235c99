#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lc/channel.hpp"
#include "lc/datasets.hpp"
#include "lc/network.hpp"

namespace lc {

struct EarlyStopRule {
    double threshold_pct = 1.0;    // stop when val error rises by more than this
    std::size_t window = 5000;     // iterations between validation checks
};

struct TrainConfig {
    std::size_t epochs = 100;
    std::size_t batch_size = 100;
    double eta = 0.1;
    std::optional<double> channel_eta;  // defaults to eta
    double momentum = 0.0;
    double lr_decay = 0.0;  // lr *= (1 - decay) after each update
    double dropout_p = 0.0;
    double dropout_plc = 0.0;
    std::optional<EarlyStopRule> early_stop;
    std::uint64_t seed = 0;
    std::size_t max_iterations = 0;  // 0 = unlimited

    void validate() const;
};

struct MetricsRecord {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double train_accuracy = 0.0;
    double val_loss = 0.0;
    double val_accuracy = 0.0;
    std::vector<double> channel_gap;    // mean |C - A^t| per layer, where shapes align
    std::vector<double> channel_norms;  // Frobenius norm per channel matrix
};

/// Stateful form of the validation-increase stopping rule: at each window
/// boundary, compare the validation error against the previous window's and
/// stop when it rose by more than threshold_pct percentage points.
class EarlyStopMonitor {
public:
    explicit EarlyStopMonitor(const EarlyStopRule& rule) : rule_(rule) {}
    bool should_stop(double val_error);

private:
    EarlyStopRule rule_;
    bool has_prev_ = false;
    double prev_error_ = 0.0;
};

struct TrainResult {
    NetworkParams net;
    ChannelParams channel;
    std::vector<MetricsRecord> metrics;
    bool diverged = false;
    bool stopped_early = false;
    std::size_t iterations = 0;
};

/// Minibatch SGD with heavy-ball momentum (v <- m v + Dw, w <- w + v) and
/// multiplicative per-update learning-rate decay. Each batch computes every
/// signal from the pre-update parameters, then applies forward and channel
/// deltas simultaneously. Evaluation after each epoch runs with dropout off.
/// Any non-finite parameter aborts with the partial metrics retained.
TrainResult train(NetworkParams net, ChannelParams channel, const Dataset& train_data,
                  const Dataset& val_data, const Loss& loss, const TrainConfig& cfg);

}  // namespace lc
