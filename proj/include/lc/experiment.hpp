#pragma once

#include <string>

#include "lc/channel.hpp"
#include "lc/datasets.hpp"
#include "lc/trainer.hpp"

namespace lc {

/// Fully resolved experiment description: data source, forward network,
/// channel, and training schedule. Defaults are explicit here and echoed back
/// verbatim into every output directory.
struct ExperimentConfig {
    // [data]
    std::string data_kind = "digits";  // digits | bianchini | idx | delimited | linear
    std::size_t data_n = 5000;
    std::uint64_t data_seed = 0;
    unsigned bianchini_k = 0;
    std::string images_path, labels_path;     // idx
    std::string path;                         // delimited
    std::vector<std::size_t> feature_cols;    // delimited
    std::size_t target_col = 0;               // delimited
    bool header = false;                      // delimited
    char separator = ',';                     // delimited
    std::size_t max_rows = 0;                 // delimited
    double val_fraction = 0.2;

    // [network]
    std::vector<std::size_t> sizes;  // N_0 .. N_L
    TransferFunction hidden = TransferFunction::tanh_fn();
    TransferFunction output = TransferFunction::softmax();
    Loss loss{LossKind::CrossEntropySoftmax};
    Initializer net_init = Initializer::scaled_normal();

    // [channel]
    ChannelConfig channel;

    // [train]
    TrainConfig train;

    void validate() const;
};

/// Strict INI-style parser: sections [data] [network] [channel] [train],
/// key = value lines, '#' comments. Unknown sections or keys are errors that
/// name the offender.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config(const std::string& path);

/// The resolved config rendered back out in the same format parse_config
/// accepts (round-trips exactly).
std::string echo_config(const ExperimentConfig& cfg);

/// Materialize the data source and split off the trailing val_fraction.
void load_data(const ExperimentConfig& cfg, Dataset& train, Dataset& val);

struct ExperimentResult {
    TrainResult train;
    double final_train_accuracy = 0.0;
    double final_val_accuracy = 0.0;
};

/// Build network + channel from the seed, train, and (when out_dir is
/// non-empty) write metrics.jsonl, summary.json, and config.ini into it.
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir = "",
                                bool quiet = true);

}  // namespace lc
