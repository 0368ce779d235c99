#include "lc/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lc {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::size_t> parse_size_list(const std::string& v, const std::string& key) {
    std::vector<std::size_t> out;
    std::stringstream ss(v);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        try {
            out.push_back(std::stoul(trim(cell)));
        } catch (const std::exception&) {
            throw config_error("config: bad integer list for '" + key + "'");
        }
    }
    if (out.empty()) throw config_error("config: empty list for '" + key + "'");
    return out;
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        return std::stod(v);
    } catch (const std::exception&) {
        throw config_error("config: bad number for '" + key + "'");
    }
}

std::size_t parse_size(const std::string& v, const std::string& key) {
    try {
        return std::stoul(v);
    } catch (const std::exception&) {
        throw config_error("config: bad integer for '" + key + "'");
    }
}

bool parse_bool(const std::string& v, const std::string& key) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw config_error("config: bad boolean for '" + key + "'");
}

TransferFunction parse_transfer(const std::string& v, const std::string& key) {
    if (v == "identity") return TransferFunction::identity();
    if (v == "tanh") return TransferFunction::tanh_fn();
    if (v == "logistic") return TransferFunction::logistic();
    if (v == "relu") return TransferFunction::relu();
    if (v == "softmax") return TransferFunction::softmax();
    if (v.rfind("power:", 0) == 0)
        return TransferFunction::power(parse_double(v.substr(6), key));
    throw config_error("config: unknown transfer '" + v + "' for '" + key + "'");
}

std::string transfer_name(const TransferFunction& f) {
    switch (f.kind) {
        case Transfer::Identity: return "identity";
        case Transfer::Tanh: return "tanh";
        case Transfer::Logistic: return "logistic";
        case Transfer::Relu: return "relu";
        case Transfer::Softmax: return "softmax";
        case Transfer::Power: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "power:%g", f.mu);
            return buf;
        }
    }
    return "identity";
}

Initializer parse_init(const std::string& v, const std::string& key) {
    if (v == "normal") return Initializer::scaled_normal();
    if (v == "uniform") return Initializer::scaled_uniform();
    if (v == "zero") return Initializer::zero();
    throw config_error("config: unknown initializer '" + v + "' for '" + key + "'");
}

std::string init_name(const Initializer& i) {
    switch (i.kind) {
        case InitKind::ScaledNormal: return "normal";
        case InitKind::ScaledUniform: return "uniform";
        case InitKind::Zero: return "zero";
        case InitKind::Constant: return "zero";  // not expressible; only zero is bundled
    }
    return "normal";
}

std::string join(const std::vector<std::size_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(v[i]);
    }
    return s;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (data_kind != "digits" && data_kind != "bianchini" && data_kind != "idx" &&
        data_kind != "delimited" && data_kind != "linear")
        throw config_error("config: unknown data kind '" + data_kind + "'");
    if (sizes.size() < 2) throw config_error("config: network sizes need input and output");
    if (val_fraction < 0.0 || val_fraction >= 1.0)
        throw config_error("config: val_fraction must be in [0,1)");
    channel.validate(sizes.size() - 1);
    train.validate();
    check_pairing(loss, output);
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    std::size_t lineno = 0;
    bool have_sizes = false;

    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#' || t[0] == ';') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw config_error("config: line " + std::to_string(lineno) + ": bad section");
            section = t.substr(1, t.size() - 2);
            if (section != "data" && section != "network" && section != "channel" &&
                section != "train")
                throw config_error("config: unknown section [" + section + "]");
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw config_error("config: line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string val = trim(t.substr(eq + 1));
        if (section.empty())
            throw config_error("config: line " + std::to_string(lineno) + ": key outside section");

        if (section == "data") {
            if (key == "kind") cfg.data_kind = val;
            else if (key == "n") cfg.data_n = parse_size(val, key);
            else if (key == "seed") cfg.data_seed = parse_size(val, key);
            else if (key == "k") cfg.bianchini_k = unsigned(parse_size(val, key));
            else if (key == "images") cfg.images_path = val;
            else if (key == "labels") cfg.labels_path = val;
            else if (key == "path") cfg.path = val;
            else if (key == "feature_cols") cfg.feature_cols = parse_size_list(val, key);
            else if (key == "target_col") cfg.target_col = parse_size(val, key);
            else if (key == "header") cfg.header = parse_bool(val, key);
            else if (key == "separator") cfg.separator = val.empty() ? ',' : val[0];
            else if (key == "max_rows") cfg.max_rows = parse_size(val, key);
            else if (key == "val_fraction") cfg.val_fraction = parse_double(val, key);
            else throw config_error("config: unknown key '" + key + "' in [data]");
        } else if (section == "network") {
            if (key == "sizes") { cfg.sizes = parse_size_list(val, key); have_sizes = true; }
            else if (key == "hidden") cfg.hidden = parse_transfer(val, key);
            else if (key == "output") cfg.output = parse_transfer(val, key);
            else if (key == "loss") {
                if (val == "cross-entropy-softmax") cfg.loss = {LossKind::CrossEntropySoftmax};
                else if (val == "cross-entropy-logistic") cfg.loss = {LossKind::CrossEntropyLogistic};
                else if (val == "squared") cfg.loss = {LossKind::SquaredError};
                else throw config_error("config: unknown loss '" + val + "'");
            }
            else if (key == "init") cfg.net_init = parse_init(val, key);
            else if (key == "init_variance") {
                cfg.net_init.rule = ScaleRule::Explicit;
                cfg.net_init.variance = parse_double(val, key);
            }
            else throw config_error("config: unknown key '" + key + "' in [network]");
        } else if (section == "channel") {
            if (key == "algorithm") {
                if (val == "bp") cfg.channel.algorithm = Algorithm::BP;
                else if (val == "rbp") cfg.channel.algorithm = Algorithm::RBP;
                else if (val == "srbp") cfg.channel.algorithm = Algorithm::SRBP;
                else throw config_error("config: unknown algorithm '" + val + "'");
            } else if (key == "architecture") {
                if (val == "conjoined") cfg.channel.architecture = Architecture::Conjoined;
                else if (val == "distinct") cfg.channel.architecture = Architecture::Distinct;
                else throw config_error("config: unknown architecture '" + val + "'");
            } else if (key == "transfer") {
                if (val == "linear") cfg.channel.transfer = ChannelTransfer::Linear;
                else if (val == "tanh") cfg.channel.transfer = ChannelTransfer::Tanh;
                else throw config_error("config: unknown channel transfer '" + val + "'");
            } else if (key == "adaptivity") {
                if (val == "fixed") cfg.channel.adaptivity = Adaptivity::Fixed;
                else if (val == "hebbian") cfg.channel.adaptivity = Adaptivity::Hebbian;
                else if (val == "stdp") cfg.channel.adaptivity = Adaptivity::Stdp;
                else throw config_error("config: unknown adaptivity '" + val + "'");
            } else if (key == "sizes") cfg.channel.channel_sizes = parse_size_list(val, key);
            else if (key == "init") cfg.channel.init = parse_init(val, key);
            else if (key == "init_variance") {
                cfg.channel.init.rule = ScaleRule::Explicit;
                cfg.channel.init.variance = parse_double(val, key);
            }
            else if (key == "lateral_init") cfg.channel.lateral_init = parse_init(val, key);
            else throw config_error("config: unknown key '" + key + "' in [channel]");
        } else {  // train
            if (key == "epochs") cfg.train.epochs = parse_size(val, key);
            else if (key == "batch") cfg.train.batch_size = parse_size(val, key);
            else if (key == "eta") cfg.train.eta = parse_double(val, key);
            else if (key == "channel_eta") cfg.train.channel_eta = parse_double(val, key);
            else if (key == "momentum") cfg.train.momentum = parse_double(val, key);
            else if (key == "lr_decay") cfg.train.lr_decay = parse_double(val, key);
            else if (key == "dropout") cfg.train.dropout_p = parse_double(val, key);
            else if (key == "channel_dropout") cfg.train.dropout_plc = parse_double(val, key);
            else if (key == "seed") cfg.train.seed = parse_size(val, key);
            else if (key == "max_iterations") cfg.train.max_iterations = parse_size(val, key);
            else if (key == "early_stop_pct") {
                if (!cfg.train.early_stop) cfg.train.early_stop = EarlyStopRule{};
                cfg.train.early_stop->threshold_pct = parse_double(val, key);
            } else if (key == "early_stop_window") {
                if (!cfg.train.early_stop) cfg.train.early_stop = EarlyStopRule{};
                cfg.train.early_stop->window = parse_size(val, key);
            }
            else throw config_error("config: unknown key '" + key + "' in [train]");
        }
    }
    if (!have_sizes) throw config_error("config: [network] sizes is required");
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("config: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string echo_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out.precision(17);
    out << "[data]\n";
    out << "kind = " << cfg.data_kind << "\n";
    out << "n = " << cfg.data_n << "\n";
    out << "seed = " << cfg.data_seed << "\n";
    if (cfg.data_kind == "bianchini") out << "k = " << cfg.bianchini_k << "\n";
    if (!cfg.images_path.empty()) out << "images = " << cfg.images_path << "\n";
    if (!cfg.labels_path.empty()) out << "labels = " << cfg.labels_path << "\n";
    if (!cfg.path.empty()) {
        out << "path = " << cfg.path << "\n";
        out << "feature_cols = " << join(cfg.feature_cols) << "\n";
        out << "target_col = " << cfg.target_col << "\n";
        out << "header = " << (cfg.header ? "true" : "false") << "\n";
        out << "separator = " << cfg.separator << "\n";
        if (cfg.max_rows) out << "max_rows = " << cfg.max_rows << "\n";
    }
    out << "val_fraction = " << cfg.val_fraction << "\n\n";

    out << "[network]\n";
    out << "sizes = " << join(cfg.sizes) << "\n";
    out << "hidden = " << transfer_name(cfg.hidden) << "\n";
    out << "output = " << transfer_name(cfg.output) << "\n";
    out << "loss = "
        << (cfg.loss.kind == LossKind::CrossEntropySoftmax    ? "cross-entropy-softmax"
            : cfg.loss.kind == LossKind::CrossEntropyLogistic ? "cross-entropy-logistic"
                                                              : "squared")
        << "\n";
    out << "init = " << init_name(cfg.net_init) << "\n";
    if (cfg.net_init.rule == ScaleRule::Explicit)
        out << "init_variance = " << cfg.net_init.variance << "\n";
    out << "\n[channel]\n";
    out << "algorithm = "
        << (cfg.channel.algorithm == Algorithm::BP    ? "bp"
            : cfg.channel.algorithm == Algorithm::RBP ? "rbp"
                                                      : "srbp")
        << "\n";
    out << "architecture = "
        << (cfg.channel.architecture == Architecture::Conjoined ? "conjoined" : "distinct") << "\n";
    out << "transfer = " << (cfg.channel.transfer == ChannelTransfer::Linear ? "linear" : "tanh")
        << "\n";
    out << "adaptivity = "
        << (cfg.channel.adaptivity == Adaptivity::Fixed     ? "fixed"
            : cfg.channel.adaptivity == Adaptivity::Hebbian ? "hebbian"
                                                            : "stdp")
        << "\n";
    if (!cfg.channel.channel_sizes.empty())
        out << "sizes = " << join(cfg.channel.channel_sizes) << "\n";
    out << "init = " << init_name(cfg.channel.init) << "\n";
    if (cfg.channel.init.rule == ScaleRule::Explicit)
        out << "init_variance = " << cfg.channel.init.variance << "\n";
    out << "lateral_init = " << init_name(cfg.channel.lateral_init) << "\n";

    out << "\n[train]\n";
    out << "epochs = " << cfg.train.epochs << "\n";
    out << "batch = " << cfg.train.batch_size << "\n";
    out << "eta = " << cfg.train.eta << "\n";
    if (cfg.train.channel_eta) out << "channel_eta = " << *cfg.train.channel_eta << "\n";
    out << "momentum = " << cfg.train.momentum << "\n";
    out << "lr_decay = " << cfg.train.lr_decay << "\n";
    out << "dropout = " << cfg.train.dropout_p << "\n";
    out << "channel_dropout = " << cfg.train.dropout_plc << "\n";
    out << "seed = " << cfg.train.seed << "\n";
    if (cfg.train.max_iterations) out << "max_iterations = " << cfg.train.max_iterations << "\n";
    if (cfg.train.early_stop) {
        out << "early_stop_pct = " << cfg.train.early_stop->threshold_pct << "\n";
        out << "early_stop_window = " << cfg.train.early_stop->window << "\n";
    }
    return out.str();
}

void load_data(const ExperimentConfig& cfg, Dataset& train, Dataset& val) {
    Dataset all;
    if (cfg.data_kind == "digits") {
        all = gen_digits({cfg.data_n, cfg.data_seed});
    } else if (cfg.data_kind == "bianchini") {
        all = gen_bianchini({cfg.bianchini_k, cfg.data_n, cfg.data_seed});
    } else if (cfg.data_kind == "idx") {
        all = load_idx(cfg.images_path, cfg.labels_path);
    } else if (cfg.data_kind == "delimited") {
        all = load_delimited(cfg.path, cfg.feature_cols, cfg.target_col, cfg.header, cfg.separator,
                             cfg.max_rows);
    } else if (cfg.data_kind == "linear") {
        LinearStatsSpec spec;
        spec.n = cfg.data_n;
        spec.seed = cfg.data_seed;
        all = gen_linear_stats(spec).data;
    } else {
        throw config_error("config: unknown data kind '" + cfg.data_kind + "'");
    }

    const std::size_t n_val = static_cast<std::size_t>(cfg.val_fraction * double(all.size()));
    const std::size_t n_train = all.size() - n_val;
    if (n_train == 0) throw config_error("config: empty training split");
    train = all.slice(0, n_train);
    val = n_val > 0 ? all.slice(n_train, n_val) : train;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                bool quiet) {
    cfg.validate();
    Dataset train_data, val_data;
    load_data(cfg, train_data, val_data);

    RngStream root(cfg.train.seed);
    RngStream net_rng = root.substream(10);
    RngStream ch_rng = root.substream(11);
    NetworkParams net = make_network(cfg.sizes, cfg.hidden, cfg.output, cfg.net_init, net_rng);
    ChannelParams channel = make_channel(cfg.channel, net, ch_rng);

    ExperimentResult result;
    result.train = train(std::move(net), std::move(channel), train_data, val_data, cfg.loss,
                         cfg.train);
    if (!result.train.metrics.empty()) {
        result.final_train_accuracy = result.train.metrics.back().train_accuracy;
        result.final_val_accuracy = result.train.metrics.back().val_accuracy;
    }

    if (!quiet) {
        for (const MetricsRecord& m : result.train.metrics)
            std::fprintf(stderr, "epoch %zu: train acc %.4f loss %.4f | val acc %.4f loss %.4f\n",
                         m.epoch, m.train_accuracy, m.train_loss, m.val_accuracy, m.val_loss);
    }

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        {
            std::ofstream cf(out_dir + "/config.ini");
            cf << echo_config(cfg);
        }
        {
            std::ofstream mf(out_dir + "/metrics.jsonl");
            for (const MetricsRecord& m : result.train.metrics) {
                nlohmann::json j{{"epoch", m.epoch},
                                 {"train_loss", m.train_loss},
                                 {"train_accuracy", m.train_accuracy},
                                 {"val_loss", m.val_loss},
                                 {"val_accuracy", m.val_accuracy},
                                 {"channel_gap", m.channel_gap},
                                 {"channel_norms", m.channel_norms}};
                mf << j.dump() << "\n";
            }
        }
        {
            nlohmann::json j{{"seed", cfg.train.seed},
                             {"epochs_run", result.train.metrics.size()},
                             {"iterations", result.train.iterations},
                             {"diverged", result.train.diverged},
                             {"stopped_early", result.train.stopped_early},
                             {"final_train_accuracy", result.final_train_accuracy},
                             {"final_val_accuracy", result.final_val_accuracy},
                             {"config", echo_config(cfg)}};
            std::ofstream sf(out_dir + "/summary.json");
            sf << j.dump(2) << "\n";
        }
    }
    return result;
}

}  // namespace lc
