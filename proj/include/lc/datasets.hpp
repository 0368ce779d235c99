#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lc/matrix.hpp"
#include "lc/rng.hpp"

namespace lc {

enum class TaskKind { Classification, Regression };

struct Dataset {
    Matrix features;  // n x d
    Matrix targets;   // n x c (one-hot or {0,1} for classification)
    TaskKind kind = TaskKind::Classification;

    std::size_t size() const { return features.rows(); }
    std::size_t feature_dim() const { return features.cols(); }
    std::size_t target_dim() const { return targets.cols(); }

    Dataset slice(std::size_t start, std::size_t count) const;
};

/// Parse an IDX image/label pair. Pixels are scaled to [0,1]; labels become
/// one-hot over 10 classes. Throws config_error on bad magic, truncation, or
/// an image/label count mismatch.
Dataset load_idx(const std::string& images_path, const std::string& labels_path);

/// Write a dataset back out as an IDX pair (inverse of load_idx for 28x28
/// images); used for round-trip checks and for exporting generated corpora.
void write_idx(const Dataset& data, const std::string& images_path, const std::string& labels_path,
               std::size_t img_rows = 28, std::size_t img_cols = 28);

struct BianchiniSpec {
    unsigned k = 0;  // recursion depth, <= 6
    std::size_t n_samples = 1000;
    std::uint64_t seed = 0;
};

/// Label for a single point of the recursive planar family: 1 where
/// 1 - ||t_k(x)||^2 > 0, else 0 (t_0 = identity, t(x) = [1-2x1^2, 1-2x2^2]).
int bianchini_label(unsigned k, double x1, double x2);

/// Uniform samples on [-1,1]^2 with binary targets.
Dataset gen_bianchini(const BianchiniSpec& spec);

/// Delimited-text ingestion (CSV by default). Binary targets are used as-is
/// and must be in {0,1}. max_rows = 0 means all rows. Parse failures report
/// the 1-based line number.
Dataset load_delimited(const std::string& path, const std::vector<std::size_t>& feature_cols,
                       std::size_t target_col, bool has_header, char separator = ',',
                       std::size_t max_rows = 0);

void write_delimited(const Dataset& data, const std::string& path, char separator = ',');

enum class InputDist { Constant, Uniform, Normal };

struct LinearStatsSpec {
    std::size_t n = 1000;
    std::size_t input_dim = 1;
    std::size_t target_dim = 1;
    InputDist dist = InputDist::Normal;
    double const_value = 1.0;  // Constant dist
    double spread = 1.0;       // half-width (Uniform) or sd (Normal)
    Matrix target_map;         // target_dim x input_dim; T = M I (+ noise)
    double noise_sd = 0.0;
    std::uint64_t seed = 0;
};

struct LinearStats {
    Dataset data;    // regression pairs
    double alpha;    // E(IT), scalar case
    double beta;     // E(I^2), scalar case
    Matrix sigma_ii; // E(I I^t)
    Matrix sigma_ti; // E(T I^t)
    bool degenerate; // beta == 0 (or singular sigma_ii diagonal)
};

/// Generate linear-target data and its empirical second moments so that ODE
/// predictions and SGD runs share identical statistics.
LinearStats gen_linear_stats(const LinearStatsSpec& spec);

struct DigitsSpec {
    std::size_t n = 5000;
    std::uint64_t seed = 0;
};

/// Procedurally rendered 28x28 handwritten-style digits (stroke glyphs with
/// random affine jitter and pixel noise), one-hot labels over 10 classes.
/// A stand-in corpus with the exact shape of the IDX digit files.
Dataset gen_digits(const DigitsSpec& spec);

}  // namespace lc
