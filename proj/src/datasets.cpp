#include "lc/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace lc {

Dataset Dataset::slice(std::size_t start, std::size_t count) const {
    if (start + count > size()) throw config_error("slice: range out of bounds");
    Dataset out;
    out.kind = kind;
    out.features = Matrix(count, feature_dim());
    out.targets = Matrix(count, target_dim());
    for (std::size_t i = 0; i < count; ++i) {
        std::copy(features.row(start + i), features.row(start + i) + feature_dim(),
                  out.features.row(i));
        std::copy(targets.row(start + i), targets.row(start + i) + target_dim(),
                  out.targets.row(i));
    }
    return out;
}

namespace {

std::uint32_t read_u32_be(std::istream& in, const std::string& path) {
    unsigned char b[4];
    if (!in.read(reinterpret_cast<char*>(b), 4))
        throw config_error("idx: truncated header in " + path);
    return (std::uint32_t(b[0]) << 24) | (std::uint32_t(b[1]) << 16) |
           (std::uint32_t(b[2]) << 8) | std::uint32_t(b[3]);
}

void write_u32_be(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
    out.write(reinterpret_cast<char*>(b), 4);
}

}  // namespace

Dataset load_idx(const std::string& images_path, const std::string& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw config_error("idx: cannot open " + images_path);
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw config_error("idx: cannot open " + labels_path);

    const std::uint32_t img_magic = read_u32_be(img, images_path);
    if (img_magic != 0x803)
        throw config_error("idx: bad image magic in " + images_path);
    const std::uint32_t n_img = read_u32_be(img, images_path);
    const std::uint32_t rows = read_u32_be(img, images_path);
    const std::uint32_t cols = read_u32_be(img, images_path);

    const std::uint32_t lab_magic = read_u32_be(lab, labels_path);
    if (lab_magic != 0x801)
        throw config_error("idx: bad label magic in " + labels_path);
    const std::uint32_t n_lab = read_u32_be(lab, labels_path);
    if (n_img != n_lab)
        throw config_error("idx: image count " + std::to_string(n_img) + " != label count " +
                           std::to_string(n_lab));

    const std::size_t d = std::size_t(rows) * cols;
    Dataset out;
    out.kind = TaskKind::Classification;
    out.features = Matrix(n_img, d);
    out.targets = Matrix(n_img, 10);

    std::vector<unsigned char> buf(d);
    for (std::uint32_t i = 0; i < n_img; ++i) {
        if (!img.read(reinterpret_cast<char*>(buf.data()), std::streamsize(d)))
            throw config_error("idx: truncated image data in " + images_path);
        double* r = out.features.row(i);
        for (std::size_t j = 0; j < d; ++j) r[j] = buf[j] / 255.0;
        unsigned char y;
        if (!lab.read(reinterpret_cast<char*>(&y), 1))
            throw config_error("idx: truncated label data in " + labels_path);
        if (y > 9) throw config_error("idx: label out of range in " + labels_path);
        out.targets(i, y) = 1.0;
    }
    return out;
}

void write_idx(const Dataset& data, const std::string& images_path, const std::string& labels_path,
               std::size_t img_rows, std::size_t img_cols) {
    if (data.feature_dim() != img_rows * img_cols)
        throw config_error("idx: feature width != rows*cols");
    if (data.target_dim() != 10) throw config_error("idx: expected one-hot 10-class targets");
    std::ofstream img(images_path, std::ios::binary);
    if (!img) throw config_error("idx: cannot write " + images_path);
    std::ofstream lab(labels_path, std::ios::binary);
    if (!lab) throw config_error("idx: cannot write " + labels_path);

    write_u32_be(img, 0x803);
    write_u32_be(img, std::uint32_t(data.size()));
    write_u32_be(img, std::uint32_t(img_rows));
    write_u32_be(img, std::uint32_t(img_cols));
    write_u32_be(lab, 0x801);
    write_u32_be(lab, std::uint32_t(data.size()));

    const std::size_t d = data.feature_dim();
    std::vector<unsigned char> buf(d);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double* r = data.features.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double v = std::clamp(r[j], 0.0, 1.0);
            buf[j] = static_cast<unsigned char>(std::lround(v * 255.0));
        }
        img.write(reinterpret_cast<char*>(buf.data()), std::streamsize(d));
        std::size_t y = 0;
        for (std::size_t j = 1; j < 10; ++j)
            if (data.targets(i, j) > data.targets(i, y)) y = j;
        const unsigned char yb = static_cast<unsigned char>(y);
        lab.write(reinterpret_cast<const char*>(&yb), 1);
    }
}

int bianchini_label(unsigned k, double x1, double x2) {
    if (k > 6) throw config_error("bianchini: k must be <= 6");
    double u = x1, v = x2;
    for (unsigned i = 0; i < k; ++i) {
        const double nu = 1.0 - 2.0 * u * u;
        const double nv = 1.0 - 2.0 * v * v;
        u = nu;
        v = nv;
    }
    return (1.0 - (u * u + v * v)) > 0.0 ? 1 : 0;
}

Dataset gen_bianchini(const BianchiniSpec& spec) {
    if (spec.k > 6) throw config_error("bianchini: k must be <= 6");
    RngStream rng(spec.seed);
    Dataset out;
    out.kind = TaskKind::Classification;
    out.features = Matrix(spec.n_samples, 2);
    out.targets = Matrix(spec.n_samples, 1);
    for (std::size_t i = 0; i < spec.n_samples; ++i) {
        const double x1 = 2.0 * rng.uniform() - 1.0;
        const double x2 = 2.0 * rng.uniform() - 1.0;
        out.features(i, 0) = x1;
        out.features(i, 1) = x2;
        out.targets(i, 0) = bianchini_label(spec.k, x1, x2);
    }
    return out;
}

Dataset load_delimited(const std::string& path, const std::vector<std::size_t>& feature_cols,
                       std::size_t target_col, bool has_header, char separator,
                       std::size_t max_rows) {
    if (feature_cols.empty()) throw config_error("delimited: no feature columns given");
    std::ifstream in(path);
    if (!in) throw config_error("delimited: cannot open " + path);

    std::vector<std::vector<double>> feats;
    std::vector<double> targs;
    std::string line;
    std::size_t lineno = 0;
    bool binary_targets = true;

    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 1 && has_header) continue;
        if (line.empty()) continue;
        if (max_rows && targs.size() >= max_rows) break;

        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, separator)) cells.push_back(cell);

        auto parse = [&](std::size_t col) {
            if (col >= cells.size())
                throw config_error("delimited: line " + std::to_string(lineno) +
                                   ": missing column " + std::to_string(col));
            try {
                std::size_t pos = 0;
                const double v = std::stod(cells[col], &pos);
                while (pos < cells[col].size() && std::isspace(unsigned(cells[col][pos]))) ++pos;
                if (pos != cells[col].size()) throw std::invalid_argument("trailing junk");
                return v;
            } catch (const std::exception&) {
                throw config_error("delimited: line " + std::to_string(lineno) +
                                   ": cannot parse '" + cells[col] + "'");
            }
        };

        std::vector<double> row;
        row.reserve(feature_cols.size());
        for (std::size_t col : feature_cols) row.push_back(parse(col));
        const double t = parse(target_col);
        if (t != 0.0 && t != 1.0) binary_targets = false;
        feats.push_back(std::move(row));
        targs.push_back(t);
    }
    if (feats.empty()) throw config_error("delimited: no data rows in " + path);

    Dataset out;
    out.kind = binary_targets ? TaskKind::Classification : TaskKind::Regression;
    out.features = Matrix(feats.size(), feature_cols.size());
    out.targets = Matrix(feats.size(), 1);
    for (std::size_t i = 0; i < feats.size(); ++i) {
        std::copy(feats[i].begin(), feats[i].end(), out.features.row(i));
        out.targets(i, 0) = targs[i];
    }
    return out;
}

void write_delimited(const Dataset& data, const std::string& path, char separator) {
    std::ofstream out(path);
    if (!out) throw config_error("delimited: cannot write " + path);
    out.precision(17);
    for (std::size_t i = 0; i < data.size(); ++i) {
        for (std::size_t j = 0; j < data.feature_dim(); ++j) {
            if (j) out << separator;
            out << data.features(i, j);
        }
        for (std::size_t j = 0; j < data.target_dim(); ++j)
            out << separator << data.targets(i, j);
        out << '\n';
    }
}

LinearStats gen_linear_stats(const LinearStatsSpec& spec) {
    if (spec.n == 0) throw config_error("linear_stats: n must be >= 1");
    Matrix map = spec.target_map;
    if (map.empty()) {
        map = Matrix(spec.target_dim, spec.input_dim);
        for (std::size_t i = 0; i < std::min(spec.target_dim, spec.input_dim); ++i) map(i, i) = 1.0;
    }
    if (map.rows() != spec.target_dim || map.cols() != spec.input_dim)
        throw config_error("linear_stats: target_map shape mismatch");

    RngStream rng(spec.seed);
    LinearStats out;
    out.data.kind = TaskKind::Regression;
    out.data.features = Matrix(spec.n, spec.input_dim);
    out.data.targets = Matrix(spec.n, spec.target_dim);

    for (std::size_t i = 0; i < spec.n; ++i) {
        for (std::size_t j = 0; j < spec.input_dim; ++j) {
            double v = spec.const_value;
            if (spec.dist == InputDist::Uniform)
                v = spec.spread * (2.0 * rng.uniform() - 1.0);
            else if (spec.dist == InputDist::Normal)
                v = spec.spread * rng.normal();
            out.data.features(i, j) = v;
        }
        for (std::size_t r = 0; r < spec.target_dim; ++r) {
            double t = 0.0;
            for (std::size_t j = 0; j < spec.input_dim; ++j)
                t += map(r, j) * out.data.features(i, j);
            if (spec.noise_sd > 0.0) t += spec.noise_sd * rng.normal();
            out.data.targets(i, r) = t;
        }
    }

    // empirical second moments over the sample actually generated
    const double inv_n = 1.0 / static_cast<double>(spec.n);
    out.sigma_ii = matmul_tn(out.data.features, out.data.features) * inv_n;
    out.sigma_ti = matmul_tn(out.data.targets, out.data.features) * inv_n;
    out.alpha = out.sigma_ti(0, 0);
    out.beta = out.sigma_ii(0, 0);
    out.degenerate = false;
    for (std::size_t j = 0; j < spec.input_dim; ++j)
        if (out.sigma_ii(j, j) == 0.0) out.degenerate = true;
    return out;
}

namespace {

struct Seg {
    double x0, y0, x1, y1;
};

// seven-segment layout in a 28x28 frame (x right, y down)
//      A
//    F   B
//      G
//    E   C
//      D
const Seg kSegs[7] = {
    {9, 6, 19, 6},    // A
    {19, 6, 19, 14},  // B
    {19, 14, 19, 22}, // C
    {9, 22, 19, 22},  // D
    {9, 14, 9, 22},   // E
    {9, 6, 9, 14},    // F
    {9, 14, 19, 14},  // G
};

const int kDigitSegs[10][7] = {
    {1, 1, 1, 1, 1, 1, 0},  // 0
    {0, 1, 1, 0, 0, 0, 0},  // 1
    {1, 1, 0, 1, 1, 0, 1},  // 2
    {1, 1, 1, 1, 0, 0, 1},  // 3
    {0, 1, 1, 0, 0, 1, 1},  // 4
    {1, 0, 1, 1, 0, 1, 1},  // 5
    {1, 0, 1, 1, 1, 1, 1},  // 6
    {1, 1, 1, 0, 0, 0, 0},  // 7
    {1, 1, 1, 1, 1, 1, 1},  // 8
    {1, 1, 1, 1, 0, 1, 1},  // 9
};

double point_segment_dist(double px, double py, const Seg& s) {
    const double dx = s.x1 - s.x0, dy = s.y1 - s.y0;
    const double len2 = dx * dx + dy * dy;
    double t = len2 > 0.0 ? ((px - s.x0) * dx + (py - s.y0) * dy) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double cx = s.x0 + t * dx, cy = s.y0 + t * dy;
    return std::hypot(px - cx, py - cy);
}

}  // namespace

Dataset gen_digits(const DigitsSpec& spec) {
    RngStream rng(spec.seed);
    Dataset out;
    out.kind = TaskKind::Classification;
    out.features = Matrix(spec.n, 28 * 28);
    out.targets = Matrix(spec.n, 10);

    for (std::size_t i = 0; i < spec.n; ++i) {
        const std::size_t digit = rng.index(10);
        out.targets(i, digit) = 1.0;

        // random affine jitter: rotation, anisotropic scale, shear, translation
        const double theta = 0.30 * (2.0 * rng.uniform() - 1.0);
        const double sx = 0.72 + 0.55 * rng.uniform();
        const double sy = 0.72 + 0.55 * rng.uniform();
        const double shear = 0.20 * (2.0 * rng.uniform() - 1.0);
        const double tx = 3.0 * (2.0 * rng.uniform() - 1.0);
        const double ty = 3.0 * (2.0 * rng.uniform() - 1.0);
        const double ct = std::cos(theta), st = std::sin(theta);
        const double thickness = 0.7 + 0.7 * rng.uniform();

        std::vector<Seg> segs;
        for (int s = 0; s < 7; ++s) {
            if (!kDigitSegs[digit][s]) continue;
            Seg g = kSegs[s];
            auto warp = [&](double& x, double& y) {
                const double cx = x - 14.0, cy = y - 14.0;
                const double wx = sx * (cx + shear * cy), wy = sy * cy;
                x = ct * wx - st * wy + 14.0 + tx;
                y = st * wx + ct * wy + 14.0 + ty;
            };
            warp(g.x0, g.y0);
            warp(g.x1, g.y1);
            // per-stroke endpoint wobble: handwriting-like style variation
            // plus a small genuine class overlap
            g.x0 += 0.4 * (2.0 * rng.uniform() - 1.0);
            g.y0 += 0.4 * (2.0 * rng.uniform() - 1.0);
            g.x1 += 0.4 * (2.0 * rng.uniform() - 1.0);
            g.y1 += 0.4 * (2.0 * rng.uniform() - 1.0);
            segs.push_back(g);
        }

        double* px = out.features.row(i);
        for (int y = 0; y < 28; ++y) {
            for (int x = 0; x < 28; ++x) {
                double d = 1e9;
                for (const Seg& g : segs) d = std::min(d, point_segment_dist(x + 0.5, y + 0.5, g));
                double v = std::clamp(1.0 - (d - thickness) / 1.1, 0.0, 1.0);
                v += 0.04 * rng.normal();
                px[y * 28 + x] = std::clamp(v, 0.0, 1.0);
            }
        }
    }
    return out;
}

}  // namespace lc
