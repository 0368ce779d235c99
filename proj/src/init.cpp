#include "lc/init.hpp"

#include <cmath>

namespace lc {

Matrix sample(const Initializer& init, std::size_t rows, std::size_t cols, RngStream& rng) {
    if (rows < 1 || cols < 1) throw config_error("sample: rows and cols must be >= 1");
    Matrix m(rows, cols);
    switch (init.kind) {
        case InitKind::Zero:
            return m;
        case InitKind::Constant:
            for (double& v : m.values()) v = init.value;
            return m;
        case InitKind::ScaledNormal: {
            const double var = init.rule == ScaleRule::Explicit ? init.variance
                               : init.rule == ScaleRule::FanSum1
                                   ? 1.0 / static_cast<double>(rows + cols)
                                   : 2.0 / static_cast<double>(rows + cols);
            const double sd = std::sqrt(var);
            for (double& v : m.values()) v = rng.normal(0.0, sd);
            return m;
        }
        case InitKind::ScaledUniform: {
            const double var = init.rule == ScaleRule::Explicit ? init.variance
                               : init.rule == ScaleRule::FanSum1
                                   ? 1.0 / static_cast<double>(rows + cols)
                                   : 2.0 / static_cast<double>(rows + cols);
            // uniform on [-b, b] has variance b^2/3
            const double b = std::sqrt(3.0 * var);
            for (double& v : m.values()) v = rng.uniform(-b, b);
            return m;
        }
    }
    throw config_error("sample: unknown initializer kind");
}

}  // namespace lc
