#pragma once

#include "lc/matrix.hpp"
#include "lc/rng.hpp"

namespace lc {

enum class InitKind { ScaledNormal, ScaledUniform, Zero, Constant };

enum class ScaleRule {
    FanSum2,   // variance 2/(fanin+fanout)
    FanSum1,   // variance 1/(fanin+fanout)
    Explicit,  // variance given directly
};

struct Initializer {
    InitKind kind = InitKind::ScaledNormal;
    ScaleRule rule = ScaleRule::FanSum2;
    double variance = 0.0;  // used when rule == Explicit
    double value = 0.0;     // used when kind == Constant

    static Initializer zero() { return {InitKind::Zero}; }
    static Initializer constant(double v) { return {InitKind::Constant, ScaleRule::Explicit, 0.0, v}; }
    static Initializer scaled_normal(ScaleRule rule = ScaleRule::FanSum2) {
        return {InitKind::ScaledNormal, rule};
    }
    static Initializer scaled_uniform(ScaleRule rule = ScaleRule::FanSum2) {
        return {InitKind::ScaledUniform, rule};
    }
    static Initializer normal_with_variance(double var) {
        return {InitKind::ScaledNormal, ScaleRule::Explicit, var};
    }
};

/// Draw a rows x cols matrix. Fan-in is cols, fan-out is rows (weight
/// matrices map layer h-1 activity to layer h).
Matrix sample(const Initializer& init, std::size_t rows, std::size_t cols, RngStream& rng);

}  // namespace lc
