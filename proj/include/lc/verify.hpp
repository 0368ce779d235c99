#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "lc/datasets.hpp"
#include "lc/ode.hpp"

namespace lc {

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// Run the acceptance battery, printing one "PASS/FAIL <id> <name>" line per
/// criterion to out. An empty `only` runs everything.
std::vector<CriterionResult> run_acceptance(std::ostream& out, const std::vector<int>& only = {});

/// Full-batch discrete training on the generated linear data versus the RK4
/// trajectory of the matching averaged system, compared at time t (steps =
/// t/eta). Returns the sup-norm gap over (a1, a2, c1).
double sgd_vs_ode(const LinearStats& stats, const std::vector<double>& y0, double eta, double t);

}  // namespace lc
