#pragma once

#include "liqrec/econ/linear.hpp"

#include <string>
#include <vector>

namespace liqrec::econ {

struct LpOptions {
    int horizons = 10;                         // h = 0..horizons
    int outcome_lags = 0;                      // lags of the first difference of y
    std::vector<std::string> control_names;    // controls enter at t-1
};

// y_{t+h} - y_{t-1} = a + b_h shock_t + controls + e, Newey-West lag h+1.
// The shock coefficient is named "shock".
std::vector<RegressionResult> local_projections(const std::vector<double>& y, const std::vector<double>& shock,
                                                const std::vector<std::vector<double>>& controls,
                                                const LpOptions& opt = {});

}  // namespace liqrec::econ
