#pragma once

#include "liqrec/panel.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace liqrec::econ {

struct ThresholdOptions {
    std::string threshold_var = "gas_gwei";   // stacked attribute
    int post_from = 0;                         // Post = 1 for rel_day >= post_from
    std::vector<std::string> controls;         // stacked controls
    double trim = 0.15;                        // minimum share of rows per regime
    int n_bootstrap = 1000;
    double lr_critical = 7.35;                 // asymptotic 95% cutoff
    std::uint64_t seed = 0;
    int threads = 1;
};

struct ThresholdResult {
    double gamma_hat = 0.0;
    // Set of real gamma values whose LR statistic is below the cutoff. Within
    // [q_j, q_{j+1}) the sample split is constant, so the upper end is the
    // next distinct threshold value after the last accepted candidate.
    std::pair<double, double> ci_95;
    double bootstrap_p = 1.0;
    double f_stat = 0.0;               // (SSR0 - SSR1) / sigma1^2
    double beta1 = 0.0, se_beta1 = 0.0;   // Post x 1[q <= gamma]
    double beta2 = 0.0, se_beta2 = 0.0;   // Post x 1[q > gamma]
    std::vector<double> grid;
    std::vector<double> ssr;           // per grid point
    std::vector<double> lr;            // per grid point
    int n_obs = 0;
    int n_bootstrap = 0;
    std::vector<std::string> warnings;
};

// y = a_event + b1 Post 1[q<=g] + b2 Post 1[q>g] + controls, event FE,
// g chosen by least squares over distinct values of q; regime SEs are
// clustered by event at gamma_hat. Bootstrap p for the linear null
// resamples whole-event residual blocks.
ThresholdResult threshold_regression(const StackedPanel& stacked, const ThresholdOptions& opt = {});

}  // namespace liqrec::econ
