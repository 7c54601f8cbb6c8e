#pragma once

#include "liqrec/econ/linear.hpp"
#include "liqrec/panel.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace liqrec::econ {

struct EventStudyOptions {
    std::vector<std::string> controls;   // subset of stacked.control_names; empty = none
    bool difference_outcome = false;     // y_k - y_{k-1} instead of the level
    int baseline = -1;
    // Expected window; a stack built with a different one is rejected.
    std::optional<int> window_lo, window_hi;
};

// Stacked event study with event fixed effects and event-time dummies
// d_k (k != baseline), SEs clustered by event. Coefficients are named
// "k=-5", ..., "k=3"; the joint pre-trend test is stored as "pretrend"
// (k in [window_lo, -2]).
RegressionResult event_study(const StackedPanel& stacked, const EventStudyOptions& opt = {});

// Column name for relative day k.
std::string rel_day_name(int k);

// Asset x day panel from build_did_panel: asset FE + date FE, treat x d_k
// for k != -1, clustered by event. Names "treat:k=...".
RegressionResult did_event_study(const StackedPanel& did, int baseline = -1);

struct PlaceboOptions {
    double tol_vix = -1.0;          // < 0: half the sample SD of vix
    double tol_spread = -1.0;       // < 0: half the sample SD of the outcome
    int exclusion_days = 10;        // trading days either side of any real event
    int n_draws = 500;
    int n_dates = -1;               // < 0: number of real events
    std::uint64_t seed = 0;
    int threads = 1;
    std::string vix_column = "vix";
    std::string outcome = "cp_spread_bps";
    std::vector<std::string> controls;
    int window_lo = -5;
    int window_hi = 3;
    EventStudyOptions es;
};

struct PlaceboResult {
    std::vector<int> rel_days;                  // k != baseline
    std::vector<double> actual;                 // per k
    std::vector<double> p_value;                // share of draws with beta_placebo <= beta_real
    std::vector<std::vector<double>> draws;     // [draw][k]
    std::size_t pool_size = 0;
    double mu_vix = 0.0, mu_spread = 0.0, tol_vix = 0.0, tol_spread = 0.0;
};

// Covariate-adaptive permutation test. `real` is the event study on the
// real events with the same stacking options.
PlaceboResult placebo(const RegressionResult& real, const MarketPanel& panel, const EventCatalog& events,
                      const PlaceboOptions& opt);

}  // namespace liqrec::econ
