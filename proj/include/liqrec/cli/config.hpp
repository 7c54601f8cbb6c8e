#pragma once

#include "liqrec/ambiguity.hpp"
#include "liqrec/datagen.hpp"
#include "liqrec/globalgame.hpp"
#include "liqrec/structmodel.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace liqrec::cli {

struct Paths {
    std::string panel;         // empty: <out>/panel.csv
    std::string events;        // empty: <out>/events.csv
    std::string prime_share;   // empty: <out>/prime_share.csv
    std::string holidays;
    std::string blackout;
    std::string out = "out";
};

struct SimulateBlock {
    Date start{2021, 1, 4};
    Date end{2024, 12, 31};
    int n_events = 50;
    LossDistribution loss;
    EventGenOptions events;     // blackout filled from paths.blackout
    MarketConfig market;
    bool did_assets = true;     // tbill / aa_nonfin / a2p2 rate columns
    bool prime_share = true;    // monthly prime CP share file
};

struct EventStudyBlock {
    int window_lo = -5, window_hi = 3;
    std::string outcome = "cp_spread_bps";
    std::vector<std::string> controls{"vix", "dxy", "btc_return"};
    bool difference_outcome = false;
};

struct ThresholdBlock {
    int window_lo = -5, window_hi = 3;
    std::string threshold_var = "gas_gwei";
    std::vector<std::string> controls;
    double trim = 0.15;
    int bootstrap = 1000;
};

struct GivBlock {
    int instrument_lag = 1;
    double winsor_pct = 1.0;
    int nw_lag = 1;
    bool event_day_control = true;
    std::vector<std::string> factors{"vix", "dxy", "ted"};
    int window_lo = -5, window_hi = 3;
    double weak_f = 10.0;
    double market_tvl_usd = 100e9;   // used when the panel has no giv_z column
    int n_active = 100;
};

struct LpBlock {
    int horizons = 10;
    int outcome_lags = 2;
    std::string shock = "binary";     // binary | log_loss
    std::string outcome = "cp_spread_bps";
    std::vector<std::string> controls{"vix", "dxy", "btc_return"};
};

struct DidBlock {
    std::vector<std::string> assets{"aa_nonfin", "a2p2"};
    std::string treat = "aa_nonfin";
    std::string tbill = "tbill";
    int window_lo = -5, window_hi = 5;
};

struct MonthlyBlock {
    std::string spec = "level";       // level | change
    std::vector<std::string> controls{"vix", "dxy"};
    bool event_window_days_only = true;
};

struct PlaceboBlock {
    int n_draws = 500;
    int n_dates = -1;
    int exclusion_days = 10;
    double tol_vix = -1.0;
    double tol_spread = -1.0;
};

struct CalibrateBlock {
    double beta = -2.73;
    double se = 0.88;
    std::vector<double> lambda_grid{0.5, 0.75, 1.0, 1.25, 1.5, 2.0};
    Preferences preferences;
    JumpAsset asset;
    std::vector<double> psi_grid{0.5, 1.0, 1.5, 2.0, 3.0, 5.0};
    std::vector<double> loss_grid{0.1, 0.3, 0.5, 0.7, 0.9};
    GameParams game;
    std::vector<double> a_grid{1.0, 1.5, 2.0, 3.0};
    GasMap gas_map;
};

struct RunConfig {
    std::uint64_t seed = 1;
    int threads = 1;
    Paths paths;
    StructuralParams structural;
    SimulateBlock simulate;
    EventStudyBlock event_study;
    ThresholdBlock threshold;
    GivBlock giv;
    LpBlock lp;
    DidBlock did;
    MonthlyBlock monthly;
    PlaceboBlock placebo;
    CalibrateBlock calibrate;

    std::string panel_path() const;
    std::string events_path() const;
    std::string prime_share_path() const;
};

// Parses JSON text; unknown keys and wrong types raise ConfigError. Relative
// paths are resolved against base_dir.
RunConfig parse_config(const std::string& json_text, const std::string& base_dir = ".");
RunConfig load_config(const std::string& path);

// LIQREC_SEED, LIQREC_OUT, LIQREC_PANEL, LIQREC_EVENTS, LIQREC_PRIME_SHARE.
void apply_env_overrides(RunConfig& cfg);

// Domain checks on every block; throws ConfigError.
void validate(const RunConfig& cfg);

}  // namespace liqrec::cli
