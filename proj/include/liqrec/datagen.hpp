#pragma once

#include "liqrec/date.hpp"
#include "liqrec/panel.hpp"
#include "liqrec/structmodel.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace liqrec {

struct LossDistribution {
    double log_mean = 16.98;
    double log_sd = 1.97;
};

// Static DeFi universe: n protocols with Zipf(exponent) TVL shares.
struct ProtocolUniverse {
    int n_protocols = 100;
    double zipf_exponent = 2.0;
    double market_tvl_usd = 100e9;

    std::vector<double> shares() const;
    std::string name(int i) const;
    std::string chain(int i) const;
};

struct EventGenOptions {
    int min_spacing = 10;          // trading days between events; 0 allows same-day events
    int edge_margin = 10;          // keep events this far from the calendar ends
    std::vector<Date> blackout;    // days that never host an event
    ProtocolUniverse universe;
    double max_loss_to_tvl = 0.9;
};

std::vector<double> draw_losses(int n, const LossDistribution& dist, std::mt19937_64& rng);

EventCatalog gen_events(int n_events, const LossDistribution& dist, std::uint64_t seed, const Calendar& calendar,
                        const EventGenOptions& opt = {});

struct Ar1 {
    double mean = 0.0;
    double sd = 1.0;       // stationary SD
    double phi = 0.0;
};

struct MarketConfig {
    Ar1 vix{19.44, 5.28, 0.98};
    Ar1 dxy{101.04, 5.80, 0.995};
    Ar1 ted{0.25, 0.10, 0.95};
    double btc_mean = 0.0018;
    double btc_sd = 0.0394;
    double vix_loading = 0.3;      // bps of spread per VIX point above its mean
    NoiseConfig noise;
    ProtocolUniverse universe;
};

// Known-truth values written next to synthetic panels.
struct GroundTruth {
    std::map<std::string, double> values;
    std::string to_text() const;
    static GroundTruth parse(const std::string& text);
    double at(const std::string& key) const;
};

struct SyntheticMarket {
    MarketPanel panel;
    EventCatalog events;            // gas_gwei filled with the structural friction
    std::vector<GivDay> giv_days;
    GroundTruth truth;
    SimulatedPath path;
};

SyntheticMarket gen_market(const MarketConfig& config, const Calendar& calendar, const EventCatalog& events,
                           const StructuralParams& params, std::uint64_t seed);

struct StackOptions {
    int window_lo = -5;
    int window_hi = 3;
    std::string outcome = "cp_spread_bps";
    std::vector<std::string> controls;
};

StackedPanel build_stacked_panel(const MarketPanel& panel, const EventCatalog& events, const StackOptions& opt);

struct MonthlyOptions {
    bool event_window_days_only = true;
    std::vector<std::string> controls;
};

// prime_share maps month_index -> share.
MonthlyPanel aggregate_monthly(const StackedPanel& stacked, const MarketPanel& panel,
                               const std::map<int, double>& prime_share, const std::vector<Date>& hack_dates,
                               const MonthlyOptions& opt = {});

struct DidOptions {
    std::vector<std::string> assets;   // panel columns (rates or spreads)
    std::string treat_asset = "aa_nonfin";
    std::string tbill;                 // when set, assets are rates and spread = (rate - tbill)*100
    int window_lo = -5;
    int window_hi = 5;
};

StackedPanel build_did_panel(const MarketPanel& panel, const EventCatalog& events, const DidOptions& opt);

// Reduced-form scenario generators for the estimator recovery studies.
struct ThresholdScenario {
    int n_events = 50;
    int window_lo = -5;
    int window_hi = 5;
    double gamma = 32.93;
    double beta1 = -2.406;
    double beta2 = 2.212;
    bool linear_null = false;       // beta1 applies to every event
    double noise_sd = 1.0;
    double gas_log_mean = 3.45;     // median ~31.5 Gwei
    double gas_log_sd = 0.45;
};
StackedPanel gen_threshold_scenario(const ThresholdScenario& s, std::uint64_t seed);

struct DidScenario {
    int n_events = 50;
    double effect = -5.0;           // treated-only, k >= 1
    double noise_sd = 1.0;
    double common_shock_sd = 2.0;
    std::string treat = "aa_nonfin";
    std::string control = "a2p2";
};
struct DidData {
    MarketPanel panel;              // rate columns plus tbill
    EventCatalog events;
};
DidData gen_did_scenario(const DidScenario& s, std::uint64_t seed);

struct MonthlyScenario {
    int n_months = 48;
    double hack_prob = 0.5;
    double hack_effect = -1.0;
    double pcs_effect = 0.5;
    double interaction = -1.5;      // theta
    double noise_sd = 1.0;
};
MonthlyPanel gen_monthly_scenario(const MonthlyScenario& s, std::uint64_t seed);

struct GbrScenario {
    int n = 200;
    double step_at = 36.0;
    double step = 1.0;
    double vix_slope = 0.02;
    double loss_slope = 0.02;
    double noise_sd = 0.25;
};
struct GbrData {
    std::vector<std::string> names{"gas", "vix", "log_loss"};
    std::vector<std::vector<double>> features;   // column-major: one vector per feature
    std::vector<double> target;
};
GbrData gen_gbr_scenario(const GbrScenario& s, std::uint64_t seed);

}  // namespace liqrec
