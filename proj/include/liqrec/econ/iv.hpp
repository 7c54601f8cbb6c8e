#pragma once

#include "liqrec/econ/linear.hpp"
#include "liqrec/panel.hpp"

#include <string>
#include <vector>

namespace liqrec::econ {

// OLS residuals of y on [1, factors]. factors is n x k (k may be 0).
Eigen::VectorXd residualize(const Eigen::VectorXd& y, const Eigen::MatrixXd& factors);

struct TslsOptions {
    std::string outcome = "cp_spread_bps";
    std::string flow = "net_redemption_usd";
    std::string instrument = "giv_z";
    std::string event_day = "hack_day";
    std::vector<std::string> factors{"vix", "dxy", "ted"};     // residualization of the outcome
    std::vector<std::string> first_stage_controls;                   // lagged like the instrument
    int instrument_lag = 1;
    bool event_day_control = true;    // lagged event-day dummy in the first stage
    double winsor_pct = 1.0;          // instrument clipped at [p, 100-p]; 0 disables
    int nw_lag = 1;                   // first-stage HAC bandwidth
    int window_lo = -5;               // stage-2 window; Post = k >= 0
    int window_hi = 3;
    double weak_f = 10.0;
};

struct TslsResult {
    RegressionResult first;
    RegressionResult second;
    double first_stage_f = 0.0;
    bool weak = false;
    double multiplier = 0.0;          // bps per $100M
    double multiplier_se = 0.0;
    std::vector<double> hat_flow;     // window-summed fitted flow per event (USD)
    std::vector<std::string> warnings;
};

// First stage: flow_t on Z_{t-lag} (+ event-day dummy and controls at t-lag),
// all days, Newey-West. Second stage: stacked windows of the residualized
// outcome on Post and Post x hat_flow_e with event FE, clustered by event.
TslsResult tsls(const MarketPanel& panel, const EventCatalog& events, const TslsOptions& opt = {});

}  // namespace liqrec::econ
