#pragma once

#include "liqrec/panel.hpp"

#include <vector>

namespace liqrec::econ {

struct GivPoint {
    Date date;
    double z = 0.0;
    double g_bar = 0.0;
    std::vector<double> u;          // per shock, same order as GivDay::shocks
    std::vector<double> weights;
    double passive_u = 0.0;         // residual of each unshocked active protocol
    double passive_weight = 0.0;
};

struct GivSeries {
    std::vector<GivPoint> points;   // one per input day
};

// u = g - g_bar with g_bar the equal-weighted mean over the n_active
// protocols; Z = sum S*u including the passive block. demean = false drops g_bar.
GivSeries build_giv(const std::vector<GivDay>& days, bool demean = true);

// Builds per-day cross-sections from an event catalog: g = -loss/TVL,
// S = TVL/market_tvl, all other protocols passive.
std::vector<GivDay> giv_days_from_events(const EventCatalog& events, double market_tvl, int n_active);

// Z on every calendar day (zero where no shock).
std::vector<double> giv_on_calendar(const GivSeries& giv, const std::vector<Date>& calendar);

}  // namespace liqrec::econ
