#include "liqrec/econ/giv.hpp"

#include "liqrec/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace liqrec::econ {

GivSeries build_giv(const std::vector<GivDay>& days, bool demean) {
    GivSeries out;
    out.points.reserve(days.size());
    for (const auto& d : days) {
        if (d.n_active < static_cast<int>(d.shocks.size()) || d.n_active < 1)
            throw DataError("GIV on " + d.date.iso() + ": n_active smaller than the number of shocked protocols");
        double wsum = d.passive_weight;
        double gsum = 0.0;
        for (const auto& s : d.shocks) {
            if (!std::isfinite(s.g)) throw DataError("GIV on " + d.date.iso() + ": missing TVL for " + s.protocol);
            if (!(s.weight >= 0.0 && s.weight <= 1.0))
                throw DataError("GIV on " + d.date.iso() + ": weight outside [0,1] for " + s.protocol);
            wsum += s.weight;
            gsum += s.g;
        }
        if (d.passive_weight < 0.0 || wsum > 1.0 + 1e-9)
            throw DataError("GIV on " + d.date.iso() + ": weights sum above one");
        GivPoint p;
        p.date = d.date;
        p.g_bar = demean ? gsum / d.n_active : 0.0;
        p.passive_u = -p.g_bar;
        p.passive_weight = d.passive_weight;
        for (const auto& s : d.shocks) {
            p.u.push_back(s.g - p.g_bar);
            p.weights.push_back(s.weight);
            p.z += s.weight * p.u.back();
        }
        p.z += p.passive_weight * p.passive_u;
        out.points.push_back(std::move(p));
    }
    return out;
}

std::vector<GivDay> giv_days_from_events(const EventCatalog& events, double market_tvl, int n_active) {
    if (!(market_tvl > 0.0)) throw DomainError("GIV: market TVL must be positive");
    std::map<Date, GivDay> by_day;
    for (const auto& e : events.events) {
        if (!(e.tvl_usd > 0.0)) throw DataError("GIV: event on " + e.date.iso() + " lacks TVL");
        auto& d = by_day[e.date];
        d.date = e.date;
        d.shocks.push_back({e.protocol, -e.loss_usd / e.tvl_usd, e.tvl_usd / market_tvl});
    }
    std::vector<GivDay> out;
    for (auto& [date, d] : by_day) {
        double w = 0.0;
        for (const auto& s : d.shocks) w += s.weight;
        if (w > 1.0 + 1e-9) throw DataError("GIV on " + date.iso() + ": shocked TVL exceeds market TVL");
        d.n_active = std::max(n_active, static_cast<int>(d.shocks.size()));
        d.passive_weight = std::max(0.0, 1.0 - w);
        out.push_back(std::move(d));
    }
    return out;
}

std::vector<double> giv_on_calendar(const GivSeries& giv, const std::vector<Date>& calendar) {
    std::vector<double> z(calendar.size(), 0.0);
    for (const auto& p : giv.points) {
        auto it = std::lower_bound(calendar.begin(), calendar.end(), p.date);
        if (it == calendar.end() || *it != p.date)
            throw AlignmentError("GIV date " + p.date.iso() + " is not on the panel calendar");
        z[static_cast<std::size_t>(it - calendar.begin())] += p.z;
    }
    return z;
}

}  // namespace liqrec::econ
