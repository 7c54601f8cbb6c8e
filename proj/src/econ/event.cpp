#include "liqrec/econ/event.hpp"

#include "liqrec/datagen.hpp"
#include "liqrec/econ/parallel.hpp"
#include "liqrec/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

namespace liqrec::econ {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string rel_day_name(int k) { return "k=" + std::to_string(k); }

namespace {

std::vector<int> event_times(const StackedPanel& s, int baseline) {
    std::set<int> ks(s.rel_day.begin(), s.rel_day.end());
    ks.erase(baseline);
    return {ks.begin(), ks.end()};
}

void check_baseline(const StackedPanel& s, int baseline) {
    std::map<int, bool> has;
    for (std::size_t r = 0; r < s.rows(); ++r) {
        auto& h = has[s.event_id[r]];
        h = h || s.rel_day[r] == baseline;
    }
    for (const auto& [e, ok] : has)
        if (!ok) throw EstimatorError("event " + std::to_string(e) + " has no baseline row (k=" + std::to_string(baseline) + ")");
}

// Exactly identified fallback for a single event: no SEs.
RegressionResult solve_only(const MatrixXd& x, const std::vector<std::string>& names, const VectorXd& y,
                            const std::vector<long>& fe) {
    MatrixXd xy(x.rows(), x.cols() + 1);
    xy << x, y;
    absorb_fixed_effects(xy, {fe});
    const MatrixXd xw = xy.leftCols(x.cols());
    const VectorXd yw = xy.col(x.cols());
    if (!collinear_columns(xw).empty()) throw EstimatorError("event_study: rank-deficient single-event design");
    RegressionResult r;
    r.names = names;
    r.coef = xw.colPivHouseholderQr().solve(yw);
    r.vcov = MatrixXd::Constant(x.cols(), x.cols(), std::numeric_limits<double>::quiet_NaN());
    r.residuals = yw - xw * r.coef;
    r.ssr = r.residuals.squaredNorm();
    r.n_obs = static_cast<int>(x.rows());
    r.n_params = static_cast<int>(x.cols()) + 1;
    r.n_absorbed = 1;
    r.se_flavor = "none";
    r.warnings.push_back("single event: coefficients are exactly identified and carry no standard errors");
    return r;
}

}  // namespace

RegressionResult event_study(const StackedPanel& s, const EventStudyOptions& opt) {
    if ((opt.window_lo && *opt.window_lo != s.window_lo) || (opt.window_hi && *opt.window_hi != s.window_hi))
        throw EstimatorError("event_study: stacked window [" + std::to_string(s.window_lo) + "," +
                             std::to_string(s.window_hi) + "] does not match the requested window");
    if (opt.baseline < s.window_lo || opt.baseline > s.window_hi)
        throw EstimatorError("event_study: baseline outside the window");
    if (s.rows() == 0) throw EstimatorError("event_study: empty stacked panel");
    check_baseline(s, opt.baseline);

    const auto ks = event_times(s, opt.baseline);
    std::vector<const std::vector<double>*> ctrl;
    for (const auto& c : opt.controls) ctrl.push_back(&s.control(c));

    const auto n = static_cast<Index>(s.rows());
    const auto p = static_cast<Index>(ks.size() + ctrl.size());
    MatrixXd x = MatrixXd::Zero(n, p);
    VectorXd y(n);
    std::vector<long> ev(s.rows());
    std::vector<std::string> names;
    for (int k : ks) names.push_back(rel_day_name(k));
    names.insert(names.end(), opt.controls.begin(), opt.controls.end());
    for (Index r = 0; r < n; ++r) {
        const auto i = static_cast<std::size_t>(r);
        const auto pos = std::lower_bound(ks.begin(), ks.end(), s.rel_day[i]);
        if (pos != ks.end() && *pos == s.rel_day[i]) x(r, pos - ks.begin()) = 1.0;
        for (std::size_t c = 0; c < ctrl.size(); ++c) x(r, static_cast<Index>(ks.size() + c)) = (*ctrl[c])[i];
        y(r) = opt.difference_outcome ? s.outcome[i] - s.outcome_prev[i] : s.outcome[i];
        if (!std::isfinite(y(r))) throw DataError("event_study: missing outcome (or previous-day outcome) in the stack");
        ev[i] = s.event_id[i];
    }

    if (s.distinct_events().size() < 2) return solve_only(x, names, y, ev);

    auto res = ols(x, names, y, {ev}, SeSpec::clustered(ev, "event"));
    std::vector<std::size_t> pre;
    for (std::size_t j = 0; j < ks.size(); ++j)
        if (ks[j] <= -2) pre.push_back(j);
    if (!pre.empty()) {
        try {
            res.tests.push_back(wald_test(res, pre, "pretrend"));
        } catch (const EstimatorError& e) {
            res.warnings.push_back(std::string("pre-trend test skipped: ") + e.what());
        }
    }
    return res;
}

RegressionResult did_event_study(const StackedPanel& d, int baseline) {
    if (d.rows() == 0) throw EstimatorError("did_event_study: empty panel");
    if (d.asset_id.size() != d.rows() || d.treat.size() != d.rows())
        throw EstimatorError("did_event_study: panel has no asset/treat keys");
    const bool any_t = std::any_of(d.treat.begin(), d.treat.end(), [](int t) { return t == 1; });
    const bool any_c = std::any_of(d.treat.begin(), d.treat.end(), [](int t) { return t == 0; });
    if (!any_t || !any_c) throw EstimatorError("did_event_study: need at least one treated and one control asset");
    const auto ks = event_times(d, baseline);
    const auto n = static_cast<Index>(d.rows());
    MatrixXd x = MatrixXd::Zero(n, static_cast<Index>(ks.size()));
    VectorXd y(n);
    std::vector<long> asset(d.rows()), date(d.rows()), ev(d.rows());
    for (Index r = 0; r < n; ++r) {
        const auto i = static_cast<std::size_t>(r);
        const auto pos = std::lower_bound(ks.begin(), ks.end(), d.rel_day[i]);
        if (d.treat[i] && pos != ks.end() && *pos == d.rel_day[i]) x(r, pos - ks.begin()) = 1.0;
        y(r) = d.outcome[i];
        asset[i] = d.asset_id[i];
        date[i] = d.date[i].serial();
        ev[i] = d.event_id[i];
    }
    std::vector<std::string> names;
    for (int k : ks) names.push_back("treat:" + rel_day_name(k));
    try {
        return ols(x, names, y, {asset, date}, SeSpec::clustered(ev, "event"));
    } catch (const EstimatorError& e) {
        throw EstimatorError(std::string("did_event_study: no within variation (") + e.what() + ")");
    }
}

PlaceboResult placebo(const RegressionResult& real, const MarketPanel& panel, const EventCatalog& events,
                      const PlaceboOptions& opt) {
    if (opt.n_draws < 1) throw DomainError("placebo: n_draws must be >= 1");
    PlaceboResult out;
    for (std::size_t j = 0; j < real.size(); ++j)
        if (real.names[j].rfind("k=", 0) == 0) {
            out.rel_days.push_back(std::stoi(real.names[j].substr(2)));
            out.actual.push_back(real.coef(static_cast<Index>(j)));
        }
    if (out.rel_days.empty()) throw EstimatorError("placebo: real estimate has no event-time coefficients");

    const auto& vix = panel.column(opt.vix_column);
    const auto& y = panel.column(opt.outcome);
    const auto n = static_cast<long>(panel.rows());
    std::vector<long> real_rows;
    for (const auto& e : events.events) {
        const auto r = panel.row_of(e.date);
        if (!r) throw DataError("placebo: real event " + e.date.iso() + " not on the panel calendar");
        real_rows.push_back(static_cast<long>(*r));
    }
    if (real_rows.empty()) throw DataError("placebo: no real events");
    auto mean_sd = [](const std::vector<double>& v) {
        double m = 0, s = 0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        for (double x : v) s += (x - m) * (x - m);
        return std::pair{m, std::sqrt(s / static_cast<double>(v.size() - 1))};
    };
    for (long r : real_rows) {
        out.mu_vix += vix[static_cast<std::size_t>(r)];
        out.mu_spread += y[static_cast<std::size_t>(r)];
    }
    out.mu_vix /= static_cast<double>(real_rows.size());
    out.mu_spread /= static_cast<double>(real_rows.size());
    out.tol_vix = opt.tol_vix >= 0 ? opt.tol_vix : 0.5 * mean_sd(vix).second;
    out.tol_spread = opt.tol_spread >= 0 ? opt.tol_spread : 0.5 * mean_sd(y).second;

    std::vector<char> contaminated(static_cast<std::size_t>(n), 0);
    for (long r : real_rows)
        for (long i = std::max(0L, r - opt.exclusion_days); i <= std::min(n - 1, r + opt.exclusion_days); ++i)
            contaminated[static_cast<std::size_t>(i)] = 1;
    std::vector<std::size_t> pool;
    std::size_t n_cover = 0, n_vix = 0, n_spread = 0;
    for (long i = 0; i < n; ++i) {
        const auto u = static_cast<std::size_t>(i);
        if (i + opt.window_lo < 0 || i + opt.window_hi >= n) continue;
        ++n_cover;
        if (!(std::abs(vix[u] - out.mu_vix) < out.tol_vix)) continue;
        ++n_vix;
        if (!(std::abs(y[u] - out.mu_spread) < out.tol_spread)) continue;
        ++n_spread;
        if (contaminated[u]) continue;
        pool.push_back(u);
    }
    if (pool.empty())
        throw DataError("placebo: empty candidate pool (window coverage " + std::to_string(n_cover) + ", vix match " +
                        std::to_string(n_vix) + ", spread match " + std::to_string(n_spread) +
                        ", outside exclusion 0)");
    out.pool_size = pool.size();

    const int n_dates = opt.n_dates > 0 ? opt.n_dates : static_cast<int>(events.size());
    StackOptions so{opt.window_lo, opt.window_hi, opt.outcome, opt.controls};
    out.draws.assign(static_cast<std::size_t>(opt.n_draws), {});
    parallel_for(out.draws.size(), opt.threads, [&](std::size_t d) {
        std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                          static_cast<std::uint32_t>(d)};
        std::mt19937_64 rng(seq);
        std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
        EventCatalog fake;
        for (int j = 0; j < n_dates; ++j) {
            ExploitEvent e;
            e.date = e.occurred = panel.dates()[pool[pick(rng)]];
            e.loss_usd = e.tvl_usd = 1.0;
            fake.events.push_back(e);
        }
        const auto st = build_stacked_panel(panel, fake, so);
        const auto r = event_study(st, opt.es);
        std::vector<double> row;
        for (int k : out.rel_days) row.push_back(r.b(rel_day_name(k)));
        out.draws[d] = std::move(row);
    });
    for (std::size_t j = 0; j < out.rel_days.size(); ++j) {
        int below = 0;
        for (const auto& dr : out.draws) below += dr[j] <= out.actual[j];
        out.p_value.push_back(static_cast<double>(below) / static_cast<double>(out.draws.size()));
    }
    return out;
}

}  // namespace liqrec::econ
