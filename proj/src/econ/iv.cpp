#include "liqrec/econ/iv.hpp"

#include "liqrec/error.hpp"
#include "liqrec/ingest.hpp"

#include <cmath>

namespace liqrec::econ {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

VectorXd residualize(const VectorXd& y, const MatrixXd& factors) {
    const Index n = y.size();
    if (factors.rows() != n) throw EstimatorError("residualize: factor rows do not match the outcome");
    MatrixXd x(n, factors.cols() + 1);
    x.col(0).setOnes();
    x.rightCols(factors.cols()) = factors;
    if (n <= x.cols()) throw EstimatorError("residualize: not enough observations");
    const auto bad = collinear_columns(x);
    if (!bad.empty()) {
        std::string list;
        for (auto j : bad) list += (list.empty() ? "" : ", ") + (j == 0 ? std::string("const") : "factor " + std::to_string(j - 1));
        throw EstimatorError("residualize: rank-deficient factors; collinear columns: " + list);
    }
    const VectorXd b = x.householderQr().solve(y);
    VectorXd e = y - x * b;
    e.array() -= e.mean();   // clean up rounding so the mean is zero to machine precision
    return e;
}

TslsResult tsls(const MarketPanel& panel, const EventCatalog& events, const TslsOptions& opt) {
    if (opt.instrument_lag < 0) throw DomainError("tsls: instrument_lag must be >= 0");
    if (opt.window_lo > -1 || opt.window_hi < 0) throw DomainError("tsls: window must contain k=-1 and k=0");
    const auto n = static_cast<Index>(panel.rows());
    const Index lag = opt.instrument_lag;
    if (n <= lag + 3) throw DataError("tsls: panel too short");
    TslsResult out;

    // instrument, winsorized over all days
    std::vector<double> z = panel.column(opt.instrument);
    if (opt.winsor_pct > 0) {
        const auto [lo, hi] = winsorize_bounds(z, opt.winsor_pct, 100.0 - opt.winsor_pct);
        z = clip(z, lo, hi);
    }
    const auto& flow = panel.column(opt.flow);

    std::vector<std::string> names{opt.instrument};
    std::vector<const std::vector<double>*> extra;
    if (opt.event_day_control) {
        names.push_back(opt.event_day);
        extra.push_back(&panel.column(opt.event_day));
    }
    for (const auto& c : opt.first_stage_controls) {
        names.push_back(c);
        extra.push_back(&panel.column(c));
    }
    const Index m = n - lag;
    MatrixXd x1(m, static_cast<Index>(names.size()));
    VectorXd y1(m);
    for (Index t = lag; t < n; ++t) {
        const auto s = static_cast<std::size_t>(t - lag);
        x1(t - lag, 0) = z[s];
        for (std::size_t c = 0; c < extra.size(); ++c) x1(t - lag, static_cast<Index>(c + 1)) = (*extra[c])[s];
        y1(t - lag) = flow[static_cast<std::size_t>(t)];
    }
    out.first = ols(x1, names, y1, {}, SeSpec::newey_west(opt.nw_lag));
    const double tz = out.first.t(out.first.index(opt.instrument));
    out.first_stage_f = tz * tz;
    out.first.tests.push_back({"instrument_f", out.first_stage_f, 1, out.first.df_resid,
                               f_upper_p(out.first_stage_f, 1, out.first.df_resid)});
    out.weak = !(out.first_stage_f >= opt.weak_f);
    if (out.weak)
        out.warnings.push_back("weak instrument: first-stage F = " + format_double(out.first_stage_f) + " < " +
                               format_double(opt.weak_f));

    // fitted flow on every day with a lagged instrument
    std::vector<double> hat(static_cast<std::size_t>(n), std::numeric_limits<double>::quiet_NaN());
    const VectorXd fitted = y1 - out.first.residuals;
    for (Index t = lag; t < n; ++t) hat[static_cast<std::size_t>(t)] = fitted(t - lag);

    // abnormal outcome
    VectorXd y(n);
    const auto& raw = panel.column(opt.outcome);
    for (Index t = 0; t < n; ++t) y(t) = raw[static_cast<std::size_t>(t)];
    MatrixXd f(n, static_cast<Index>(opt.factors.size()));
    for (std::size_t c = 0; c < opt.factors.size(); ++c) {
        const auto& col = panel.column(opt.factors[c]);
        for (Index t = 0; t < n; ++t) f(t, static_cast<Index>(c)) = col[static_cast<std::size_t>(t)];
    }
    const VectorXd ab = residualize(y, f);

    // stage 2 on stacked windows
    std::vector<double> ys, post, inter;
    std::vector<long> ev;
    for (std::size_t e = 0; e < events.size(); ++e) {
        const auto r = panel.row_of(events.events[e].date);
        if (!r) throw DataError("tsls: event " + events.events[e].date.iso() + " not on the panel calendar");
        const long d = static_cast<long>(*r);
        if (d + opt.window_lo < lag || d + opt.window_hi >= n) {
            out.warnings.push_back("event " + std::to_string(e) + " lacks window coverage; dropped");
            out.hat_flow.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        double h = 0;
        for (long t = d + opt.window_lo; t <= d + opt.window_hi; ++t) h += hat[static_cast<std::size_t>(t)];
        out.hat_flow.push_back(h);
        for (int k = opt.window_lo; k <= opt.window_hi; ++k) {
            ys.push_back(ab(d + k));
            post.push_back(k >= 0 ? 1.0 : 0.0);
            inter.push_back(k >= 0 ? h : 0.0);
            ev.push_back(static_cast<long>(e));
        }
    }
    if (ys.empty()) throw DataError("tsls: no event has full window coverage");
    const auto rows = static_cast<Index>(ys.size());
    MatrixXd x2(rows, 2);
    VectorXd y2(rows);
    for (Index i = 0; i < rows; ++i) {
        x2(i, 0) = post[static_cast<std::size_t>(i)];
        x2(i, 1) = inter[static_cast<std::size_t>(i)];
        y2(i) = ys[static_cast<std::size_t>(i)];
    }
    try {
        out.second = ols(x2, {"post", "post_x_hat_flow"}, y2, {ev}, SeSpec::clustered(ev, "event"));
    } catch (const EstimatorError& e) {
        throw EstimatorError(std::string("tsls: singular second-stage design (") + e.what() + ")");
    }
    out.multiplier = out.second.b("post_x_hat_flow") * 1e8;
    out.multiplier_se = out.second.se("post_x_hat_flow") * 1e8;
    return out;
}

}  // namespace liqrec::econ
