#include "liqrec/econ/inference.hpp"

#include "liqrec/error.hpp"

#include <algorithm>
#include <cmath>

namespace liqrec::econ {

WelchResult welch_diff_means(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2) throw DataError("welch_diff_means: each group needs at least two values");
    auto moments = [](std::span<const double> v) {
        double m = 0;
        for (double x : v) m += x;
        m /= static_cast<double>(v.size());
        double s = 0;
        for (double x : v) s += (x - m) * (x - m);
        return std::pair{m, s / static_cast<double>(v.size() - 1)};
    };
    const auto [ma, va] = moments(a);
    const auto [mb, vb] = moments(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    WelchResult r;
    r.diff = ma - mb;
    const double qa = va / na, qb = vb / nb;
    r.se = std::sqrt(qa + qb);
    if (r.se == 0.0) {
        r.t = r.diff == 0.0 ? 0.0 : std::copysign(INFINITY, r.diff);
        r.df = na + nb - 2.0;
        r.p = r.diff == 0.0 ? 1.0 : 0.0;
        return r;
    }
    r.t = r.diff / r.se;
    r.df = (qa + qb) * (qa + qb) / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    r.p = student_t_two_sided_p(r.t, r.df);
    return r;
}

RegressionResult state_dependence_monthly(const MonthlyPanel& m, MonthlySpec spec) {
    std::vector<const MonthlyRow*> rows;
    for (const auto& r : m.rows)
        if (spec == MonthlySpec::level || r.spread_change) rows.push_back(&r);
    if (rows.size() < 12) throw DataError("state_dependence_monthly: need at least 12 months, have " + std::to_string(rows.size()));
    const auto nc = m.control_names.size();
    const auto n = static_cast<Eigen::Index>(rows.size());
    Eigen::MatrixXd x(n, static_cast<Eigen::Index>(3 + nc));
    Eigen::VectorXd y(n);
    int hacks = 0;
    bool pcs_var = false;
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = *rows[static_cast<std::size_t>(i)];
        if (r.controls.size() != nc) throw DataError("state_dependence_monthly: control count mismatch");
        const double h = r.hack_month ? 1.0 : 0.0;
        hacks += r.hack_month;
        pcs_var = pcs_var || r.pcs_z != 0.0;
        x(i, 0) = h;
        x(i, 1) = r.pcs_z;
        x(i, 2) = h * r.pcs_z;
        for (std::size_t c = 0; c < nc; ++c) x(i, static_cast<Eigen::Index>(3 + c)) = r.controls[c];
        y(i) = spec == MonthlySpec::level ? r.spread : *r.spread_change;
    }
    if (hacks == 0 || hacks == n || !pcs_var)
        throw EstimatorError("state_dependence_monthly: degenerate interaction (hack months " + std::to_string(hacks) +
                             " of " + std::to_string(n) + (pcs_var ? ")" : ", pcs_z identically zero)"));
    std::vector<std::string> names{"hack_month", "pcs_z", "hack_x_pcs_z"};
    names.insert(names.end(), m.control_names.begin(), m.control_names.end());
    return ols(x, names, y, {}, SeSpec::newey_west(1));
}

std::vector<EtaRow> eta_recovery(double beta_bps, double se_beta, std::span<const double> lambdas) {
    if (!(se_beta >= 0.0)) throw DomainError("eta_recovery: SE must be >= 0");
    std::vector<EtaRow> out;
    for (double l : lambdas) {
        if (!(l > 0.0)) throw DomainError("eta_recovery: lambda must be > 0");
        EtaRow r;
        r.lambda = l;
        r.eta = 1.0 - beta_bps / l;
        r.se = se_beta / l;
        r.ci_lo = r.eta - 1.96 * r.se;
        r.ci_hi = r.eta + 1.96 * r.se;
        out.push_back(r);
    }
    return out;
}

std::pair<double, double> ks_uniform(std::vector<double> v) {
    if (v.empty()) throw DataError("ks_uniform: no values");
    std::sort(v.begin(), v.end());
    const double n = static_cast<double>(v.size());
    double d = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double u = std::clamp(v[i], 0.0, 1.0);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - u, u - static_cast<double>(i) / n});
    }
    const double sn = std::sqrt(n);
    const double lam = (sn + 0.12 + 0.11 / sn) * d;
    if (lam < 1e-3) return {d, 1.0};
    double p = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = std::exp(-2.0 * k * k * lam * lam);
        p += (k % 2 ? 2.0 : -2.0) * term;
        if (term < 1e-16) break;
    }
    return {d, std::clamp(p, 0.0, 1.0)};
}

}  // namespace liqrec::econ
