#include "liqrec/econ/threshold.hpp"

#include "liqrec/econ/linear.hpp"
#include "liqrec/econ/parallel.hpp"
#include "liqrec/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace liqrec::econ {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

// Residual-maker for the absorbed controls; identity when there are none.
struct Partial {
    MatrixXd q;   // orthonormal basis of the controls
    VectorXd apply(const VectorXd& v) const { return q.cols() == 0 ? v : VectorXd(v - q * (q.transpose() * v)); }
};

}  // namespace

ThresholdResult threshold_regression(const StackedPanel& s, const ThresholdOptions& opt) {
    if (!(opt.trim >= 0.0 && opt.trim < 0.5)) throw DomainError("threshold: trim must lie in [0, 0.5)");
    if (opt.n_bootstrap < 0) throw DomainError("threshold: n_bootstrap must be >= 0");
    const auto n = static_cast<Index>(s.rows());
    if (n == 0) throw EstimatorError("threshold: empty panel");
    const auto& qv = s.attribute(opt.threshold_var);
    std::vector<long> ev(s.rows());
    for (std::size_t i = 0; i < s.rows(); ++i) ev[i] = s.event_id[i];

    const auto nc = static_cast<Index>(opt.controls.size());
    MatrixXd base(n, 2 + nc);   // y, post, controls
    for (Index r = 0; r < n; ++r) {
        const auto i = static_cast<std::size_t>(r);
        base(r, 0) = s.outcome[i];
        base(r, 1) = s.rel_day[i] >= opt.post_from ? 1.0 : 0.0;
        for (Index c = 0; c < nc; ++c) base(r, 2 + c) = s.control(opt.controls[static_cast<std::size_t>(c)])[i];
        if (!std::isfinite(qv[i])) throw DataError("threshold: non-finite threshold variable");
    }
    if (!base.allFinite()) throw DataError("threshold: non-finite outcome or control");
    const int absorbed = absorb_fixed_effects(base, {ev});

    Partial part;
    if (nc > 0) {
        const MatrixXd c = base.rightCols(nc);
        if (!collinear_columns(c).empty()) throw EstimatorError("threshold: collinear controls");
        Eigen::HouseholderQR<MatrixXd> qr(c);
        part.q = qr.householderQ() * MatrixXd::Identity(n, nc);
    }
    const VectorXd y = part.apply(base.col(0));
    const VectorXd post = part.apply(base.col(1));

    std::vector<double> uniq(qv.begin(), qv.end());
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());

    ThresholdResult out;
    out.n_obs = static_cast<int>(n);
    std::vector<MatrixXd> bases;   // orthonormal basis of the two regime columns per candidate
    for (double g : uniq) {
        Index below = 0;
        for (double q : qv) below += q <= g;
        const double share = static_cast<double>(below) / static_cast<double>(n);
        if (share < opt.trim || 1.0 - share < opt.trim || below == n) continue;
        MatrixXd reg(n, 1);
        for (Index r = 0; r < n; ++r) {
            const auto i = static_cast<std::size_t>(r);
            reg(r, 0) = qv[i] <= g && s.rel_day[i] >= opt.post_from ? 1.0 : 0.0;
        }
        absorb_fixed_effects(reg, {ev});
        MatrixXd two(n, 2);
        two.col(0) = part.apply(reg.col(0));
        two.col(1) = post - two.col(0);
        if (!collinear_columns(two).empty()) continue;   // regime without post-event variation
        Eigen::HouseholderQR<MatrixXd> qr(two);
        bases.push_back(qr.householderQ() * MatrixXd::Identity(n, 2));
        out.grid.push_back(g);
    }
    if (out.grid.empty()) throw EstimatorError("threshold: every candidate threshold is trimmed");

    const double yy = y.squaredNorm();
    for (const auto& b : bases) out.ssr.push_back(yy - (b.transpose() * y).squaredNorm());
    const auto best = static_cast<std::size_t>(std::min_element(out.ssr.begin(), out.ssr.end()) - out.ssr.begin());
    out.gamma_hat = out.grid[best];
    const double pp = post.squaredNorm();
    if (!(pp > 0)) throw EstimatorError("threshold: Post has no within-event variation");
    const double ssr0 = yy - std::pow(post.dot(y), 2) / pp;
    const double ssr1 = out.ssr[best];
    const double df = static_cast<double>(n - absorbed - 2 - nc);
    if (df <= 0) throw EstimatorError("threshold: not enough observations");
    const double sigma2 = ssr1 / df;
    for (double v : out.ssr) out.lr.push_back(sigma2 > 0 ? (v - ssr1) / sigma2 : (v > ssr1 ? INFINITY : 0.0));
    out.f_stat = sigma2 > 0 ? (ssr0 - ssr1) / sigma2 : (ssr0 > ssr1 ? INFINITY : 0.0);

    if (out.grid.size() == 1) {
        out.ci_95 = {out.gamma_hat, out.gamma_hat};
    } else {
        std::size_t lo = best, hi = best;
        for (std::size_t j = 0; j < out.grid.size(); ++j)
            if (out.lr[j] <= opt.lr_critical) {
                lo = std::min(lo, j);
                hi = std::max(hi, j);
            }
        const auto nxt = std::upper_bound(uniq.begin(), uniq.end(), out.grid[hi]);
        out.ci_95 = {out.grid[lo], nxt == uniq.end() ? out.grid[hi] : *nxt};
    }

    // regime coefficients with clustered SEs at gamma_hat
    {
        MatrixXd x(n, 2 + nc);
        for (Index r = 0; r < n; ++r) {
            const auto i = static_cast<std::size_t>(r);
            const double p = s.rel_day[i] >= opt.post_from ? 1.0 : 0.0;
            x(r, 0) = qv[i] <= out.gamma_hat ? p : 0.0;
            x(r, 1) = qv[i] <= out.gamma_hat ? 0.0 : p;
            for (Index c = 0; c < nc; ++c) x(r, 2 + c) = s.control(opt.controls[static_cast<std::size_t>(c)])[i];
        }
        std::vector<std::string> names{"post_low", "post_high"};
        names.insert(names.end(), opt.controls.begin(), opt.controls.end());
        VectorXd yr(n);
        for (Index r = 0; r < n; ++r) yr(r) = s.outcome[static_cast<std::size_t>(r)];
        const auto fit = ols(x, names, yr, {ev}, SeSpec::clustered(ev, "event"));
        out.beta1 = fit.coef(0);
        out.beta2 = fit.coef(1);
        out.se_beta1 = fit.se(std::size_t{0});
        out.se_beta2 = fit.se(std::size_t{1});
    }

    out.n_bootstrap = opt.n_bootstrap;
    if (opt.n_bootstrap == 0) return out;

    // linear-null fit and residual blocks per event
    const double b0 = post.dot(y) / pp;
    const VectorXd fit0 = b0 * post;
    const VectorXd e0 = y - fit0;
    std::map<long, std::vector<Index>> blocks;
    for (Index r = 0; r < n; ++r) blocks[ev[static_cast<std::size_t>(r)]].push_back(r);
    std::vector<std::vector<Index>> blk;
    for (auto& [k, v] : blocks) blk.push_back(std::move(v));
    bool balanced = true;
    for (const auto& b : blk) balanced = balanced && b.size() == blk.front().size();
    if (!balanced) out.warnings.push_back("unbalanced event windows; bootstrap resamples rows instead of event blocks");

    MatrixXd all(n, static_cast<Index>(2 * bases.size()));
    for (std::size_t j = 0; j < bases.size(); ++j) all.middleCols(static_cast<Index>(2 * j), 2) = bases[j];

    std::vector<double> fstar(static_cast<std::size_t>(opt.n_bootstrap));
    parallel_for(fstar.size(), opt.threads, [&](std::size_t b) {
        std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                          static_cast<std::uint32_t>(b)};
        std::mt19937_64 rng(seq);
        VectorXd es(n);
        if (balanced) {
            std::uniform_int_distribution<std::size_t> pick(0, blk.size() - 1);
            for (const auto& target : blk) {
                const auto& src = blk[pick(rng)];
                for (std::size_t t = 0; t < target.size(); ++t) es(target[t]) = e0(src[t]);
            }
        } else {
            std::uniform_int_distribution<Index> pick(0, n - 1);
            for (Index r = 0; r < n; ++r) es(r) = e0(pick(rng));
            for (const auto& target : blk) {   // keep the within transformation exact
                double m = 0;
                for (auto r : target) m += es(r);
                m /= static_cast<double>(target.size());
                for (auto r : target) es(r) -= m;
            }
        }
        const VectorXd ys = part.apply(fit0 + es);
        const double yys = ys.squaredNorm();
        const VectorXd proj = all.transpose() * ys;
        double best_ssr = INFINITY;
        for (std::size_t j = 0; j < bases.size(); ++j)
            best_ssr = std::min(best_ssr, yys - proj.segment(static_cast<Index>(2 * j), 2).squaredNorm());
        const double s0 = yys - std::pow(post.dot(ys), 2) / pp;
        const double s2 = best_ssr / df;
        fstar[b] = s2 > 0 ? (s0 - best_ssr) / s2 : 0.0;
    });
    int exceed = 0;
    for (double f : fstar) exceed += f >= out.f_stat;
    out.bootstrap_p = static_cast<double>(exceed) / static_cast<double>(fstar.size());
    return out;
}

}  // namespace liqrec::econ
