#include "liqrec/econ/linear.hpp"

#include "liqrec/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <unordered_map>

namespace liqrec::econ {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string SeSpec::label() const {
    switch (kind) {
        case SeKind::classical: return "classical";
        case SeKind::hc0: return "HC0";
        case SeKind::hc1: return "HC1";
        case SeKind::hc3: return "HC3";
        case SeKind::cluster: return "cluster(" + (cluster_name.empty() ? std::string("key") : cluster_name) + ")";
        case SeKind::newey_west: return "NeweyWest(" + std::to_string(lag) + ")";
    }
    return "classical";
}

std::size_t RegressionResult::index(const std::string& name) const {
    auto it = std::find(names.begin(), names.end(), name);
    if (it == names.end()) throw EstimatorError("no coefficient named '" + name + "'");
    return static_cast<std::size_t>(it - names.begin());
}

double RegressionResult::se(std::size_t i) const {
    const auto k = static_cast<Index>(i);
    return std::sqrt(std::max(0.0, vcov(k, k)));
}

double RegressionResult::p(std::size_t i) const { return student_t_two_sided_p(t(i), df_resid); }

std::pair<double, double> RegressionResult::ci(std::size_t i, double level) const {
    const double q = student_t_quantile(0.5 + level / 2.0, df_resid);
    const double b = coef(static_cast<Index>(i));
    return {b - q * se(i), b + q * se(i)};
}

const JointTest* RegressionResult::test(const std::string& name) const {
    for (const auto& t : tests)
        if (t.name == name) return &t;
    return nullptr;
}

double student_t_two_sided_p(double t, double df) {
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (!(df > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return 0.0;
    boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(t)));
}

double student_t_quantile(double prob, double df) {
    if (!(df > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return boost::math::quantile(boost::math::students_t(df), prob);
}

double f_upper_p(double f, double df1, double df2) {
    if (!(df1 > 0.0 && df2 > 0.0) || std::isnan(f)) return std::numeric_limits<double>::quiet_NaN();
    if (f <= 0.0) return 1.0;
    if (std::isinf(f)) return 0.0;
    return boost::math::cdf(boost::math::complement(boost::math::fisher_f(df1, df2), f));
}

double normal_cdf(double z) { return boost::math::cdf(boost::math::normal(), z); }

double chi2_upper_p(double x, double df) {
    if (x <= 0.0) return 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), x));
}

namespace {

std::vector<int> dense_ids(const std::vector<long>& keys, int& n_levels) {
    std::unordered_map<long, int> map;
    map.reserve(keys.size());
    std::vector<int> out(keys.size());
    for (std::size_t i = 0; i < keys.size(); ++i) {
        auto [it, fresh] = map.try_emplace(keys[i], static_cast<int>(map.size()));
        out[i] = it->second;
    }
    n_levels = static_cast<int>(map.size());
    return out;
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(static_cast<std::size_t>(n)) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int a) {
        while (parent[static_cast<std::size_t>(a)] != a) {
            parent[static_cast<std::size_t>(a)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(a)])];
            a = parent[static_cast<std::size_t>(a)];
        }
        return a;
    }
    void unite(int a, int b) { parent[static_cast<std::size_t>(find(a))] = find(b); }
};

}  // namespace

int absorb_fixed_effects(MatrixXd& m, const std::vector<std::vector<long>>& fixed_effects) {
    if (fixed_effects.empty()) return 0;
    const auto n = static_cast<std::size_t>(m.rows());
    std::vector<std::vector<int>> ids;
    std::vector<int> levels;
    for (const auto& fe : fixed_effects) {
        if (fe.size() != n) throw EstimatorError("fixed-effect key length does not match the data");
        int g = 0;
        ids.push_back(dense_ids(fe, g));
        levels.push_back(g);
    }
    std::vector<std::vector<double>> counts;
    for (std::size_t d = 0; d < ids.size(); ++d) {
        std::vector<double> c(static_cast<std::size_t>(levels[d]), 0.0);
        for (int id : ids[d]) c[static_cast<std::size_t>(id)] += 1.0;
        counts.push_back(std::move(c));
    }

    const int max_sweeps = ids.size() == 1 ? 1 : 10000;
    for (Index c = 0; c < m.cols(); ++c) {
        const double scale = 1.0 + m.col(c).cwiseAbs().maxCoeff();
        for (int sweep = 0; sweep < max_sweeps; ++sweep) {
            double moved = 0.0;
            for (std::size_t d = 0; d < ids.size(); ++d) {
                std::vector<double> sum(static_cast<std::size_t>(levels[d]), 0.0);
                for (std::size_t i = 0; i < n; ++i) sum[static_cast<std::size_t>(ids[d][i])] += m(static_cast<Index>(i), c);
                for (std::size_t g = 0; g < sum.size(); ++g) {
                    sum[g] /= counts[d][g];
                    moved = std::max(moved, std::abs(sum[g]));
                }
                for (std::size_t i = 0; i < n; ++i) m(static_cast<Index>(i), c) -= sum[static_cast<std::size_t>(ids[d][i])];
            }
            if (moved < 1e-14 * scale) break;
        }
    }

    int absorbed = levels[0];
    if (ids.size() >= 2) {
        UnionFind uf(levels[0] + levels[1]);
        for (std::size_t i = 0; i < n; ++i) uf.unite(ids[0][i], levels[0] + ids[1][i]);
        int comps = 0;
        for (int v = 0; v < levels[0] + levels[1]; ++v)
            if (uf.find(v) == v) ++comps;
        absorbed = levels[0] + levels[1] - comps;
    }
    for (std::size_t d = 2; d < ids.size(); ++d) absorbed += levels[d] - 1;
    return absorbed;
}

namespace {

std::vector<std::size_t> gram_schmidt_drop(const MatrixXd& x, const VectorXd& ref_norms, double tol) {
    std::vector<std::size_t> bad;
    std::vector<VectorXd> basis;
    for (Index j = 0; j < x.cols(); ++j) {
        VectorXd v = x.col(j);
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) v -= q.dot(v) * q;
        const double nv = v.norm();
        if (nv <= tol * std::max(ref_norms(j), 1e-300) || nv == 0.0) {
            bad.push_back(static_cast<std::size_t>(j));
            continue;
        }
        basis.push_back(v / nv);
    }
    return bad;
}

}  // namespace

std::vector<std::size_t> collinear_columns(const MatrixXd& x, double tol) {
    VectorXd norms(x.cols());
    for (Index j = 0; j < x.cols(); ++j) norms(j) = x.col(j).norm();
    return gram_schmidt_drop(x, norms, tol);
}

MatrixXd newey_west(const VectorXd& residuals, const MatrixXd& design, int lag) {
    const Index n = design.rows();
    if (residuals.size() != n) throw EstimatorError("newey_west: residual/design length mismatch");
    if (lag < 0) throw DomainError("newey_west: lag must be >= 0");
    if (lag >= n) throw EstimatorError("newey_west: lag must be smaller than the number of observations");
    const MatrixXd scores = design.array().colwise() * residuals.array();
    MatrixXd meat = scores.transpose() * scores;
    for (int l = 1; l <= lag; ++l) {
        const double w = 1.0 - static_cast<double>(l) / (lag + 1.0);
        const MatrixXd g = scores.bottomRows(n - l).transpose() * scores.topRows(n - l);
        meat += w * (g + g.transpose());
    }
    const MatrixXd bread = (design.transpose() * design).ldlt().solve(MatrixXd::Identity(design.cols(), design.cols()));
    return bread * meat * bread;
}

JointTest wald_test(const RegressionResult& r, std::span<const std::size_t> idx, const std::string& name) {
    const auto q = static_cast<Index>(idx.size());
    if (q == 0) throw EstimatorError("wald_test: no coefficients selected");
    VectorXd b(q);
    MatrixXd v(q, q);
    for (Index a = 0; a < q; ++a) {
        b(a) = r.coef(static_cast<Index>(idx[static_cast<std::size_t>(a)]));
        for (Index c = 0; c < q; ++c)
            v(a, c) = r.vcov(static_cast<Index>(idx[static_cast<std::size_t>(a)]),
                             static_cast<Index>(idx[static_cast<std::size_t>(c)]));
    }
    JointTest t;
    t.name = name;
    t.df1 = static_cast<int>(q);
    t.df2 = r.df_resid;
    Eigen::FullPivLU<MatrixXd> lu(v);
    if (!lu.isInvertible()) throw EstimatorError("wald_test '" + name + "': singular covariance block");
    t.f = b.dot(lu.solve(b)) / static_cast<double>(q);
    t.p = f_upper_p(t.f, t.df1, t.df2);
    return t;
}

RegressionResult ols(const MatrixXd& x_in, const std::vector<std::string>& names_in, const VectorXd& y_in,
                     const std::vector<std::vector<long>>& fixed_effects, const SeSpec& se, const OlsOptions& opt) {
    const Index n = x_in.rows();
    if (static_cast<std::size_t>(x_in.cols()) != names_in.size())
        throw EstimatorError("ols: design has " + std::to_string(x_in.cols()) + " columns but " +
                             std::to_string(names_in.size()) + " names");
    if (y_in.size() != n) throw EstimatorError("ols: outcome length does not match the design");
    if (!x_in.allFinite() || !y_in.allFinite()) throw EstimatorError("ols: non-finite values in the data");

    const bool fe = !fixed_effects.empty();
    const bool add_const = opt.intercept && !fe;
    const Index p = x_in.cols() + (add_const ? 1 : 0);
    MatrixXd x(n, p);
    std::vector<std::string> names;
    if (add_const) {
        x.col(0).setOnes();
        names.push_back("const");
    }
    x.rightCols(x_in.cols()) = x_in;
    names.insert(names.end(), names_in.begin(), names_in.end());

    VectorXd raw_norms(p);
    for (Index j = 0; j < p; ++j) raw_norms(j) = x.col(j).norm();

    MatrixXd xy(n, p + 1);
    xy.leftCols(p) = x;
    xy.col(p) = y_in;
    const int absorbed = absorb_fixed_effects(xy, fixed_effects);
    const MatrixXd xw = xy.leftCols(p);
    const VectorXd yw = xy.col(p);

    const auto bad = gram_schmidt_drop(xw, raw_norms, opt.collinear_tol);
    if (!bad.empty()) {
        std::string list;
        for (auto j : bad) list += (list.empty() ? "" : ", ") + names[j];
        throw EstimatorError("rank-deficient design; collinear columns: " + list);
    }
    const int k = static_cast<int>(p) + absorbed;
    if (n <= k) throw EstimatorError("ols: " + std::to_string(n) + " observations for " + std::to_string(k) + " parameters");

    Eigen::HouseholderQR<MatrixXd> qr(xw);
    const MatrixXd r = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
    const MatrixXd rinv = r.triangularView<Eigen::Upper>().solve(MatrixXd::Identity(p, p));
    const MatrixXd bread = rinv * rinv.transpose();
    const VectorXd qty = qr.householderQ().transpose() * yw;
    const VectorXd b = rinv * qty.head(p);

    RegressionResult res;
    res.names = names;
    res.coef = b;
    res.n_obs = static_cast<int>(n);
    res.n_params = k;
    res.n_absorbed = absorbed;
    res.residuals = yw - xw * b;
    res.ssr = res.residuals.squaredNorm();
    res.se_flavor = se.label();
    res.df_resid = static_cast<int>(n) - k;

    const double dn = static_cast<double>(n), dk = static_cast<double>(k);
    const VectorXd& e = res.residuals;
    switch (se.kind) {
        case SeKind::classical:
            res.vcov = bread * (res.ssr / (dn - dk));
            break;
        case SeKind::hc0:
        case SeKind::hc1:
        case SeKind::hc3: {
            VectorXd w = e.array().square();
            if (se.kind == SeKind::hc3) {
                const MatrixXd xb = xw * bread;
                for (Index i = 0; i < n; ++i) {
                    const double h = xb.row(i).dot(xw.row(i));
                    w(i) /= (1.0 - h) * (1.0 - h);
                }
            }
            const MatrixXd meat = xw.transpose() * (xw.array().colwise() * w.array()).matrix();
            res.vcov = bread * meat * bread;
            if (se.kind == SeKind::hc1) res.vcov *= dn / (dn - dk);
            break;
        }
        case SeKind::cluster: {
            if (se.cluster.size() != static_cast<std::size_t>(n)) throw EstimatorError("cluster key length mismatch");
            int g = 0;
            const auto ids = dense_ids(se.cluster, g);
            if (g < 2) throw EstimatorError("cluster-robust SEs need at least two clusters");
            MatrixXd sums = MatrixXd::Zero(g, p);
            for (Index i = 0; i < n; ++i) sums.row(ids[static_cast<std::size_t>(i)]) += xw.row(i) * e(i);
            const MatrixXd meat = sums.transpose() * sums;
            const double dg = g;
            // FE levels nested within clusters do not count toward K here.
            double k_adj = dk;
            if (fe) {
                int nested = 0;
                for (const auto& f : fixed_effects) {
                    int gf = 0;
                    const auto fid = dense_ids(f, gf);
                    std::vector<int> owner(static_cast<std::size_t>(gf), -1);
                    bool ok = true;
                    for (std::size_t i = 0; i < fid.size() && ok; ++i) {
                        auto& o = owner[static_cast<std::size_t>(fid[i])];
                        if (o < 0) o = ids[i];
                        ok = o == ids[i];
                    }
                    if (ok) nested = std::max(nested, gf);
                }
                k_adj = std::max(static_cast<double>(p), dk - nested);
            }
            res.vcov = bread * meat * bread * ((dg / (dg - 1.0)) * ((dn - 1.0) / (dn - k_adj)));
            res.n_clusters = g;
            res.df_resid = g - 1;
            break;
        }
        case SeKind::newey_west:
            res.vcov = newey_west(e, xw, se.lag);
            break;
    }
    res.vcov = 0.5 * (res.vcov + res.vcov.transpose());

    const double ybar = y_in.mean();
    const double tss = (y_in.array() - ybar).square().sum();
    const double wtss = fe ? yw.squaredNorm() : tss;
    res.r2 = tss > 0.0 ? 1.0 - res.ssr / tss : 0.0;
    res.within_r2 = wtss > 0.0 ? 1.0 - res.ssr / wtss : 0.0;
    res.adj_r2 = 1.0 - (1.0 - res.r2) * (dn - 1.0) / (dn - dk);
    return res;
}

}  // namespace liqrec::econ
