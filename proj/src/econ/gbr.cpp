#include "liqrec/econ/gbr.hpp"

#include "liqrec/error.hpp"
#include "liqrec/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace liqrec::econ {

double GbrTree::predict(std::span<const double> row) const {
    int i = 0;
    while (nodes[static_cast<std::size_t>(i)].feature >= 0) {
        const auto& nd = nodes[static_cast<std::size_t>(i)];
        i = row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes[static_cast<std::size_t>(i)].value;
}

double GbrModel::predict(std::span<const double> row) const {
    double s = base;
    for (const auto& t : trees) s += learning_rate * t.predict(row);
    return s;
}

namespace {

struct Builder {
    const std::vector<std::vector<double>>& x;
    const std::vector<std::vector<std::size_t>>& order;   // row indices sorted by each feature
    const std::vector<double>& r;
    const GbrConfig& cfg;
    std::vector<double>& gain_by_feature;
    GbrTree tree;

    int build(const std::vector<char>& in, int depth) {
        double sum = 0;
        std::size_t cnt = 0;
        for (std::size_t i = 0; i < in.size(); ++i)
            if (in[i]) {
                sum += r[i];
                ++cnt;
            }
        const int id = static_cast<int>(tree.nodes.size());
        tree.nodes.push_back({});
        tree.nodes.back().value = cnt ? sum / static_cast<double>(cnt) : 0.0;
        if (depth >= cfg.max_depth || cnt < 2 * static_cast<std::size_t>(cfg.min_samples_leaf)) return id;

        const double parent = sum * sum / static_cast<double>(cnt);
        double best_gain = 1e-12 * std::max(1.0, parent);
        int best_f = -1;
        double best_thr = 0.0;
        for (std::size_t f = 0; f < x.size(); ++f) {
            double left = 0;
            std::size_t nl = 0;
            std::size_t prev = 0;
            bool have_prev = false;
            for (std::size_t i : order[f]) {
                if (!in[i]) continue;
                if (have_prev && nl >= static_cast<std::size_t>(cfg.min_samples_leaf) &&
                    cnt - nl >= static_cast<std::size_t>(cfg.min_samples_leaf) && x[f][i] > x[f][prev]) {
                    const double right = sum - left;
                    const double g = left * left / static_cast<double>(nl) +
                                     right * right / static_cast<double>(cnt - nl) - parent;
                    if (g > best_gain) {
                        best_gain = g;
                        best_f = static_cast<int>(f);
                        best_thr = 0.5 * (x[f][prev] + x[f][i]);
                    }
                }
                left += r[i];
                ++nl;
                prev = i;
                have_prev = true;
            }
        }
        if (best_f < 0) return id;
        gain_by_feature[static_cast<std::size_t>(best_f)] += best_gain;
        std::vector<char> l(in.size(), 0), rr(in.size(), 0);
        for (std::size_t i = 0; i < in.size(); ++i)
            if (in[i]) (x[static_cast<std::size_t>(best_f)][i] <= best_thr ? l : rr)[i] = 1;
        tree.nodes[static_cast<std::size_t>(id)].feature = best_f;
        tree.nodes[static_cast<std::size_t>(id)].threshold = best_thr;
        const int li = build(l, depth + 1);
        const int ri = build(rr, depth + 1);
        tree.nodes[static_cast<std::size_t>(id)].left = li;
        tree.nodes[static_cast<std::size_t>(id)].right = ri;
        return id;
    }
};

}  // namespace

GbrModel fit_gbr(const std::vector<std::string>& names, const std::vector<std::vector<double>>& features,
                 const std::vector<double>& target_in, const GbrConfig& cfg) {
    if (names.size() != features.size()) throw DataError("fit_gbr: feature names do not match the columns");
    if (features.empty()) throw DataError("fit_gbr: no features");
    const std::size_t n = target_in.size();
    for (const auto& c : features)
        if (c.size() != n) throw DataError("fit_gbr: feature length differs from the target");
    if (n < 20) throw DataError("fit_gbr: need at least 20 rows");
    if (cfg.n_trees < 0 || cfg.max_depth < 1 || cfg.learning_rate <= 0 || cfg.min_samples_leaf < 1)
        throw DomainError("fit_gbr: invalid configuration");
    for (const auto& c : features)
        for (double v : c)
            if (!std::isfinite(v)) throw DataError("fit_gbr: non-finite feature value");
    for (double v : target_in)
        if (!std::isfinite(v)) throw DataError("fit_gbr: non-finite target value");

    const std::vector<double> y = cfg.winsor_pct > 0 ? winsorize(target_in, cfg.winsor_pct, 100.0 - cfg.winsor_pct)
                                                     : target_in;
    GbrModel m;
    m.names = names;
    m.learning_rate = cfg.learning_rate;
    m.importance.assign(features.size(), 0.0);
    m.base = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    const auto [mn, mx] = std::minmax_element(y.begin(), y.end());
    if (*mx - *mn <= 1e-12 * std::max(1.0, std::abs(m.base))) {
        m.warnings.push_back("constant target: no trees fitted");
        return m;
    }

    std::vector<std::vector<std::size_t>> order(features.size());
    for (std::size_t f = 0; f < features.size(); ++f) {
        order[f].resize(n);
        std::iota(order[f].begin(), order[f].end(), 0);
        std::stable_sort(order[f].begin(), order[f].end(),
                         [&](std::size_t a, std::size_t b) { return features[f][a] < features[f][b]; });
    }
    std::vector<double> pred(n, m.base), resid(n), row(features.size());
    const std::vector<char> all(n, 1);
    for (int t = 0; t < cfg.n_trees; ++t) {
        for (std::size_t i = 0; i < n; ++i) resid[i] = y[i] - pred[i];
        Builder b{features, order, resid, cfg, m.importance, {}};
        b.build(all, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t f = 0; f < features.size(); ++f) row[f] = features[f][i];
            pred[i] += cfg.learning_rate * b.tree.predict(row);
        }
        m.trees.push_back(std::move(b.tree));
    }
    const double tot = std::accumulate(m.importance.begin(), m.importance.end(), 0.0);
    if (tot > 0)
        for (double& v : m.importance) v /= tot;
    return m;
}

PartialResponse partial_response(const GbrModel& m, const std::vector<std::vector<double>>& features,
                                 std::size_t feature, std::vector<double> grid, int n_points) {
    if (feature >= features.size()) throw DataError("partial_response: feature index out of range");
    const auto& col = features[feature];
    if (col.empty()) throw DataError("partial_response: no rows");
    if (grid.empty()) {
        if (n_points < 2) throw DomainError("partial_response: need at least two grid points");
        std::vector<double> s(col);
        std::sort(s.begin(), s.end());
        const double lo = percentile(s, 5.0), hi = percentile(s, 95.0);
        for (int i = 0; i < n_points; ++i) grid.push_back(lo + (hi - lo) * i / (n_points - 1));
    }
    PartialResponse out;
    out.x = grid;
    std::vector<double> row(features.size());
    for (double g : grid) {
        double s = 0;
        for (std::size_t i = 0; i < col.size(); ++i) {
            for (std::size_t f = 0; f < features.size(); ++f) row[f] = features[f][i];
            row[feature] = g;
            s += m.predict(row);
        }
        out.f.push_back(s / static_cast<double>(col.size()));
    }
    return out;
}

double elbow_detect(std::span<const double> x, std::span<const double> f, int smooth_window) {
    if (x.size() != f.size()) throw DataError("elbow_detect: x and f lengths differ");
    if (x.size() < 5) throw DataError("elbow_detect: need at least 5 samples");
    if (smooth_window < 1 || smooth_window % 2 == 0) throw DomainError("elbow_detect: smoothing window must be odd");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (!(x[i] > x[i - 1])) throw DataError("elbow_detect: x must be strictly increasing");
    const std::size_t n = x.size();
    const std::size_t h = static_cast<std::size_t>(smooth_window / 2);
    if (n < 2 * h + 3) throw DataError("elbow_detect: too few samples for the smoothing window");
    std::vector<double> g(n, 0.0);
    for (std::size_t i = h; i + h < n; ++i) {
        double s = 0;
        for (std::size_t j = i - h; j <= i + h; ++j) s += f[j];
        g[i] = s / static_cast<double>(smooth_window);
    }
    const auto [fmin, fmax] = std::minmax_element(f.begin(), f.end());
    const double scale = (*fmax - *fmin) / ((x[n - 1] - x[0]) * (x[n - 1] - x[0]));
    std::vector<double> kappa(n, -1.0);
    double best = 0.0;
    for (std::size_t i = h + 1; i + h + 1 < n; ++i) {
        const double d1 = (g[i + 1] - g[i - 1]) / (x[i + 1] - x[i - 1]);
        const double d2 = 2.0 * ((g[i + 1] - g[i]) / (x[i + 1] - x[i]) - (g[i] - g[i - 1]) / (x[i] - x[i - 1])) /
                          (x[i + 1] - x[i - 1]);
        kappa[i] = std::abs(d2) / std::pow(1.0 + d1 * d1, 1.5);
        best = std::max(best, kappa[i]);
    }
    if (!(best > 1e-8 * scale) || best == 0.0) throw EstimatorError("no elbow");
    std::size_t lo = n, hi = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (kappa[i] >= best * (1.0 - 1e-9)) {
            lo = std::min(lo, i);
            hi = std::max(hi, i);
        }
    return 0.5 * (x[lo] + x[hi]);
}

}  // namespace liqrec::econ
