#include "liqrec/econ/lp.hpp"

#include "liqrec/error.hpp"

namespace liqrec::econ {

using Eigen::Index;

std::vector<RegressionResult> local_projections(const std::vector<double>& y, const std::vector<double>& shock,
                                                const std::vector<std::vector<double>>& controls,
                                                const LpOptions& opt) {
    const long n = static_cast<long>(y.size());
    if (shock.size() != y.size()) throw DataError("local_projections: shock and outcome lengths differ");
    if (controls.size() != opt.control_names.size()) throw DataError("local_projections: control names do not match");
    for (const auto& c : controls)
        if (c.size() != y.size()) throw DataError("local_projections: control length differs from the outcome");
    if (opt.horizons < 0 || opt.outcome_lags < 0) throw DomainError("local_projections: negative horizon or lag count");
    if (opt.horizons >= n) throw DataError("local_projections: horizon must be shorter than the series");

    std::vector<std::string> names{"shock"};
    for (int l = 1; l <= opt.outcome_lags; ++l) names.push_back("dy_lag" + std::to_string(l));
    for (const auto& c : opt.control_names) names.push_back(c + "_lag1");

    const long first = std::max<long>(1, opt.outcome_lags + 1);
    std::vector<RegressionResult> out;
    for (int h = 0; h <= opt.horizons; ++h) {
        const long last = n - 1 - h;
        const long rows = last - first + 1;
        if (rows <= static_cast<long>(names.size()) + 1 || rows <= h + 1)
            throw DataError("local_projections: not enough observations for horizon " + std::to_string(h));
        Eigen::MatrixXd x(rows, static_cast<Index>(names.size()));
        Eigen::VectorXd dep(rows);
        for (long t = first; t <= last; ++t) {
            const Index r = t - first;
            const auto u = static_cast<std::size_t>(t);
            dep(r) = y[u + static_cast<std::size_t>(h)] - y[u - 1];
            x(r, 0) = shock[u];
            Index c = 1;
            for (int l = 1; l <= opt.outcome_lags; ++l) x(r, c++) = y[u - l] - y[u - l - 1];
            for (const auto& col : controls) x(r, c++) = col[u - 1];
        }
        auto res = ols(x, names, dep, {}, SeSpec::newey_west(h + 1));
        out.push_back(std::move(res));
    }
    return out;
}

}  // namespace liqrec::econ
