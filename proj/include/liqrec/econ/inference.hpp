#pragma once

#include "liqrec/econ/linear.hpp"
#include "liqrec/panel.hpp"

#include <span>
#include <vector>

namespace liqrec::econ {

struct WelchResult {
    double diff = 0.0;   // mean(a) - mean(b)
    double se = 0.0;
    double t = 0.0;
    double df = 0.0;     // Welch-Satterthwaite
    double p = 1.0;
};

WelchResult welch_diff_means(std::span<const double> a, std::span<const double> b);

enum class MonthlySpec { level, change };

// Spread_m (or its change) on hack_month, pcs_z, their product and the
// monthly controls, Newey-West with one lag. Rows must be in month order.
RegressionResult state_dependence_monthly(const MonthlyPanel& monthly, MonthlySpec spec);

struct EtaRow {
    double lambda = 1.0;
    double eta = 1.0;
    double se = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
};

// eta = 1 - beta/lambda, SE = SE(beta)/lambda, CI = eta +- 1.96 SE.
std::vector<EtaRow> eta_recovery(double beta_bps, double se_beta, std::span<const double> lambdas);
inline constexpr double kDefaultLambdaGrid[] = {0.5, 0.75, 1.0, 1.25, 1.5, 2.0};

// One-sample Kolmogorov-Smirnov test against U(0,1): statistic and
// asymptotic p-value (Stephens' small-sample correction).
std::pair<double, double> ks_uniform(std::vector<double> values);

}  // namespace liqrec::econ
