#pragma once

#include <Eigen/Dense>

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace liqrec::econ {

enum class SeKind { classical, hc0, hc1, hc3, cluster, newey_west };

struct SeSpec {
    SeKind kind = SeKind::classical;
    std::vector<long> cluster;      // one key per row for SeKind::cluster
    std::string cluster_name;
    int lag = 0;                    // Newey-West bandwidth; rows must be in time order

    static SeSpec classical() { return {}; }
    static SeSpec hc(SeKind k) { return {k, {}, {}, 0}; }
    static SeSpec clustered(std::vector<long> keys, std::string name) {
        return {SeKind::cluster, std::move(keys), std::move(name), 0};
    }
    static SeSpec newey_west(int lag) { return {SeKind::newey_west, {}, {}, lag}; }
    std::string label() const;
};

struct JointTest {
    std::string name;
    double f = 0.0;
    int df1 = 0;
    int df2 = 0;
    double p = 1.0;
};

struct RegressionResult {
    std::vector<std::string> names;
    Eigen::VectorXd coef;
    Eigen::MatrixXd vcov;
    std::string se_flavor;
    int n_obs = 0;
    int n_params = 0;          // regressors + absorbed fixed-effect levels
    int n_absorbed = 0;
    int n_clusters = 0;
    int df_resid = 0;          // degrees of freedom used for t and F references
    double r2 = 0.0;
    double adj_r2 = 0.0;
    double within_r2 = 0.0;
    double ssr = 0.0;
    Eigen::VectorXd residuals;
    std::vector<JointTest> tests;
    std::vector<std::string> warnings;

    std::size_t size() const { return names.size(); }
    // Throws EstimatorError for unknown names.
    std::size_t index(const std::string& name) const;
    double b(const std::string& name) const { return coef(static_cast<Eigen::Index>(index(name))); }
    double se(std::size_t i) const;
    double se(const std::string& name) const { return se(index(name)); }
    double t(std::size_t i) const { return coef(static_cast<Eigen::Index>(i)) / se(i); }
    double p(std::size_t i) const;
    std::pair<double, double> ci(std::size_t i, double level = 0.95) const;
    const JointTest* test(const std::string& name) const;
};

struct OlsOptions {
    bool intercept = true;          // ignored when fixed effects are absorbed
    double collinear_tol = 1e-10;
};

// Within estimator: each vector in `fixed_effects` is one FE key per row and
// is absorbed by alternating projections.
RegressionResult ols(const Eigen::MatrixXd& x, const std::vector<std::string>& names, const Eigen::VectorXd& y,
                     const std::vector<std::vector<long>>& fixed_effects, const SeSpec& se,
                     const OlsOptions& opt = {});

// Bartlett HAC covariance (X'X)^-1 S (X'X)^-1 with no small-sample factor.
Eigen::MatrixXd newey_west(const Eigen::VectorXd& residuals, const Eigen::MatrixXd& design, int lag);

// Wald F for H0: coef[idx] = 0, using the result's covariance and df.
JointTest wald_test(const RegressionResult& r, std::span<const std::size_t> idx, const std::string& name);

// Removes fixed-effect means from every column of m in place. Returns the
// number of absorbed levels net of redundancies between the FE dimensions.
int absorb_fixed_effects(Eigen::MatrixXd& m, const std::vector<std::vector<long>>& fixed_effects);

// Names of columns that are (numerically) linear combinations of earlier ones.
std::vector<std::size_t> collinear_columns(const Eigen::MatrixXd& x, double tol = 1e-10);

double student_t_two_sided_p(double t, double df);
double student_t_quantile(double prob, double df);
double f_upper_p(double f, double df1, double df2);
double normal_cdf(double z);
double chi2_upper_p(double x, double df);

}  // namespace liqrec::econ
