#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace liqrec::econ {

struct GbrConfig {
    int n_trees = 200;
    int max_depth = 2;
    double learning_rate = 0.1;
    int min_samples_leaf = 5;
    double winsor_pct = 5.0;      // target clipped at [p, 100-p]; 0 disables
};

struct GbrNode {
    int feature = -1;             // -1 = leaf
    double threshold = 0.0;       // x <= threshold goes left
    int left = -1, right = -1;
    double value = 0.0;
};

struct GbrTree {
    std::vector<GbrNode> nodes;
    double predict(std::span<const double> row) const;
};

struct GbrModel {
    std::vector<std::string> names;
    double base = 0.0;
    double learning_rate = 0.1;
    std::vector<GbrTree> trees;
    std::vector<double> importance;   // impurity-reduction shares; all zero without trees
    std::vector<std::string> warnings;

    double predict(std::span<const double> row) const;
};

// features: one column per feature. Split ties go to the lower threshold
// (and to the earlier feature), so fits are deterministic.
GbrModel fit_gbr(const std::vector<std::string>& names, const std::vector<std::vector<double>>& features,
                 const std::vector<double>& target, const GbrConfig& cfg = {});

struct PartialResponse {
    std::vector<double> x;
    std::vector<double> f;
};

// Mean prediction with `feature` set to each grid value. An empty grid uses
// n_points evenly spaced between the 5th and 95th percentiles of the feature.
PartialResponse partial_response(const GbrModel& m, const std::vector<std::vector<double>>& features,
                                 std::size_t feature, std::vector<double> grid = {}, int n_points = 100);

// Point of maximum discrete curvature |f''|/(1+f'^2)^{3/2} after a centered
// moving average of `smooth_window` points. Exact ties return the midpoint
// of the tied span. Throws EstimatorError("no elbow") when the curve has no
// curvature.
double elbow_detect(std::span<const double> x, std::span<const double> f, int smooth_window = 3);

}  // namespace liqrec::econ
