#pragma once

namespace liqrec {

struct Preferences {
    double gamma_r = 2.0;     // relative risk aversion, != 1
    double delta_d = 0.02;    // discount rate; does not enter the stationary FOC
    double psi_amb = 1.5;     // ambiguity tolerance
    double a_scale = 1.0;     // CRRA constant A

    void validate() const;
};

struct JumpAsset {
    double mu = 0.04;
    double sigma = 0.2;
    double lambda_jump = 0.5;
    double loss_l = 0.5;

    void validate() const;
};

struct RobustSolution {
    double xi_star = 1.0;
    double w_star = 0.0;
    double eta_implied = 1.0;
    double foc_residual = 0.0;
    bool corner = false;       // w* = 0 regime
    bool saturated = false;    // FOC still positive at the bracket cap
};

struct SolverOptions {
    double tol = 1e-10;        // on the FOC value and on the bracket width
    int max_iter = 500;
    double eps = 1e-9;         // keeps w*L strictly below one
    // Positions below this are reported as the exit corner. With mu > 0 the
    // FOC is positive at w = 0, so an exact zero never solves it.
    double min_position = 1e-6;
};

// J(W) - J(W(1-wL)) - wL*J_W(W)*W for CRRA J.
double concavity_gap(double wealth, double exposure, const Preferences& prefs);
double log_worst_case_distortion(double w, const Preferences& prefs, const JumpAsset& asset);
double worst_case_distortion(double w, const Preferences& prefs, const JumpAsset& asset);
// mu - gamma*w*sigma^2 - lambda*xi*(w)*L*[(1-wL)^-gamma - 1]
double weight_foc(double w, const Preferences& prefs, const JumpAsset& asset);
RobustSolution optimal_weight(const Preferences& prefs, const JumpAsset& asset,
                              const SolverOptions& opt = {});
double eta_from_distortion(double xi_star);

}  // namespace liqrec
