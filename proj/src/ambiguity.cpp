#include "liqrec/ambiguity.hpp"

#include "liqrec/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace liqrec {

void Preferences::validate() const {
    if (!(gamma_r > 0.0) || gamma_r == 1.0) throw DomainError("preferences: gamma_r must be > 0 and != 1");
    if (!(delta_d > 0.0)) throw DomainError("preferences: delta_d must be > 0");
    if (!(psi_amb > 0.0)) throw DomainError("preferences: psi_amb must be > 0");
    if (!(a_scale > 0.0)) throw DomainError("preferences: a_scale must be > 0");
}

void JumpAsset::validate() const {
    if (!std::isfinite(mu)) throw DomainError("asset: mu must be finite");
    if (!(sigma > 0.0)) throw DomainError("asset: sigma must be > 0");
    if (!(lambda_jump >= 0.0)) throw DomainError("asset: lambda_jump must be >= 0");
    if (!(loss_l > 0.0 && loss_l <= 1.0)) throw DomainError("asset: loss_l must lie in (0,1]");
}

namespace {

double crra(double w, const Preferences& p) {
    return p.a_scale * std::pow(w, 1.0 - p.gamma_r) / (1.0 - p.gamma_r);
}

double crra_marginal(double w, const Preferences& p) { return p.a_scale * std::pow(w, -p.gamma_r); }

void check_exposure(double wl) {
    if (!(wl >= 0.0 && wl < 1.0)) throw DomainError("exposure w*L must lie in [0,1)");
}

}  // namespace

double concavity_gap(double wealth, double exposure, const Preferences& prefs) {
    if (!(wealth > 0.0)) throw DomainError("concavity_gap: wealth must be > 0");
    check_exposure(exposure);
    return crra(wealth, prefs) - crra(wealth * (1.0 - exposure), prefs) -
           exposure * crra_marginal(wealth, prefs) * wealth;
}

double log_worst_case_distortion(double w, const Preferences& prefs, const JumpAsset& asset) {
    const double wl = w * asset.loss_l;
    check_exposure(wl);
    return (crra(1.0, prefs) - crra(1.0 - wl, prefs) + wl * crra_marginal(1.0, prefs)) / prefs.psi_amb;
}

double worst_case_distortion(double w, const Preferences& prefs, const JumpAsset& asset) {
    return std::exp(log_worst_case_distortion(w, prefs, asset));
}

double weight_foc(double w, const Preferences& prefs, const JumpAsset& asset) {
    const double wl = w * asset.loss_l;
    check_exposure(wl);
    const double jump = asset.lambda_jump == 0.0
                            ? 0.0
                            : asset.lambda_jump * worst_case_distortion(w, prefs, asset) * asset.loss_l *
                                  (std::pow(1.0 - wl, -prefs.gamma_r) - 1.0);
    return asset.mu - prefs.gamma_r * w * asset.sigma * asset.sigma - jump;
}

RobustSolution optimal_weight(const Preferences& prefs, const JumpAsset& asset, const SolverOptions& opt) {
    prefs.validate();
    asset.validate();

    auto finish = [&](double w) {
        RobustSolution s;
        s.w_star = w;
        s.xi_star = worst_case_distortion(w, prefs, asset);
        s.eta_implied = eta_from_distortion(s.xi_star);
        s.foc_residual = std::abs(weight_foc(w, prefs, asset));
        return s;
    };

    if (asset.mu <= 0.0) {
        RobustSolution s = finish(0.0);
        s.corner = true;
        return s;
    }

    double lo = 0.0;
    double hi = std::min(1.0, (1.0 - opt.eps) / asset.loss_l);
    double f_hi = weight_foc(hi, prefs, asset);
    if (f_hi > 0.0) {
        RobustSolution s = finish(hi);
        s.saturated = true;
        return s;
    }
    // FOC(0) = mu > 0 and FOC(hi) <= 0: bracketed.
    double mid = 0.5 * (lo + hi);
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        mid = 0.5 * (lo + hi);
        const double f = weight_foc(mid, prefs, asset);
        if (std::isnan(f)) break;
        if (std::abs(f) < opt.tol && hi - lo < opt.tol) break;
        if (f > 0.0) lo = mid;
        else hi = mid;
        if (hi - lo < 1e-15) break;
    }
    const double f_mid = weight_foc(mid, prefs, asset);
    if (std::isnan(f_mid) || (std::abs(f_mid) > 1e-6 && it >= opt.max_iter)) {
        std::ostringstream os;
        os << "optimal_weight: bisection failed (w=" << mid << ", foc=" << f_mid << ", iterations=" << it
           << ", bracket=[" << lo << "," << hi << "])";
        throw EstimatorError(os.str());
    }
    if (mid < opt.min_position) {
        RobustSolution s = finish(0.0);
        s.corner = true;
        s.foc_residual = std::abs(f_mid);
        return s;
    }
    return finish(mid);
}

double eta_from_distortion(double xi_star) {
    if (!(xi_star > 0.0)) throw DomainError("eta_from_distortion: xi* must be > 0");
    return xi_star;
}

}  // namespace liqrec
