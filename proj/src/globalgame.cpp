#include "liqrec/globalgame.hpp"

#include "liqrec/error.hpp"

#include <algorithm>
#include <cmath>

namespace liqrec {

void GameParams::validate() const {
    if (!(phi0_g >= 0.0)) throw DomainError("game: phi0_g must be >= 0");
    if (!(gamma_g >= 0.0)) throw DomainError("game: gamma_g must be >= 0");
    if (!(lambda_g >= 1.0)) throw DomainError("game: lambda_g must be >= 1");
    if (!(ambiguity_a >= 1.0)) throw DomainError("game: ambiguity_a must be >= 1");
}

namespace {

// Fritsch-Carlson derivative estimates for a monotone interpolant.
std::vector<double> pchip_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), del(n - 1), d(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        del[i] = (y[i + 1] - y[i]) / h[i];
    }
    if (n == 2) {
        d[0] = d[1] = del[0];
        return d;
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (del[i - 1] * del[i] <= 0.0) continue;
        const double w1 = 2 * h[i] + h[i - 1], w2 = h[i] + 2 * h[i - 1];
        d[i] = (w1 + w2) / (w1 / del[i - 1] + w2 / del[i]);
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double s = ((2 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (s * d0 <= 0.0) return 0.0;
        if (d0 * d1 <= 0.0 && std::abs(s) > std::abs(3 * d0)) return 3 * d0;
        return s;
    };
    d[0] = end_slope(h[0], h[1], del[0], del[1]);
    d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
    return d;
}

double hermite(const std::vector<double>& x, const std::vector<double>& y, const std::vector<double>& d,
               double t) {
    auto it = std::upper_bound(x.begin(), x.end(), t);
    std::size_t i = it == x.begin() ? 0 : static_cast<std::size_t>(it - x.begin()) - 1;
    i = std::min(i, x.size() - 2);
    const double h = x[i + 1] - x[i];
    const double s = (t - x[i]) / h;
    const double h00 = (1 + 2 * s) * (1 - s) * (1 - s), h10 = s * (1 - s) * (1 - s);
    const double h01 = s * s * (3 - 2 * s), h11 = s * s * (s - 1);
    return h00 * y[i] + h10 * h * d[i] + h01 * y[i + 1] + h11 * h * d[i + 1];
}

}  // namespace

TabulatedDistortion::TabulatedDistortion(std::vector<double> p, std::vector<double> psi)
    : p_(std::move(p)), psi_(std::move(psi)) {
    if (p_.size() != psi_.size() || p_.size() < 2) throw DomainError("distortion table needs >= 2 matched knots");
    for (std::size_t i = 0; i < p_.size(); ++i) {
        if (p_[i] < 0.0 || p_[i] > 1.0 || psi_[i] < 0.0 || psi_[i] > 1.0)
            throw DomainError("distortion table knots must lie in [0,1]");
        if (i > 0 && (p_[i] <= p_[i - 1] || psi_[i] <= psi_[i - 1]))
            throw DomainError("distortion table must be strictly increasing");
    }
    d_inv_ = pchip_slopes(psi_, p_);
}

double TabulatedDistortion::operator()(double p) const {
    return std::clamp(hermite(p_, psi_, pchip_slopes(p_, psi_), p), 0.0, 1.0);
}

double TabulatedDistortion::inverse(double q) const {
    if (q <= psi_.front()) return p_.front();
    if (q >= psi_.back()) return p_.back();
    return hermite(psi_, p_, d_inv_, q);
}

double avg_congestion(const GameParams& g) { return g.phi0_g + g.gamma_g / (g.lambda_g + 1.0); }

double run_threshold(double c_bar) {
    if (!(c_bar >= 0.0 && c_bar <= 1.0)) throw DomainError("run_threshold: C-bar outside [0,1]");
    return 1.0 - c_bar;
}

double ambiguous_threshold(double c_bar, double ambiguity_a) {
    if (!(c_bar >= 0.0 && c_bar < 1.0)) throw DomainError("ambiguous_threshold: C-bar outside [0,1)");
    if (!(ambiguity_a >= 1.0)) throw DomainError("ambiguous_threshold: a must be >= 1");
    return std::pow(1.0 - c_bar, 1.0 / ambiguity_a);
}

double ambiguous_threshold(double c_bar, const TabulatedDistortion& psi) {
    if (!(c_bar >= 0.0 && c_bar < 1.0)) throw DomainError("ambiguous_threshold: C-bar outside [0,1)");
    return psi.inverse(1.0 - c_bar);
}

double gas_threshold(double theta_amb, const GasMap& map) { return map.m * (1.0 - theta_amb) + map.b; }

}  // namespace liqrec
