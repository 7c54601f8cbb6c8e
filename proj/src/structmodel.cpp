#include "liqrec/structmodel.hpp"

#include "liqrec/error.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace liqrec {

void StructuralParams::validate() const {
    auto need = [](bool ok, const char* what) {
        if (!ok) throw DomainError(std::string("structural parameters: ") + what);
    };
    need(std::isfinite(kappa) && kappa >= 0.0, "kappa must be >= 0");
    need(std::isfinite(phi0) && phi0 >= 0.0, "phi0 must be >= 0");
    need(phi1 > 0.0, "phi1 must be > 0");
    need(gamma_c >= 1.0, "gamma_c must be >= 1");
    need(psi > 0.0, "psi must be > 0");
    need(omega_bar > 0.0 && omega_bar < 1.0, "omega_bar must lie in (0,1)");
    need(lambda_price > 0.0, "lambda_price must be > 0");
    need(rho2 >= 0.0, "rho2 must be >= 0");
    need(std::isfinite(eta) && std::isfinite(rho0) && std::isfinite(rho1), "non-finite coefficient");
}

double availability(double intensity, double kappa) {
    if (!(intensity >= 0.0)) throw DomainError("availability: intensity must be >= 0");
    if (!(kappa >= 0.0)) throw DomainError("availability: kappa must be >= 0");
    return std::clamp(1.0 - kappa * intensity, 0.0, 1.0);
}

double friction(double omega, double phi0, double phi1, double gamma_c) {
    if (!(omega >= 0.0 && omega <= 1.0)) throw DomainError("friction: availability outside [0,1]");
    return phi0 + phi1 * std::pow(1.0 - omega, gamma_c);
}

double redemption_demand(double crypto_return, double omega, const StructuralParams& p) {
    const double panic = omega < p.omega_bar ? 1.0 : 0.0;
    return p.rho0 + p.rho1 * (-crypto_return) + p.rho2 * panic;
}

double net_redemption(double demand, double friction_gwei, double psi) {
    return demand / (1.0 + psi * friction_gwei);
}

double spread_change(double r, double eta, double lambda_price) {
    if (!(lambda_price > 0.0)) throw DomainError("spread_change: lambda_price must be > 0");
    return lambda_price * (1.0 - eta) * r;
}

NetworkState network_state(double intensity, const StructuralParams& p) {
    NetworkState s;
    s.intensity = intensity;
    s.availability = availability(intensity, p.kappa);
    s.friction = friction(s.availability, p.phi0, p.phi1, p.gamma_c);
    return s;
}

FlowState flow_state(const NetworkState& net, double crypto_return, const StructuralParams& p,
                     double float_usd) {
    FlowState f;
    f.crypto_return = crypto_return;
    f.demand = redemption_demand(crypto_return, net.availability, p);
    f.net_redemption = net_redemption(f.demand, net.friction, p.psi);
    f.net_supply = (1.0 - p.eta) * f.net_redemption;
    f.spread_change = spread_change(f.net_redemption * float_usd / 1e8, p.eta, p.lambda_price);
    return f;
}

SimulatedPath simulate_path(const Calendar& calendar, std::span<const double> shocks_usd,
                            std::span<const double> crypto_returns, const StructuralParams& p,
                            const NoiseConfig& noise, std::uint64_t seed) {
    const std::size_t n = calendar.size();
    if (shocks_usd.size() != n || crypto_returns.size() != n)
        throw AlignmentError("simulate_path: shock (" + std::to_string(shocks_usd.size()) +
                             ") and return (" + std::to_string(crypto_returns.size()) +
                             ") series do not match the calendar (" + std::to_string(n) + ")");
    if (noise.spread_sd < 0.0 || noise.flow_sd_usd < 0.0 || noise.settlement_lag < 0)
        throw DomainError("simulate_path: negative noise setting");
    p.validate();

    SimulatedPath out;
    out.panel = MarketPanel(calendar.days());
    out.network.reserve(n);
    out.flows.reserve(n);
    out.structural_spread.resize(n);

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> z(0.0, 1.0);

    std::vector<double> spread(n), gas(n), dspread(n), flow_usd(n), rets(n);
    double level = noise.baseline_spread;
    for (std::size_t t = 0; t < n; ++t) {
        const NetworkState net = network_state(shocks_usd[t], p);
        const FlowState f = flow_state(net, crypto_returns[t], p, noise.float_usd);
        out.network.push_back(net);
        out.flows.push_back(f);
        level += f.spread_change;
        out.structural_spread[t] = level;
        dspread[t] = f.spread_change;
        gas[t] = net.friction;
        rets[t] = crypto_returns[t];
    }
    // Draw order is fixed: all spread noise first, then all flow noise.
    for (std::size_t t = 0; t < n; ++t) spread[t] = out.structural_spread[t] + noise.spread_sd * z(rng);
    const auto lag = static_cast<std::size_t>(noise.settlement_lag);
    for (std::size_t t = 0; t < n; ++t) {
        const double settled = t >= lag ? out.flows[t - lag].net_redemption * noise.float_usd : 0.0;
        flow_usd[t] = settled + noise.flow_sd_usd * z(rng);
    }

    out.panel.set_column("cp_spread_bps", std::move(spread));
    out.panel.set_column("gas_gwei", std::move(gas));
    out.panel.set_column("btc_return", std::move(rets));
    out.panel.set_column("net_redemption_usd", std::move(flow_usd));
    out.panel.set_column("spread_change_bps", std::move(dspread));
    return out;
}

}  // namespace liqrec
