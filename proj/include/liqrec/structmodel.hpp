#pragma once

#include "liqrec/date.hpp"
#include "liqrec/panel.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace liqrec {

struct StructuralParams {
    double kappa = 1.69e-8;        // per USD of loss
    double phi0 = 9.0;             // Gwei
    double phi1 = 206.0;           // Gwei
    double gamma_c = 2.0;
    double rho0 = 0.0;             // fractions of stablecoin float
    double rho1 = 0.002;
    double rho2 = 0.0020985;
    double psi = 0.002;            // per Gwei
    double omega_bar = 0.65916;
    double eta = 3.73;
    double lambda_price = 1.0;     // bps per $100M

    // Throws DomainError on the first violated invariant.
    void validate() const;
    friend bool operator==(const StructuralParams&, const StructuralParams&) = default;
};

struct NetworkState {
    double intensity = 0.0;        // USD loss
    double availability = 1.0;
    double friction = 0.0;         // Gwei
};

struct FlowState {
    double crypto_return = 0.0;
    double demand = 0.0;           // R^d
    double net_redemption = 0.0;   // R
    double net_supply = 0.0;       // (1 - eta) R
    double spread_change = 0.0;    // bps
};

double availability(double intensity, double kappa);
double friction(double omega, double phi0, double phi1, double gamma_c);
double redemption_demand(double crypto_return, double omega, const StructuralParams& p);
double net_redemption(double demand, double friction_gwei, double psi);
// R in the units lambda_price is quoted in ($100M when lambda is bps/$100M).
double spread_change(double r, double eta, double lambda_price);

NetworkState network_state(double intensity, const StructuralParams& p);
// Full Sector I-III chain for one day; R is converted to $100M units with float_usd.
FlowState flow_state(const NetworkState& net, double crypto_return, const StructuralParams& p,
                     double float_usd);

struct NoiseConfig {
    double spread_sd = 1.0;          // bps, additive on the observed level
    double baseline_spread = 12.34;  // bps
    double float_usd = 130e9;
    double flow_sd_usd = 20e6;       // noise on observed net redemptions
    int settlement_lag = 1;          // days between R_t and its observed USD flow
};

// Per-day structural trace plus the observed columns
// (cp_spread_bps, gas_gwei, btc_return, net_redemption_usd, spread_change_bps).
struct SimulatedPath {
    MarketPanel panel;
    std::vector<NetworkState> network;
    std::vector<FlowState> flows;
    std::vector<double> structural_spread;   // baseline + cumulative ΔSpread, no noise
};

// shocks and crypto returns are per-day and must both match the calendar length.
SimulatedPath simulate_path(const Calendar& calendar, std::span<const double> shocks_usd,
                            std::span<const double> crypto_returns, const StructuralParams& p,
                            const NoiseConfig& noise, std::uint64_t seed);

}  // namespace liqrec
