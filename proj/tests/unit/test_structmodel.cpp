#include <doctest.h>

#include "liqrec/error.hpp"
#include "liqrec/structmodel.hpp"

#include <cmath>
#include <vector>

using namespace liqrec;

TEST_CASE("availability") {
    CHECK(availability(0.0, 5.0) == 1.0);
    CHECK(availability(100.0, 0.002) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(availability(150.0, 0.01) == 0.0);
    CHECK_THROWS_AS(availability(-1.0, 0.1), DomainError);
    CHECK_THROWS_AS(availability(1.0, -0.1), DomainError);
}

TEST_CASE("friction") {
    CHECK(friction(1.0, 7.0, 200.0, 2.0) == 7.0);
    CHECK(friction(0.5, 10.0, 200.0, 2.0) == doctest::Approx(60.0).epsilon(1e-15));
    CHECK(friction(0.25, 0.0, 1.0, 1.0) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK_THROWS_AS(friction(1.1, 0, 1, 1), DomainError);
    CHECK_THROWS_AS(friction(-0.1, 0, 1, 1), DomainError);
}

TEST_CASE("redemption demand and the strict panic indicator") {
    StructuralParams p;
    p.rho0 = 0.01;
    p.rho1 = 0.5;
    p.rho2 = 0.0;
    p.omega_bar = 0.8;
    CHECK(redemption_demand(-0.04, 0.9, p) == doctest::Approx(0.03).epsilon(1e-14));
    p.rho2 = 0.2;
    CHECK(redemption_demand(-0.04, 0.7, p) == doctest::Approx(0.23).epsilon(1e-14));
    // tie is the insensitive regime
    CHECK(redemption_demand(-0.04, 0.8, p) == doctest::Approx(0.03).epsilon(1e-14));
    p.rho0 = p.rho1 = p.rho2 = 0.0;
    CHECK(redemption_demand(0.3, 0.1, p) == 0.0);
}

TEST_CASE("net redemption and spread change") {
    CHECK(net_redemption(0.23, 60.0, 0.01) == doctest::Approx(0.14375).epsilon(1e-14));
    CHECK(net_redemption(0.23, 0.0, 0.01) == 0.23);
    CHECK(net_redemption(0.0, 60.0, 0.01) == 0.0);
    CHECK(spread_change(1.0, 3.73, 1.0) == doctest::Approx(-2.73).epsilon(1e-15));
    CHECK(spread_change(5.0, 1.0, 2.0) == 0.0);
    CHECK(spread_change(2.0, 0.0, 1.0) == 2.0);
    CHECK_THROWS_AS(spread_change(1.0, 2.0, 0.0), DomainError);
}

TEST_CASE("parameter validation") {
    StructuralParams p;
    CHECK_NOTHROW(p.validate());
    auto bad = p;
    bad.gamma_c = 0.5;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = p;
    bad.omega_bar = 1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
    bad = p;
    bad.rho2 = -1.0;
    CHECK_THROWS_AS(bad.validate(), DomainError);
}

TEST_CASE("friction is monotone in attack intensity") {
    StructuralParams p;
    double prev = -1.0;
    for (int i = 0; i <= 200; ++i) {
        const double loss = i * 1e6;
        const double phi = network_state(loss, p).friction;
        if (1.0 - p.kappa * loss > 0.0 && i > 0) CHECK(phi > prev);
        else CHECK(phi >= prev);
        prev = phi;
    }
}

TEST_CASE("sign law holds on a grid") {
    for (double eta : {-1.0, 0.0, 0.5, 1.0, 1.5, 3.73}) {
        for (double r : {-2.0, -1e-3, 0.0, 1e-3, 2.0}) {
            const double ds = spread_change(r, eta, 1.3);
            const int want = ((1.0 - eta) > 0) - ((1.0 - eta) < 0);
            const int rs = (r > 0) - (r < 0);
            CHECK(((ds > 0) - (ds < 0)) == want * rs);
        }
    }
}

namespace {

Calendar test_calendar() { return Calendar::weekdays(Date(2022, 1, 3), Date(2022, 2, 25)); }

}  // namespace

TEST_CASE("simulate_path: null path is flat at baseline") {
    const auto cal = test_calendar();
    std::vector<double> zeros(cal.size(), 0.0);
    NoiseConfig nc;
    nc.spread_sd = 0.0;
    nc.flow_sd_usd = 0.0;
    StructuralParams p;
    p.rho0 = 0.0;
    const auto path = simulate_path(cal, zeros, zeros, p, nc, 7);
    for (double s : path.panel.column("cp_spread_bps")) CHECK(s == nc.baseline_spread);
    for (double f : path.panel.column("net_redemption_usd")) CHECK(f == 0.0);
}

TEST_CASE("simulate_path: one shock steps the spread down on that day only") {
    const auto cal = test_calendar();
    std::vector<double> shocks(cal.size(), 0.0), rets(cal.size(), 0.0);
    shocks[10] = 3e7;
    NoiseConfig nc;
    nc.spread_sd = 0.0;
    nc.flow_sd_usd = 0.0;
    StructuralParams p;
    const auto path = simulate_path(cal, shocks, rets, p, nc, 1);
    const auto& s = path.panel.column("cp_spread_bps");
    // hand chain for the shocked day
    const double omega = 1.0 - p.kappa * 3e7;
    const double phi = p.phi0 + p.phi1 * std::pow(1.0 - omega, 2.0);
    const double rd = omega < p.omega_bar ? p.rho2 : 0.0;
    const double step = p.lambda_price * (1.0 - p.eta) * rd / (1.0 + p.psi * phi) * nc.float_usd / 1e8;
    CHECK(step < 0.0);
    for (std::size_t t = 0; t < cal.size(); ++t) {
        if (t < 10) CHECK(s[t] == nc.baseline_spread);
        else CHECK(s[t] == doctest::Approx(nc.baseline_spread + step).epsilon(1e-13));
    }
    CHECK(path.network[10].friction == doctest::Approx(phi));
    CHECK(path.panel.column("gas_gwei")[10] == doctest::Approx(phi));
    // settlement lag: flow shows up the following day
    CHECK(path.panel.column("net_redemption_usd")[10] == 0.0);
    CHECK(path.panel.column("net_redemption_usd")[11] ==
          doctest::Approx(path.flows[10].net_redemption * nc.float_usd));
}

TEST_CASE("simulate_path: determinism and alignment errors") {
    const auto cal = test_calendar();
    std::vector<double> shocks(cal.size(), 0.0), rets(cal.size(), 0.01);
    shocks[3] = 1e8;
    const auto a = simulate_path(cal, shocks, rets, StructuralParams{}, NoiseConfig{}, 99);
    const auto b = simulate_path(cal, shocks, rets, StructuralParams{}, NoiseConfig{}, 99);
    CHECK(a.panel == b.panel);
    const auto c = simulate_path(cal, shocks, rets, StructuralParams{}, NoiseConfig{}, 100);
    CHECK_FALSE(a.panel == c.panel);
    std::vector<double> short_rets(cal.size() - 1, 0.0);
    CHECK_THROWS_AS(simulate_path(cal, shocks, short_rets, StructuralParams{}, NoiseConfig{}, 1),
                    AlignmentError);
}
