#include <doctest.h>

#include "liqrec/ambiguity.hpp"
#include "liqrec/error.hpp"

#include <cmath>

using namespace liqrec;

namespace {

Preferences prefs(double psi, double gamma = 2.0) {
    Preferences p;
    p.gamma_r = gamma;
    p.psi_amb = psi;
    p.a_scale = 1.0;
    return p;
}

}  // namespace

TEST_CASE("concavity gap") {
    CHECK(concavity_gap(1.0, 0.0, prefs(1.5)) == 0.0);
    CHECK(concavity_gap(1.0, 0.5, prefs(1.5)) == doctest::Approx(0.5).epsilon(1e-15));
    for (double g : {0.5, 2.0, 3.5, 7.0})
        for (double wl : {0.01, 0.3, 0.9}) CHECK(concavity_gap(1.0, wl, prefs(1.0, g)) > 0.0);
    CHECK_THROWS_AS(concavity_gap(1.0, 1.0, prefs(1.5)), DomainError);
    CHECK_THROWS_AS(concavity_gap(0.0, 0.1, prefs(1.5)), DomainError);
}

TEST_CASE("worst-case distortion closed form") {
    JumpAsset a;
    a.loss_l = 0.5;
    CHECK(worst_case_distortion(0.0, prefs(1.5), a) == 1.0);
    CHECK(std::abs(worst_case_distortion(1.0, prefs(1.5), a) - std::exp(1.0)) < 1e-12);
    CHECK(std::abs(worst_case_distortion(0.7, prefs(1e12), a) - 1.0) < 1e-9);
}

TEST_CASE("both ln xi* forms agree") {
    for (double psi : {0.3, 1.5, 4.0})
        for (double g : {0.5, 2.0, 5.0})
            for (double wl : {0.1, 0.5, 0.8}) {
                const auto p = prefs(psi, g);
                JumpAsset a;
                a.loss_l = 1.0;
                const double closed = log_worst_case_distortion(wl, p, a);
                const double via_gap = (concavity_gap(1.0, wl, p) + 2.0 * wl * p.a_scale) / psi;
                CHECK(closed == doctest::Approx(via_gap).epsilon(1e-12));
            }
}

TEST_CASE("xi* monotone in psi and exposure") {
    JumpAsset a;
    a.loss_l = 1.0;
    for (int i = 1; i < 10; ++i)
        for (int j = 1; j < 10; ++j) {
            const double psi = 0.2 * i, wl = 0.09 * j;
            CHECK(worst_case_distortion(wl, prefs(psi + 0.2), a) < worst_case_distortion(wl, prefs(psi), a));
            CHECK(worst_case_distortion(wl + 0.01, prefs(psi), a) > worst_case_distortion(wl, prefs(psi), a));
        }
}

TEST_CASE("optimal weight: Merton limit, corner, fixture") {
    JumpAsset a;
    a.mu = 0.04;
    a.sigma = 0.2;
    a.lambda_jump = 0.0;
    auto s = optimal_weight(prefs(0.2), a);
    CHECK(std::abs(s.w_star - 0.5) < 1e-8);
    CHECK(s.foc_residual < 1e-9);

    a.mu = 0.0;
    s = optimal_weight(prefs(0.2), a);
    CHECK(s.corner);
    CHECK(s.w_star == 0.0);

    a.mu = 0.04;
    a.lambda_jump = 0.5;
    a.loss_l = 0.5;
    s = optimal_weight(prefs(0.2), a);
    CHECK(s.w_star < 0.5);
    CHECK(s.xi_star > 1.0);
    CHECK(s.foc_residual < 1e-9);
    // frozen from an independent root-finder
    CHECK(s.w_star == doctest::Approx(0.08236699151923527).epsilon(1e-9));
    CHECK(s.xi_star == doctest::Approx(1.52299625209667).epsilon(1e-9));
    CHECK(s.eta_implied == s.xi_star);
}

TEST_CASE("optimal weight increases with psi and exits for small psi") {
    JumpAsset a;
    a.mu = 0.04;
    a.sigma = 0.2;
    a.lambda_jump = 0.5;
    a.loss_l = 0.5;
    double prev = -1.0;
    for (double psi = 0.01; psi < 50.0; psi *= 1.5) {
        const auto s = optimal_weight(prefs(psi), a);
        CHECK(s.w_star >= prev);
        CHECK(s.w_star <= 0.5);
        prev = s.w_star;
    }
    bool corner = false;
    for (double psi = 1.0; psi > 1e-12 && !corner; psi /= 2.0) corner = optimal_weight(prefs(psi), a).corner;
    CHECK(corner);
}

TEST_CASE("saturation flag and validation") {
    JumpAsset a;
    a.mu = 5.0;
    a.sigma = 0.1;
    a.lambda_jump = 0.0;
    const auto s = optimal_weight(prefs(1.0), a);
    CHECK(s.saturated);
    CHECK(s.w_star == doctest::Approx(1.0));
    CHECK_THROWS_AS(optimal_weight(prefs(1.0, 1.0), a), DomainError);
    CHECK(eta_from_distortion(1.0) == 1.0);
    CHECK(eta_from_distortion(std::exp(1.0)) == doctest::Approx(2.718281828));
    CHECK_THROWS_AS(eta_from_distortion(0.0), DomainError);
}
