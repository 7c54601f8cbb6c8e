// Known-truth and deterministic checks; one PASS/FAIL line per criterion.
#include "liqrec/ambiguity.hpp"
#include "liqrec/cli/commands.hpp"
#include "liqrec/cli/config.hpp"
#include "liqrec/datagen.hpp"
#include "liqrec/econ/event.hpp"
#include "liqrec/econ/gbr.hpp"
#include "liqrec/econ/inference.hpp"
#include "liqrec/econ/iv.hpp"
#include "liqrec/econ/linear.hpp"
#include "liqrec/econ/threshold.hpp"
#include "liqrec/globalgame.hpp"
#include "liqrec/ingest.hpp"
#include "liqrec/structmodel.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

using namespace liqrec;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < budget_s;
    const bool ok = o.pass && in_time;
    if (!ok) ++failures;
    std::printf("%s [%2d] %s: %s (%.1fs of %.0fs%s)\n", ok ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs,
                budget_s, in_time ? "" : ", over budget");
    std::fflush(stdout);
}

const Calendar& sim_calendar() {
    static const Calendar cal = Calendar::weekdays(Date(2021, 1, 4), Date(2024, 12, 31));
    return cal;
}

int sgn(double v) { return (v > 0) - (v < 0); }

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// ---------------------------------------------------------------- 1
Outcome eta_table() {
    const double eta[] = {6.46, 4.64, 3.73, 3.18, 2.82, 2.37};
    const double se[] = {1.76, 1.17, 0.88, 0.70, 0.59, 0.44};
    const auto rows = econ::eta_recovery(-2.73, 0.88, econ::kDefaultLambdaGrid);
    if (rows.size() != 6) return {false, fmt("%zu rows", rows.size())};
    double worst = 0;
    for (std::size_t i = 0; i < 6; ++i)
        worst = std::max({worst, std::abs(rows[i].eta - eta[i]), std::abs(rows[i].se - se[i])});
    const auto& base = rows[2];
    worst = std::max({worst, std::abs(base.ci_lo - 2.01), std::abs(base.ci_hi - 5.45)});
    return {worst <= 0.01 + 1e-12, fmt("max abs deviation %.4f, baseline CI [%.4f, %.4f]", worst, base.ci_lo, base.ci_hi)};
}

// ---------------------------------------------------------------- 2
Outcome spread_anchor() {
    const double v = spread_change(1.0, 3.73, 1.0);
    return {v == -2.73, fmt("spread_change = %.17g", v)};
}

// ---------------------------------------------------------------- 3
Outcome game_forms() {
    GameParams g;
    g.phi0_g = 0.1;
    g.gamma_g = 0.3;
    g.lambda_g = 2.0;
    const double c = avg_congestion(g);
    const double th = run_threshold(c);
    bool ok = std::abs(c - 0.2) <= 1e-12 && std::abs(th - 0.8) <= 1e-12;
    g.lambda_g = 1.0;
    ok = ok && std::abs(avg_congestion(g) - 0.25) <= 1e-12;
    int above = 0;
    for (int i = 1; i <= 20; ++i) {
        const double a = 1.0 + 0.25 * i;
        above += ambiguous_threshold(0.2, a) > th;
    }
    return {ok && above == 20, fmt("C=%.15g theta=%.15g, theta_amb > theta at %d/20 values of a", c, th, above)};
}

// ---------------------------------------------------------------- 4
Outcome ambiguity_solver() {
    Preferences p;
    p.a_scale = 1.0;
    p.gamma_r = 2.0;
    p.psi_amb = 1.5;
    JumpAsset a;
    a.loss_l = 0.5;
    const double x0 = worst_case_distortion(0.0, p, a);
    const double xe = worst_case_distortion(1.0, p, a);
    const double e_err = std::abs(xe - std::exp(1.0));

    a.loss_l = 1.0;
    int mono_bad = 0;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j) {
            Preferences q = p;
            q.psi_amb = 0.25 + 0.5 * i;
            const double wl = 0.05 + 0.09 * j;
            const double here = worst_case_distortion(wl, q, a);
            if (j < 9 && !(worst_case_distortion(wl + 0.09, q, a) > here)) ++mono_bad;
            q.psi_amb += 0.5;
            if (i < 9 && !(worst_case_distortion(wl, q, a) < here)) ++mono_bad;
        }

    JumpAsset m;
    m.mu = 0.04;
    m.sigma = 0.2;
    m.lambda_jump = 0.0;
    Preferences pm;
    pm.gamma_r = 3.0;
    const double merton = m.mu / (pm.gamma_r * m.sigma * m.sigma);
    const double merton_err = std::abs(optimal_weight(pm, m).w_star - merton);

    JumpAsset j;
    j.lambda_jump = 0.5;
    j.loss_l = 0.5;
    bool corner = false;
    double psi_c = 1.0;
    for (; psi_c > 1e-12 && !corner; psi_c /= 2.0) {
        Preferences q;
        q.psi_amb = psi_c;
        const auto s = optimal_weight(q, j);
        corner = s.corner && s.w_star == 0.0;
    }
    const bool ok = x0 == 1.0 && e_err <= 1e-9 && mono_bad == 0 && merton_err <= 1e-8 && corner;
    return {ok, fmt("xi(0)=%g |xi-e|=%.2e monotone violations=%d Merton err=%.2e corner at psi=%.3g", x0, e_err,
                    mono_bad, merton_err, corner ? psi_c * 2.0 : NAN)};
}

// ---------------------------------------------------------------- 5
Outcome hac_oracle() {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> z(0, 1);
    std::uniform_int_distribution<int> tn(5, 200), kn(1, 5);
    double worst = 0;
    for (int inst = 0; inst < 50; ++inst) {
        const int t = tn(rng), k = kn(rng);
        const int lag = std::uniform_int_distribution<int>(0, std::min(t - 1, 12))(rng);
        Eigen::MatrixXd x(t, k);
        Eigen::VectorXd e(t);
        for (int r = 0; r < t; ++r) {
            x(r, 0) = 1.0;
            for (int c = 1; c < k; ++c) x(r, c) = z(rng);
            e(r) = z(rng);
        }
        Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(k, k);
        for (int a = 0; a < t; ++a)
            for (int b = 0; b < t; ++b) {
                const int d = std::abs(a - b);
                if (d > lag) continue;
                const double w = 1.0 - d / (lag + 1.0);
                meat += w * e(a) * e(b) * x.row(a).transpose() * x.row(b);
            }
        const Eigen::MatrixXd bread = (x.transpose() * x).inverse();
        const Eigen::MatrixXd direct = bread * meat * bread;
        const Eigen::MatrixXd fast = econ::newey_west(e, x, lag);
        worst = std::max(worst, (fast - direct).cwiseAbs().maxCoeff() / std::max(1.0, direct.cwiseAbs().maxCoeff()));
    }
    return {worst <= 1e-10, fmt("max scaled deviation %.2e over 50 instances", worst)};
}

// ---------------------------------------------------------------- 6
Outcome event_study_recovery() {
    const auto& cal = sim_calendar();
    int cover = 0;
    double bias = 0;
    const int n = 200;
    for (int s = 0; s < n; ++s) {
        const auto ev = gen_events(50, {}, 1000 + s, cal);
        const auto m = gen_market({}, cal, ev, {}, s);
        const auto st = build_stacked_panel(m.panel, m.events, {-5, 3, "cp_spread_bps", {}});
        const auto r = econ::event_study(st);
        const double truth = m.truth.at("event_study_delta0");
        bias += (r.b("k=0") - truth) / n;
        cover += std::abs(r.b("k=0") - truth) <= 2.0 * r.se("k=0");
    }
    StructuralParams null_p;
    null_p.eta = 1.0;
    int reject = 0;
    const int n0 = 500;
    for (int s = 0; s < n0; ++s) {
        const auto ev = gen_events(50, {}, 5000 + s, cal);
        const auto m = gen_market({}, cal, ev, null_p, s + 7);
        const auto st = build_stacked_panel(m.panel, m.events, {-5, 3, "cp_spread_bps", {}});
        const auto r = econ::event_study(st);
        reject += r.test("pretrend")->p < 0.05;
    }
    const double cov = cover / double(n), size = reject / double(n0);
    return {cov >= 0.95 && std::abs(size - 0.05) <= 0.02,
            fmt("delta0 within 2 SE in %.1f%% of %d seeds (mean bias %.3f); pre-trend size %.1f%% of %d", 100 * cov, n,
                bias, 100 * size, n0)};
}

// ---------------------------------------------------------------- 7
Outcome threshold_recovery() {
    int cover = 0;
    const int n = 200;
    double sign_ok = 0;
    for (int s = 0; s < n; ++s) {
        const auto st = gen_threshold_scenario({}, s);
        econ::ThresholdOptions o;
        o.n_bootstrap = 0;
        const auto r = econ::threshold_regression(st, o);
        cover += r.ci_95.first <= 32.93 && 32.93 <= r.ci_95.second;
        sign_ok += r.beta1 < 0 && r.beta2 > 0;
    }
    std::vector<double> ps;
    for (int s = 0; s < 300; ++s) {
        ThresholdScenario sc;
        sc.linear_null = true;
        const auto st = gen_threshold_scenario(sc, 10000 + s);
        econ::ThresholdOptions o;
        o.n_bootstrap = 200;
        o.seed = static_cast<std::uint64_t>(s);
        ps.push_back(econ::threshold_regression(st, o).bootstrap_p);
    }
    const auto [d, p] = econ::ks_uniform(ps);
    const double cov = cover / double(n);
    return {cov >= 0.90 && p > 0.01,
            fmt("CI covers 32.93 in %.1f%% of %d seeds (beta1<0<beta2 in %.0f); null bootstrap p KS D=%.4f p=%.3f", 100 * cov,
                n, sign_ok, d, p)};
}

// ---------------------------------------------------------------- 8
Outcome giv_recovery() {
    // noiseless linear DGP: flow driven by the lagged instrument, spread by the window flow
    const Calendar cal = Calendar::weekdays(Date(2021, 1, 4), Date(2022, 7, 29));
    const auto events = gen_events(12, {}, 8, cal);
    const double m_true = -2.73;
    std::vector<double> z(cal.size()), flow(cal.size(), 0.0), y(cal.size(), 10.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-0.02, -0.001);
    for (auto& v : z) v = u(rng);
    for (std::size_t t = 1; t < cal.size(); ++t) flow[t] = 3e6 - 4e10 * z[t - 1];
    for (const auto& e : events.events) {
        const auto d = *cal.index_of(e.date);
        double h = 0;
        for (std::size_t t = d - 5; t <= d + 3; ++t) h += flow[t];
        for (std::size_t t = d; t <= d + 3; ++t) y[t] += m_true * 1e-8 * h;
    }
    MarketPanel p(cal.days());
    p.set_column("cp_spread_bps", y);
    p.set_column("net_redemption_usd", flow);
    p.set_column("giv_z", z);
    econ::TslsOptions exact;
    exact.factors = {};
    exact.event_day_control = false;
    exact.winsor_pct = 0;
    const double exact_err = std::abs(econ::tsls(p, events, exact).multiplier - m_true);

    const auto& sc = sim_calendar();
    int cover = 0, strong = 0;
    const int n = 200;
    double bias = 0;
    for (int s = 0; s < n; ++s) {
        const auto ev = gen_events(50, {}, 1000 + s, sc);
        const auto m = gen_market({}, sc, ev, {}, s);
        const auto r = econ::tsls(m.panel, m.events, {});
        const double truth = m.truth.at("multiplier_bps_per_100m");
        bias += (r.multiplier - truth) / n;
        cover += std::abs(r.multiplier - truth) <= 2.0 * r.multiplier_se;
        strong += r.first_stage_f > 10.0;
    }
    const double cov = cover / double(n), fs_share = strong / double(n);
    return {exact_err <= 1e-8 && cov >= 0.90 && fs_share >= 0.95,
            fmt("noiseless error %.2e; within 2 SE of -2.73 in %.1f%% of %d seeds (mean bias %.3f); F>10 in %.1f%%",
                exact_err, 100 * cov, n, bias, 100 * fs_share)};
}

// ---------------------------------------------------------------- 9
// 25 events: with 50 events 10 days apart the +-10 day exclusion leaves no pool.
Outcome placebo_validity() {
    const auto& cal = sim_calendar();
    StructuralParams null_p;
    null_p.eta = 1.0;
    auto p0 = [&](const EventCatalog& ev, const StructuralParams& sp, std::uint64_t mseed, std::uint64_t pseed) {
        const auto m = gen_market({}, cal, ev, sp, mseed);
        const auto st = build_stacked_panel(m.panel, m.events, {-5, 3, "cp_spread_bps", {}});
        const auto r = econ::event_study(st);
        econ::PlaceboOptions o;
        o.n_draws = 200;
        o.seed = pseed;
        const auto pr = econ::placebo(r, m.panel, m.events, o);
        const auto it = std::find(pr.rel_days.begin(), pr.rel_days.end(), 0);
        return pr.p_value[static_cast<std::size_t>(it - pr.rel_days.begin())];
    };
    std::vector<double> ps;
    for (int s = 0; s < 300; ++s) ps.push_back(p0(gen_events(25, {}, 20000 + s, cal), null_p, 30000 + s, s));
    const auto [d, p] = econ::ks_uniform(ps);
    int hits = 0;
    const int n = 100;
    for (int s = 0; s < n; ++s) hits += p0(gen_events(25, {}, 40000 + s, cal), {}, 50000 + s, s) < 0.01;
    const double power = hits / double(n);
    return {p > 0.01 && power >= 0.95,
            fmt("null p_0 KS D=%.4f p=%.3f over 300 seeds; p_0<0.01 in %.0f%% of %d effect seeds", d, p, 100 * power, n)};
}

// ---------------------------------------------------------------- 10
Outcome gbr_detection() {
    int ok = 0, first = 0;
    const int n = 100;
    for (int s = 0; s < n; ++s) {
        const auto d = gen_gbr_scenario({}, s);
        const auto m = econ::fit_gbr(d.names, d.features, d.target);
        const bool gas_first = std::max_element(m.importance.begin(), m.importance.end()) == m.importance.begin();
        const auto pr = econ::partial_response(m, d.features, 0);
        const double e = econ::elbow_detect(pr.x, pr.f);
        first += gas_first;
        ok += gas_first && std::abs(e - 36.0) <= 5.0;
    }
    return {ok >= 90, fmt("gas ranked first in %d/%d, and elbow within 36 +- 5 as well in %d/%d", first, n, ok, n)};
}

// ---------------------------------------------------------------- 11
Outcome sign_laws() {
    long points = 0, bad1 = 0, bad2 = 0, bad3 = 0;

    // friction(availability(I)) in I
    for (double kappa : {0.0, 1e-10, 1e-9, 5e-9, 1.69e-8, 5e-8, 1e-7, 1e-6})
        for (double phi0 : {0.0, 9.0, 30.0})
            for (double phi1 : {0.0, 1.0, 50.0, 206.0, 500.0})
                for (double g : {0.5, 1.0, 2.0, 3.0}) {
                    double prev_i = 0, prev_f = -1;
                    for (int k = 0; k <= 40; ++k, ++points) {
                        const double i = k == 0 ? 0.0 : 1e5 * std::pow(1.5, k);
                        const double om = availability(i, kappa);
                        const double f = friction(om, phi0, phi1, g);
                        if (k > 0) {
                            if (f < prev_f) ++bad1;
                            const bool unclamped = availability(prev_i, kappa) > 0.0 && kappa > 0 && phi1 > 0;
                            if (unclamped && !(f > prev_f)) ++bad1;
                        }
                        prev_i = i;
                        prev_f = f;
                    }
                }

    // inactive regime: R falls in friction; crossing the panic threshold with
    // rho2 > R^d(0) * psi * dPhi raises R despite the higher friction
    StructuralParams sp;
    for (double ret : {-0.2, -0.05, -0.01, 0.0})
        for (double rho0 : {0.0, 0.001, 0.01})
            for (double rho1 : {0.0005, 0.002, 0.05})
                for (double psi : {1e-4, 0.002, 0.01, 0.05})
                    for (double om_hi : {0.7, 0.8, 1.0})
                        for (double om_lo : {0.0, 0.3, 0.6})
                            for (double margin : {1.001, 1.5, 10.0}) {
                                sp.rho0 = rho0;
                                sp.rho1 = rho1;
                                sp.psi = psi;
                                sp.omega_bar = 0.65;
                                const double phi_b = friction(om_hi, sp.phi0, sp.phi1, sp.gamma_c);
                                const double phi_a = friction(om_lo, sp.phi0, sp.phi1, sp.gamma_c);
                                sp.rho2 = 0.0;
                                const double rd0 = redemption_demand(ret, 1.0, sp);
                                if (rd0 > 0 && !(net_redemption(rd0, phi_b + 1.0, psi) < net_redemption(rd0, phi_b, psi)))
                                    ++bad2;
                                sp.rho2 = margin * rd0 * psi * (phi_a - phi_b) + 1e-12;
                                const double below = net_redemption(redemption_demand(ret, om_hi, sp), phi_b, psi);
                                const double above = net_redemption(redemption_demand(ret, om_lo, sp), phi_a, psi);
                                if (!(above > below)) ++bad2;
                                ++points;
                            }

    // sign(dSpread) = sign(1 - eta) sign(R)
    for (int a = -20; a <= 20; ++a)
        for (int b = 0; b <= 20; ++b)
            for (double lam : {0.01, 0.5, 1.0, 3.0, 100.0}) {
                const double r = a == 0 ? 0.0 : std::copysign(std::pow(10.0, std::abs(a) / 4.0 - 3.0), a);
                const double eta = 0.25 * b;
                if (sgn(spread_change(r, eta, lam)) != sgn(1.0 - eta) * sgn(r)) ++bad3;
                ++points;
            }
    return {points >= 10000 && bad1 + bad2 + bad3 == 0,
            fmt("%ld grid points; violations monotonicity=%ld dichotomy=%ld sign=%ld", points, bad1, bad2, bad3)};
}

// ---------------------------------------------------------------- 12
Outcome determinism() {
    const auto& cal = sim_calendar();
    const auto ev = gen_events(50, {}, 3, cal);
    auto m = gen_market({}, cal, ev, {}, 4);
    std::vector<double> odd = m.panel.column("vix");
    odd[0] = std::numeric_limits<double>::quiet_NaN();
    odd[1] = -0.0;
    odd[2] = 5e-324;
    odd[3] = 1.7976931348623157e308;
    odd[4] = 0.1 + 0.2;
    m.panel.set_column("edge", odd);
    const auto back = panel_from_csv(panel_to_csv(m.panel));
    bool panel_ok = back.dates() == m.panel.dates() && back.column_names() == m.panel.column_names();
    for (const auto& c : m.panel.column_names()) panel_ok = panel_ok && same_bits(back.column(c), m.panel.column(c));
    const bool events_ok = parse_events_text(events_to_csv(m.events), cal) == m.events;

    const auto root = fs::temp_directory_path() / "liqrec_acceptance_determinism";
    fs::remove_all(root);
    std::vector<std::string> manifests[2];
    for (int run = 0; run < 2; ++run) {
        auto cfg = cli::parse_config(
            R"({"seed": 77, "simulate": {"n_events": 30}, "threshold": {"bootstrap": 50}, "placebo": {"n_draws": 40}})");
        cfg.paths.out = (root / std::to_string(run)).string();
        cli::cmd_simulate(cfg);
        cli::cmd_estimate(cfg, "event-study");
        cli::cmd_estimate(cfg, "threshold");
        cli::cmd_estimate(cfg, "giv");
        cli::cmd_placebo(cfg);
        for (const char* f : {"manifest-simulate.json", "manifest-estimate-event-study.json",
                              "manifest-estimate-threshold.json", "manifest-estimate-giv.json", "manifest-placebo.json"})
            manifests[run].push_back(read_file((fs::path(cfg.paths.out) / f).string()));
    }
    fs::remove_all(root);
    const bool same = manifests[0] == manifests[1];
    return {panel_ok && events_ok && same, fmt("panel round trip %s, events round trip %s, 5 manifests %s",
                                               panel_ok ? "exact" : "MISMATCH", events_ok ? "exact" : "MISMATCH",
                                               same ? "byte-identical" : "DIFFER")};
}

}  // namespace

int main() {
    criterion(1, "eta sensitivity table", 1, eta_table);
    criterion(2, "spread-change anchor", 1, spread_anchor);
    criterion(3, "global-game closed forms", 1, game_forms);
    criterion(4, "ambiguity solver", 5, ambiguity_solver);
    criterion(5, "HAC oracle", 10, hac_oracle);
    criterion(6, "event-study recovery", 300, event_study_recovery);
    criterion(7, "threshold recovery", 600, threshold_recovery);
    criterion(8, "GIV/2SLS recovery", 300, giv_recovery);
    criterion(9, "placebo validity and power", 600, placebo_validity);
    criterion(10, "GBR threshold detection", 120, gbr_detection);
    criterion(11, "structural sign laws", 60, sign_laws);
    criterion(12, "determinism and round trip", 60, determinism);
    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
