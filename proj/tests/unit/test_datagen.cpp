#include "doctest.h"

#include "liqrec/datagen.hpp"
#include "liqrec/error.hpp"

#include <cmath>
#include <numeric>

using namespace liqrec;

namespace {

Calendar cal_days(int n) {
    std::vector<Date> d;
    Date x(2022, 1, 3);
    while (static_cast<int>(d.size()) < n) {
        if (!x.is_weekend()) d.push_back(x);
        x = x.plus_days(1);
    }
    return Calendar(d);
}

MarketConfig quiet() {
    MarketConfig c;
    c.vix.sd = c.dxy.sd = c.ted.sd = 0.0;
    c.btc_mean = c.btc_sd = 0.0;
    c.noise.spread_sd = 0.0;
    c.noise.flow_sd_usd = 0.0;
    return c;
}

ExploitEvent ev(Date d, double loss, double tvl) {
    ExploitEvent e;
    e.date = e.occurred = d;
    e.protocol = "P001";
    e.chain = "ethereum";
    e.loss_usd = loss;
    e.tvl_usd = tvl;
    return e;
}

}  // namespace

TEST_CASE("gen_events: empty, deterministic, sorted, bounded") {
    const auto cal = cal_days(1000);
    CHECK(gen_events(0, {}, 1, cal).empty());
    const auto a = gen_events(50, {}, 42, cal);
    const auto b = gen_events(50, {}, 42, cal);
    CHECK(a == b);
    CHECK(!(a == gen_events(50, {}, 43, cal)));
    REQUIRE(a.size() == 50);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const auto& e = a.events[i];
        CHECK(e.loss_usd > 0);
        CHECK(e.loss_usd <= e.tvl_usd);
        CHECK(cal.index_of(e.date).has_value());
        const auto idx = static_cast<long>(*cal.index_of(e.date));
        CHECK(idx >= 10);
        CHECK(idx < 990);
        if (i > 0) {
            CHECK(a.events[i - 1].date < e.date);
            CHECK(idx - static_cast<long>(*cal.index_of(a.events[i - 1].date)) >= 10);
        }
    }
}

TEST_CASE("gen_events: blackout days never host events") {
    const auto cal = cal_days(300);
    EventGenOptions o;
    o.min_spacing = 0;
    for (std::size_t i = 10; i < 290; i += 2) o.blackout.push_back(cal[i]);
    const auto c = gen_events(40, {}, 7, cal, o);
    for (const auto& e : c.events) CHECK(*cal.index_of(e.date) % 2 == 1);
}

TEST_CASE("gen_events: short calendar errors") {
    CHECK_THROWS_AS(gen_events(1, {}, 1, cal_days(15)), DataError);
    CHECK_THROWS_AS(gen_events(30, {}, 1, cal_days(100)), DataError);  // spacing cannot fit
}

TEST_CASE("draw_losses: log-mean within 3 standard errors") {
    std::mt19937_64 rng(5);
    const auto l = draw_losses(10000, {}, rng);
    double m = 0;
    for (double x : l) m += std::log(x);
    m /= l.size();
    CHECK(std::abs(m - 16.98) < 3 * 1.97 / 100);
}

TEST_CASE("gen_market: zero noise and no events gives a constant spread") {
    const auto cal = cal_days(80);
    auto m = gen_market(quiet(), cal, {}, StructuralParams{}, 3);
    const auto& s = m.panel.column("cp_spread_bps");
    for (double x : s) CHECK(x == doctest::Approx(s[0]).epsilon(1e-12));
    m.panel.validate_aligned();
}

TEST_CASE("gen_market: deterministic with full column set and truth sidecar") {
    const auto cal = cal_days(300);
    const auto evs = gen_events(10, {}, 9, cal);
    const auto a = gen_market({}, cal, evs, {}, 11);
    const auto b = gen_market({}, cal, evs, {}, 11);
    CHECK(a.panel == b.panel);
    CHECK(a.events == b.events);
    for (const char* c : {"cp_spread_bps", "vix", "dxy", "ted", "btc_return", "gas_gwei", "net_redemption_usd",
                          "giv_z", "hack_day"}) {
        CHECK(a.panel.has_column(c));
        for (double x : a.panel.column(c)) CHECK(std::isfinite(x));
    }
    for (const auto& e : a.events.events) {
        CHECK(e.gas_gwei >= 0);
        CHECK(a.panel.column("hack_day")[*cal.index_of(e.date)] == 1.0);
    }
    CHECK(a.truth.at("multiplier_bps_per_100m") == doctest::Approx(-2.73));
    CHECK(a.truth.at("gas_threshold_gwei") == doctest::Approx(32.93).epsilon(1e-3));
    const auto round = GroundTruth::parse(a.truth.to_text());
    CHECK(round.values == a.truth.values);
    CHECK_THROWS_AS(a.truth.at("nope"), DataError);
}

TEST_CASE("gen_market: invalid inputs") {
    const auto cal = cal_days(50);
    EventCatalog c;
    c.events.push_back(ev(Date(2030, 1, 1), 1e6, 1e9));
    CHECK_THROWS_AS(gen_market({}, cal, c, {}, 1), AlignmentError);
    MarketConfig bad;
    bad.vix.phi = 1.0;
    CHECK_THROWS_AS(gen_market(bad, cal, {}, {}, 1), DomainError);
}

TEST_CASE("gen_market: VIX long-run mean") {
    MarketConfig c;
    const auto cal = cal_days(100000);
    const auto m = gen_market(c, cal, {}, {}, 17);
    const auto& v = m.panel.column("vix");
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    CHECK(std::abs(mean - 19.44) < 1.0);
}

TEST_CASE("gen_market: event day spread falls on average when eta > 1") {
    const auto cal = cal_days(60);
    EventCatalog c;
    c.events.push_back(ev(cal[30], 100e6, 10e9));
    double sum = 0;
    for (std::uint64_t s = 0; s < 500; ++s) {
        const auto m = gen_market({}, cal, c, {}, s);
        const auto& y = m.panel.column("cp_spread_bps");
        sum += y[30] - y[29];
    }
    CHECK(sum / 500 < -1.0);
}

TEST_CASE("build_stacked_panel: counts, edges, conservation") {
    const auto cal = cal_days(100);
    MarketPanel p(cal.days());
    std::vector<double> y(100);
    std::iota(y.begin(), y.end(), 0.0);
    p.set_column("cp_spread_bps", y);
    p.set_column("vix", y);

    EventCatalog one;
    one.events.push_back(ev(cal[50], 1e6, 1e9));
    auto s = build_stacked_panel(p, one, {-5, 3, "cp_spread_bps", {"vix"}});
    CHECK(s.rows() == 9);
    CHECK(s.warnings.empty());
    for (std::size_t r = 0; r < s.rows(); ++r) {
        CHECK(s.outcome[r] == 50 + s.rel_day[r]);
        CHECK(s.outcome_prev[r] == s.outcome[r] - 1);
        CHECK(s.control("vix")[r] == s.outcome[r]);
    }

    EventCatalog edge = one;
    edge.events.push_back(ev(cal[97], 1e6, 1e9));   // lacks k=+3
    s = build_stacked_panel(p, edge, {});
    CHECK(s.rows() == 9);
    CHECK(s.warnings.size() == 1);

    EventCatalog only_edge;
    only_edge.events.push_back(ev(cal[2], 1e6, 1e9));
    CHECK_THROWS_AS(build_stacked_panel(p, only_edge, {}), DataError);

    const auto big_cal = cal_days(2000);
    const auto evs = gen_events(50, {}, 1, big_cal);
    MarketPanel bp(big_cal.days());
    bp.set_column("cp_spread_bps", std::vector<double>(2000, 1.0));
    const auto st = build_stacked_panel(bp, evs, {});
    CHECK(st.rows() == 450);
    CHECK(st.distinct_events().size() == 50);
}

TEST_CASE("aggregate_monthly: window-day means, changes, sd guard") {
    const auto cal = Calendar::weekdays(Date(2022, 1, 3), Date(2022, 4, 29));
    MarketPanel p(cal.days());
    std::vector<double> y(cal.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = static_cast<double>(i);
    p.set_column("cp_spread_bps", y);
    EventCatalog c;
    c.events.push_back(ev(cal[*cal.on_or_after(Date(2022, 1, 17))], 1e6, 1e9));
    c.events.push_back(ev(cal[*cal.on_or_after(Date(2022, 3, 15))], 1e6, 1e9));
    const auto st = build_stacked_panel(p, c, {});
    std::map<int, double> share;
    for (int m = Date(2022, 1, 3).month_index(); m <= Date(2022, 4, 1).month_index(); ++m) share[m] = 0.3;
    const auto mp = aggregate_monthly(st, p, share, c.dates());
    REQUIRE(mp.rows.size() == 2);
    const auto r0 = *cal.index_of(c.events[0].date);
    CHECK(mp.rows[0].spread == doctest::Approx(static_cast<double>(r0) - 1.0));   // mean of k=-5..3
    CHECK(mp.rows[0].n_days == 9);
    CHECK(!mp.rows[0].spread_change.has_value());
    CHECK(!mp.rows[1].spread_change.has_value());   // February has no window days
    CHECK(mp.rows[0].hack_month);
    for (const auto& r : mp.rows) CHECK(r.pcs_z == 0.0);
    CHECK(mp.warnings.size() == 1);

    share[Date(2022, 3, 1).month_index()] = 0.5;
    const auto mp2 = aggregate_monthly(st, p, share, c.dates());
    CHECK(mp2.rows[0].pcs_z == doctest::Approx(-std::sqrt(0.5)));
    CHECK(mp2.rows[1].pcs_z == doctest::Approx(std::sqrt(0.5)));

    share.erase(Date(2022, 3, 1).month_index());
    CHECK_THROWS_AS(aggregate_monthly(st, p, share, c.dates()), DataError);
}

TEST_CASE("build_did_panel: rows, treat flag, listwise deletion") {
    const auto cal = cal_days(40);
    MarketPanel p(cal.days());
    std::vector<double> a(40, 2.0), b(40, 2.5), tb(40, 1.0);
    p.set_column("aa_nonfin", a);
    p.set_column("a2p2", b);
    p.set_column("tbill", tb);
    EventCatalog c;
    c.events.push_back(ev(cal[20], 1e6, 1e9));
    DidOptions o;
    o.assets = {"aa_nonfin", "a2p2"};
    o.tbill = "tbill";
    auto s = build_did_panel(p, c, o);
    CHECK(s.rows() == 22);
    for (std::size_t r = 0; r < s.rows(); ++r) {
        CHECK(s.treat[r] == (s.asset_id[r] == 0 ? 1 : 0));
        CHECK(s.outcome[r] == doctest::Approx(s.asset_id[r] == 0 ? 100.0 : 150.0));
    }
    a[22] = std::nan("");
    p.set_column("aa_nonfin", a);
    s = build_did_panel(p, c, o);
    CHECK(s.rows() == 21);
    CHECK(s.warnings.size() == 1);

    o.treat_asset = "abcp";
    CHECK_THROWS_AS(build_did_panel(p, c, o), DataError);
    o.assets = {"aa_nonfin"};
    o.treat_asset = "aa_nonfin";
    CHECK_THROWS_AS(build_did_panel(p, c, o), DataError);
}

TEST_CASE("scenario generators are deterministic and well-formed") {
    const auto t1 = gen_threshold_scenario({}, 3);
    CHECK(t1.rows() == 550);
    CHECK(t1.outcome == gen_threshold_scenario({}, 3).outcome);
    const auto d = gen_did_scenario({}, 3);
    CHECK(d.events.size() == 50);
    CHECK(d.panel.has_column("tbill"));
    const auto m = gen_monthly_scenario({}, 3);
    CHECK(m.rows.size() == 48);
    CHECK(!m.rows[0].spread_change);
    CHECK(m.rows[1].spread_change);
    const auto g = gen_gbr_scenario({}, 3);
    CHECK(g.features.size() == 3);
    CHECK(g.target.size() == 200);
}
