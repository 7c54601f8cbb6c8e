#include "liqrec/datagen.hpp"

#include "liqrec/econ/giv.hpp"
#include "liqrec/error.hpp"
#include "liqrec/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

namespace liqrec {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(tag)};
    return std::mt19937_64(seq);
}

std::vector<double> ar1_path(const Ar1& p, std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> z(0.0, 1.0);
    std::vector<double> out(n);
    if (n == 0) return out;
    const double innov = p.sd * std::sqrt(std::max(0.0, 1.0 - p.phi * p.phi));
    double x = p.mean + p.sd * z(rng);
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) x = p.mean + p.phi * (x - p.mean) + innov * z(rng);
        out[t] = x;
    }
    return out;
}

}  // namespace

std::vector<double> ProtocolUniverse::shares() const {
    if (n_protocols < 1) throw DomainError("protocol universe needs at least one protocol");
    std::vector<double> s(static_cast<std::size_t>(n_protocols));
    for (int i = 0; i < n_protocols; ++i) s[static_cast<std::size_t>(i)] = std::pow(i + 1.0, -zipf_exponent);
    const double tot = std::accumulate(s.begin(), s.end(), 0.0);
    for (double& x : s) x /= tot;
    return s;
}

std::string ProtocolUniverse::name(int i) const {
    char buf[16];
    std::snprintf(buf, sizeof buf, "P%03d", i + 1);
    return buf;
}

std::string ProtocolUniverse::chain(int i) const {
    static const char* chains[] = {"ethereum", "bsc", "arbitrum", "polygon", "solana"};
    return chains[i % 5];
}

std::vector<double> draw_losses(int n, const LossDistribution& dist, std::mt19937_64& rng) {
    std::lognormal_distribution<double> d(dist.log_mean, dist.log_sd);
    std::vector<double> out(static_cast<std::size_t>(std::max(n, 0)));
    for (double& x : out) x = d(rng);
    return out;
}

EventCatalog gen_events(int n_events, const LossDistribution& dist, std::uint64_t seed, const Calendar& calendar,
                        const EventGenOptions& opt) {
    if (n_events < 0) throw DomainError("gen_events: n_events must be >= 0");
    EventCatalog cat;
    if (n_events == 0) return cat;
    const auto n = static_cast<long>(calendar.size());
    if (n < 2L * opt.edge_margin + 1)
        throw DataError("gen_events: calendar of " + std::to_string(n) + " days is shorter than the event window margins");

    std::set<Date> blackout(opt.blackout.begin(), opt.blackout.end());
    std::vector<long> eligible;
    for (long i = opt.edge_margin; i < n - opt.edge_margin; ++i)
        if (!blackout.count(calendar[static_cast<std::size_t>(i)])) eligible.push_back(i);
    if (eligible.empty()) throw DataError("gen_events: no eligible days after blackout and margins");

    auto rng = stream(seed, 11);
    std::uniform_int_distribution<std::size_t> pick(0, eligible.size() - 1);
    std::vector<long> chosen;
    long attempts = 0;
    while (static_cast<int>(chosen.size()) < n_events) {
        if (++attempts > 10000L * n_events)
            throw DataError("gen_events: cannot place " + std::to_string(n_events) + " events with spacing " +
                            std::to_string(opt.min_spacing));
        const long d = eligible[pick(rng)];
        bool ok = true;
        if (opt.min_spacing > 0)
            for (long c : chosen)
                if (std::abs(c - d) < opt.min_spacing) {
                    ok = false;
                    break;
                }
        if (ok) chosen.push_back(d);
    }

    const auto shares = opt.universe.shares();
    const double tvl_max = shares.front() * opt.universe.market_tvl_usd;
    auto losses = draw_losses(n_events, dist, rng);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int j = 0; j < n_events; ++j) {
        double loss = std::min(losses[static_cast<std::size_t>(j)], opt.max_loss_to_tvl * tvl_max);
        // protocol drawn in proportion to TVL among those large enough to lose `loss`
        double mass = 0.0;
        for (double s : shares)
            if (s * opt.universe.market_tvl_usd * opt.max_loss_to_tvl >= loss) mass += s;
        double target = u01(rng) * mass;
        int chosen_p = 0;
        for (int i = 0; i < opt.universe.n_protocols; ++i) {
            const double s = shares[static_cast<std::size_t>(i)];
            if (s * opt.universe.market_tvl_usd * opt.max_loss_to_tvl < loss) continue;
            chosen_p = i;
            target -= s;
            if (target <= 0.0) break;
        }
        ExploitEvent e;
        e.date = e.occurred = calendar[static_cast<std::size_t>(chosen[static_cast<std::size_t>(j)])];
        e.protocol = opt.universe.name(chosen_p);
        e.chain = opt.universe.chain(chosen_p);
        e.loss_usd = loss;
        e.tvl_usd = shares[static_cast<std::size_t>(chosen_p)] * opt.universe.market_tvl_usd;
        cat.events.push_back(std::move(e));
    }
    std::stable_sort(cat.events.begin(), cat.events.end(),
                     [](const ExploitEvent& a, const ExploitEvent& b) { return a.date < b.date; });
    cat.validate();
    return cat;
}

std::string GroundTruth::to_text() const {
    std::string out = "# ground truth for a synthetic panel; key=value\n";
    for (const auto& [k, v] : values) out += k + "=" + format_double(v) + "\n";
    return out;
}

GroundTruth GroundTruth::parse(const std::string& text) {
    GroundTruth g;
    std::istringstream in(text);
    std::string line;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw DataError("ground truth line " + std::to_string(ln) + ": missing '='");
        const std::string key = line.substr(0, eq);
        const std::string val = line.substr(eq + 1);
        char* end = nullptr;
        const double v = std::strtod(val.c_str(), &end);
        if (val.empty() || end != val.c_str() + val.size())
            throw DataError("ground truth line " + std::to_string(ln) + ": bad value");
        g.values[key] = v;
    }
    return g;
}

double GroundTruth::at(const std::string& key) const {
    auto it = values.find(key);
    if (it == values.end()) throw DataError("ground truth has no key '" + key + "'");
    return it->second;
}

SyntheticMarket gen_market(const MarketConfig& config, const Calendar& calendar, const EventCatalog& events,
                           const StructuralParams& params, std::uint64_t seed) {
    params.validate();
    events.validate();
    if (config.vix.sd < 0 || config.dxy.sd < 0 || config.ted.sd < 0 || config.btc_sd < 0)
        throw DomainError("gen_market: negative standard deviation");
    for (const Ar1* a : {&config.vix, &config.dxy, &config.ted})
        if (!(std::abs(a->phi) < 1.0)) throw DomainError("gen_market: AR(1) coefficient must lie in (-1,1)");
    const std::size_t n = calendar.size();

    auto macro = stream(seed, 21);
    const auto vix = ar1_path(config.vix, n, macro);
    const auto dxy = ar1_path(config.dxy, n, macro);
    const auto ted = ar1_path(config.ted, n, macro);
    std::normal_distribution<double> btc(config.btc_mean, config.btc_sd);
    std::vector<double> ret(n);
    for (double& r : ret) r = btc(macro);

    std::vector<double> shocks(n, 0.0), hack(n, 0.0);
    std::vector<std::size_t> event_rows;
    for (const auto& e : events.events) {
        const auto idx = calendar.index_of(e.date);
        if (!idx) throw AlignmentError("gen_market: event date " + e.date.iso() + " is not a trading day");
        shocks[*idx] += e.loss_usd;
        hack[*idx] = 1.0;
        event_rows.push_back(*idx);
    }

    SyntheticMarket out;
    std::seed_seq path_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 31u};
    std::uint64_t path_seed = 0;
    {
        std::mt19937_64 g(path_seq);
        path_seed = g();
    }
    out.path = simulate_path(calendar, shocks, ret, params, config.noise, path_seed);

    std::vector<double> spread = out.path.panel.column("cp_spread_bps");
    for (std::size_t t = 0; t < n; ++t) spread[t] += config.vix_loading * (vix[t] - config.vix.mean);

    out.events = events;
    for (std::size_t j = 0; j < events.size(); ++j)
        out.events.events[j].gas_gwei = out.path.network[event_rows[j]].friction;

    out.giv_days = econ::giv_days_from_events(out.events, config.universe.market_tvl_usd, config.universe.n_protocols);
    const auto z = econ::giv_on_calendar(econ::build_giv(out.giv_days), calendar.days());

    out.panel = MarketPanel(calendar.days());
    out.panel.set_column("cp_spread_bps", std::move(spread));
    out.panel.set_column("vix", vix);
    out.panel.set_column("dxy", dxy);
    out.panel.set_column("ted", ted);
    out.panel.set_column("btc_return", ret);
    out.panel.set_column("gas_gwei", out.path.panel.column("gas_gwei"));
    out.panel.set_column("net_redemption_usd", out.path.panel.column("net_redemption_usd"));
    out.panel.set_column("giv_z", z);
    out.panel.set_column("hack_day", hack);

    auto& tv = out.truth.values;
    tv["seed"] = static_cast<double>(seed);
    tv["n_days"] = static_cast<double>(n);
    tv["n_events"] = static_cast<double>(events.size());
    tv["kappa"] = params.kappa;
    tv["phi0"] = params.phi0;
    tv["phi1"] = params.phi1;
    tv["gamma_c"] = params.gamma_c;
    tv["rho0"] = params.rho0;
    tv["rho1"] = params.rho1;
    tv["rho2"] = params.rho2;
    tv["psi"] = params.psi;
    tv["omega_bar"] = params.omega_bar;
    tv["eta"] = params.eta;
    tv["lambda_price"] = params.lambda_price;
    tv["float_usd"] = config.noise.float_usd;
    tv["spread_sd"] = config.noise.spread_sd;
    tv["settlement_lag"] = config.noise.settlement_lag;
    tv["vix_loading"] = config.vix_loading;
    tv["multiplier_bps_per_100m"] = params.lambda_price * (1.0 - params.eta);
    tv["gas_threshold_gwei"] = friction(params.omega_bar, params.phi0, params.phi1, params.gamma_c);
    double sate = 0.0;
    for (auto r : event_rows) sate += out.path.flows[r].spread_change;
    tv["event_study_delta0"] = event_rows.empty() ? 0.0 : sate / static_cast<double>(event_rows.size());
    return out;
}

StackedPanel build_stacked_panel(const MarketPanel& panel, const EventCatalog& events, const StackOptions& opt) {
    if (opt.window_lo > -1 || opt.window_hi < 0) throw DomainError("stack window must contain k=-1 and k=0");
    const auto& y = panel.column(opt.outcome);
    std::vector<const std::vector<double>*> ctrl;
    for (const auto& c : opt.controls) ctrl.push_back(&panel.column(c));

    StackedPanel s;
    s.window_lo = opt.window_lo;
    s.window_hi = opt.window_hi;
    s.control_names = opt.controls;
    s.controls.resize(opt.controls.size());
    s.attribute_names = {"gas_gwei", "loss_usd", "log_loss", "tvl_usd"};
    s.attributes.resize(4);
    const long n = static_cast<long>(panel.rows());
    for (std::size_t e = 0; e < events.size(); ++e) {
        const auto& ev = events.events[e];
        const auto row = panel.row_of(ev.date);
        if (!row) {
            s.warnings.push_back("event " + std::to_string(e) + " (" + ev.date.iso() + ") not on the panel calendar; dropped");
            continue;
        }
        const long r0 = static_cast<long>(*row);
        if (r0 + opt.window_lo < 0 || r0 + opt.window_hi >= n) {
            s.warnings.push_back("event " + std::to_string(e) + " (" + ev.date.iso() + ") lacks full window coverage; dropped");
            continue;
        }
        for (int k = opt.window_lo; k <= opt.window_hi; ++k) {
            const auto r = static_cast<std::size_t>(r0 + k);
            s.event_id.push_back(static_cast<int>(e));
            s.date.push_back(panel.dates()[r]);
            s.rel_day.push_back(k);
            s.outcome.push_back(y[r]);
            s.outcome_prev.push_back(r > 0 ? y[r - 1] : kNaN);
            for (std::size_t c = 0; c < ctrl.size(); ++c) s.controls[c].push_back((*ctrl[c])[r]);
            s.attributes[0].push_back(ev.gas_gwei);
            s.attributes[1].push_back(ev.loss_usd);
            s.attributes[2].push_back(std::log(ev.loss_usd));
            s.attributes[3].push_back(ev.tvl_usd);
        }
    }
    if (s.rows() == 0) throw DataError("build_stacked_panel: no event has full window coverage");
    return s;
}

MonthlyPanel aggregate_monthly(const StackedPanel& stacked, const MarketPanel& panel,
                               const std::map<int, double>& prime_share, const std::vector<Date>& hack_dates,
                               const MonthlyOptions& opt) {
    MonthlyPanel out;
    out.control_names = opt.controls;
    std::set<Date> days;
    if (opt.event_window_days_only) days.insert(stacked.date.begin(), stacked.date.end());
    else days.insert(panel.dates().begin(), panel.dates().end());
    std::set<int> hack_months;
    for (const auto& d : hack_dates) hack_months.insert(d.month_index());

    const auto& spread = panel.column("cp_spread_bps");
    std::vector<const std::vector<double>*> ctrl;
    for (const auto& c : opt.controls) ctrl.push_back(&panel.column(c));

    std::map<int, MonthlyRow> rows;
    for (const auto& d : days) {
        const auto r = panel.row_of(d);
        if (!r) continue;
        auto& m = rows[d.month_index()];
        m.month_index = d.month_index();
        m.spread += spread[*r];
        if (m.controls.empty()) m.controls.assign(ctrl.size(), 0.0);
        for (std::size_t c = 0; c < ctrl.size(); ++c) m.controls[c] += (*ctrl[c])[*r];
        ++m.n_days;
    }
    double sum = 0.0, sum2 = 0.0;
    for (auto& [mi, m] : rows) {
        m.spread /= m.n_days;
        for (double& c : m.controls) c /= m.n_days;
        m.hack_month = hack_months.count(mi) > 0;
        auto it = prime_share.find(mi);
        if (it == prime_share.end()) throw DataError("prime share series does not cover " + month_label(mi));
        m.pcs = it->second;
        sum += m.pcs;
        sum2 += m.pcs * m.pcs;
        auto prev = rows.find(mi - 1);
        if (prev != rows.end()) m.spread_change = m.spread - prev->second.spread;
    }
    const double k = static_cast<double>(rows.size());
    const double mean = k > 0 ? sum / k : 0.0;
    const double var = k > 1 ? (sum2 - k * mean * mean) / (k - 1.0) : 0.0;
    const double sd = std::sqrt(std::max(0.0, var));
    const bool degenerate = !(sd > 1e-12 * std::max(1.0, std::abs(mean)));
    if (degenerate) out.warnings.push_back("prime share has zero variance; pcs_z set to zero");
    for (auto& [mi, m] : rows) {
        m.pcs_z = degenerate ? 0.0 : (m.pcs - mean) / sd;
        out.rows.push_back(m);
    }
    return out;
}

StackedPanel build_did_panel(const MarketPanel& panel, const EventCatalog& events, const DidOptions& opt) {
    if (opt.assets.size() < 2) throw DataError("build_did_panel: need at least two assets");
    const auto treat_it = std::find(opt.assets.begin(), opt.assets.end(), opt.treat_asset);
    if (treat_it == opt.assets.end() || !panel.has_column(opt.treat_asset))
        throw DataError("build_did_panel: treat asset '" + opt.treat_asset + "' not found");
    std::vector<std::vector<double>> series;
    for (const auto& a : opt.assets) {
        const auto& col = panel.column(a);
        if (opt.tbill.empty()) {
            series.push_back(col);
            continue;
        }
        const auto& tb = panel.column(opt.tbill);
        std::vector<double> s(col.size());
        for (std::size_t i = 0; i < col.size(); ++i) s[i] = (col[i] - tb[i]) * 100.0;
        series.push_back(std::move(s));
    }
    StackedPanel s;
    s.window_lo = opt.window_lo;
    s.window_hi = opt.window_hi;
    s.asset_names = opt.assets;
    const long n = static_cast<long>(panel.rows());
    std::size_t deleted = 0;
    for (std::size_t e = 0; e < events.size(); ++e) {
        const auto row = panel.row_of(events.events[e].date);
        if (!row || static_cast<long>(*row) + opt.window_lo < 0 || static_cast<long>(*row) + opt.window_hi >= n) {
            s.warnings.push_back("event " + std::to_string(e) + " lacks full window coverage; dropped");
            continue;
        }
        for (std::size_t a = 0; a < opt.assets.size(); ++a)
            for (int k = opt.window_lo; k <= opt.window_hi; ++k) {
                const auto r = static_cast<std::size_t>(static_cast<long>(*row) + k);
                const double v = series[a][r];
                if (std::isnan(v)) {
                    ++deleted;
                    continue;
                }
                s.event_id.push_back(static_cast<int>(e));
                s.date.push_back(panel.dates()[r]);
                s.rel_day.push_back(k);
                s.outcome.push_back(v);
                s.outcome_prev.push_back(kNaN);
                s.asset_id.push_back(static_cast<int>(a));
                s.treat.push_back(opt.assets[a] == opt.treat_asset ? 1 : 0);
            }
    }
    if (deleted > 0) s.warnings.push_back(std::to_string(deleted) + " asset-days with missing rates deleted");
    if (s.rows() == 0) throw DataError("build_did_panel: empty panel");
    return s;
}

StackedPanel gen_threshold_scenario(const ThresholdScenario& sc, std::uint64_t seed) {
    auto rng = stream(seed, 41);
    std::normal_distribution<double> z(0.0, 1.0);
    StackedPanel s;
    s.window_lo = sc.window_lo;
    s.window_hi = sc.window_hi;
    s.attribute_names = {"gas_gwei"};
    s.attributes.resize(1);
    const Date base(2021, 1, 4);
    for (int e = 0; e < sc.n_events; ++e) {
        const double gas = std::exp(sc.gas_log_mean + sc.gas_log_sd * z(rng));
        const double alpha = z(rng);
        const double effect = sc.linear_null || gas <= sc.gamma ? sc.beta1 : sc.beta2;
        for (int k = sc.window_lo; k <= sc.window_hi; ++k) {
            s.event_id.push_back(e);
            s.date.push_back(base.plus_days(20L * e + k));
            s.rel_day.push_back(k);
            s.outcome.push_back(alpha + (k >= 0 ? effect : 0.0) + sc.noise_sd * z(rng));
            s.outcome_prev.push_back(kNaN);
            s.attributes[0].push_back(gas);
        }
    }
    return s;
}

DidData gen_did_scenario(const DidScenario& sc, std::uint64_t seed) {
    const auto cal = Calendar::weekdays(Date(2021, 1, 4), Date(2024, 12, 31));
    EventGenOptions eo;
    eo.min_spacing = 12;
    DidData out;
    out.events = gen_events(sc.n_events, LossDistribution{}, seed, cal, eo);
    auto rng = stream(seed, 51);
    std::normal_distribution<double> z(0.0, 1.0);
    const auto n = cal.size();
    const auto tbill = ar1_path(Ar1{2.0, 1.5, 0.999}, n, rng);
    const auto common = ar1_path(Ar1{0.0, sc.common_shock_sd, 0.9}, n, rng);
    std::vector<double> effect(n, 0.0);
    for (const auto& e : out.events.events) {
        const auto r = *cal.index_of(e.date);
        for (std::size_t k = 1; k <= 5 && r + k < n; ++k) effect[r + k] = sc.effect;
    }
    std::vector<double> treat(n), ctrl(n);
    for (std::size_t t = 0; t < n; ++t) {
        treat[t] = tbill[t] + (20.0 + common[t] + effect[t] + sc.noise_sd * z(rng)) / 100.0;
        ctrl[t] = tbill[t] + (25.0 + common[t] + sc.noise_sd * z(rng)) / 100.0;
    }
    out.panel = MarketPanel(cal.days());
    out.panel.set_column(sc.treat, std::move(treat));
    out.panel.set_column(sc.control, std::move(ctrl));
    out.panel.set_column("tbill", tbill);
    return out;
}

MonthlyPanel gen_monthly_scenario(const MonthlyScenario& sc, std::uint64_t seed) {
    if (sc.n_months < 2) throw DomainError("monthly scenario needs at least two months");
    auto rng = stream(seed, 61);
    std::normal_distribution<double> z(0.0, 1.0);
    std::bernoulli_distribution hack(sc.hack_prob);
    MonthlyPanel out;
    out.control_names = {"vix"};
    const auto pcs = ar1_path(Ar1{0.30, 0.05, 0.7}, static_cast<std::size_t>(sc.n_months), rng);
    std::vector<bool> h(static_cast<std::size_t>(sc.n_months));
    int n_hack = 0;
    for (std::size_t m = 0; m < h.size(); ++m) n_hack += (h[m] = hack(rng));
    if (n_hack == 0) h[0] = true;
    if (n_hack == sc.n_months) h[0] = false;
    const double mean = std::accumulate(pcs.begin(), pcs.end(), 0.0) / sc.n_months;
    double var = 0.0;
    for (double p : pcs) var += (p - mean) * (p - mean);
    const double sd = std::sqrt(var / (sc.n_months - 1));
    const int start = Date(2021, 1, 4).month_index();
    for (int m = 0; m < sc.n_months; ++m) {
        MonthlyRow r;
        r.month_index = start + m;
        r.hack_month = h[static_cast<std::size_t>(m)];
        r.pcs = pcs[static_cast<std::size_t>(m)];
        r.pcs_z = (r.pcs - mean) / sd;
        const double vix = 19.44 + 3.0 * z(rng);
        r.controls = {vix};
        const double hk = r.hack_month ? 1.0 : 0.0;
        r.spread = 12.0 + sc.hack_effect * hk + sc.pcs_effect * r.pcs_z + sc.interaction * hk * r.pcs_z +
                   0.1 * (vix - 19.44) + sc.noise_sd * z(rng);
        r.n_days = 21;
        if (!out.rows.empty()) r.spread_change = r.spread - out.rows.back().spread;
        out.rows.push_back(r);
    }
    return out;
}

GbrData gen_gbr_scenario(const GbrScenario& sc, std::uint64_t seed) {
    auto rng = stream(seed, 71);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> gas(10.0, 70.0);
    GbrData d;
    d.features.assign(3, std::vector<double>(static_cast<std::size_t>(sc.n)));
    d.target.resize(static_cast<std::size_t>(sc.n));
    for (std::size_t i = 0; i < d.target.size(); ++i) {
        const double g = gas(rng), v = 19.44 + 5.28 * z(rng), l = 16.98 + 1.97 * z(rng);
        d.features[0][i] = g;
        d.features[1][i] = v;
        d.features[2][i] = l;
        d.target[i] = (g > sc.step_at ? sc.step : 0.0) + sc.vix_slope * (v - 19.44) + sc.loss_slope * (l - 16.98) +
                      sc.noise_sd * z(rng);
    }
    return d;
}

}  // namespace liqrec
