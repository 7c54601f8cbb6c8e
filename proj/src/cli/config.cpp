#include "liqrec/cli/config.hpp"

#include "liqrec/error.hpp"
#include "liqrec/ingest.hpp"

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <set>

namespace liqrec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Reads keys from one JSON object and rejects anything it was not asked for.
class Section {
public:
    Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + ": expected an object");
    }
    ~Section() = default;

    template <class T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(where(key) + ": wrong type (" + std::string(j_.at(key).type_name()) + ")");
        }
    }
    void get_date(const char* key, Date& out) {
        std::string s;
        get(key, s);
        if (j_.contains(key)) {
            const auto d = Date::parse(s);
            if (!d) throw ConfigError(where(key) + ": not a YYYY-MM-DD date");
            out = *d;
        }
    }
    void get_window(const char* key, int& lo, int& hi) {
        std::vector<int> w{lo, hi};
        get(key, w);
        if (w.size() != 2) throw ConfigError(where(key) + ": expected [lo, hi]");
        lo = w[0];
        hi = w[1];
    }
    bool has(const char* key) const { return j_.contains(key); }
    Section sub(const char* key) {
        seen_.insert(key);
        static const json empty = json::object();
        return Section(j_.contains(key) ? j_.at(key) : empty, where(key));
    }
    void finish() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) throw ConfigError("unknown key '" + where(k.c_str()) + "'");
    }

private:
    std::string where(const char* key = nullptr) const {
        std::string p = path_.empty() ? std::string() : path_;
        if (key) p += (p.empty() ? "" : ".") + std::string(key);
        return p.empty() ? "<root>" : p;
    }
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

std::string resolve(const std::string& p, const std::string& base) {
    if (p.empty() || fs::path(p).is_absolute()) return p;
    return (fs::path(base) / p).lexically_normal().string();
}

}  // namespace

std::string RunConfig::panel_path() const {
    return paths.panel.empty() ? (fs::path(paths.out) / "panel.csv").string() : paths.panel;
}
std::string RunConfig::events_path() const {
    return paths.events.empty() ? (fs::path(paths.out) / "events.csv").string() : paths.events;
}
std::string RunConfig::prime_share_path() const {
    return paths.prime_share.empty() ? (fs::path(paths.out) / "prime_share.csv").string() : paths.prime_share;
}

RunConfig parse_config(const std::string& text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    Section root(j, "");
    root.get("seed", c.seed);
    root.get("threads", c.threads);
    {
        auto s = root.sub("paths");
        s.get("panel", c.paths.panel);
        s.get("events", c.paths.events);
        s.get("prime_share", c.paths.prime_share);
        s.get("holidays", c.paths.holidays);
        s.get("blackout", c.paths.blackout);
        s.get("out", c.paths.out);
        s.finish();
    }
    {
        auto s = root.sub("structural");
        auto& p = c.structural;
        s.get("kappa", p.kappa);
        s.get("phi0", p.phi0);
        s.get("phi1", p.phi1);
        s.get("gamma_c", p.gamma_c);
        s.get("rho0", p.rho0);
        s.get("rho1", p.rho1);
        s.get("rho2", p.rho2);
        s.get("psi", p.psi);
        s.get("omega_bar", p.omega_bar);
        s.get("eta", p.eta);
        s.get("lambda_price", p.lambda_price);
        s.finish();
    }
    {
        auto s = root.sub("simulate");
        auto& b = c.simulate;
        s.get_date("start", b.start);
        s.get_date("end", b.end);
        s.get("n_events", b.n_events);
        s.get("loss_log_mean", b.loss.log_mean);
        s.get("loss_log_sd", b.loss.log_sd);
        s.get("n_protocols", b.events.universe.n_protocols);
        s.get("zipf_exponent", b.events.universe.zipf_exponent);
        s.get("market_tvl_usd", b.events.universe.market_tvl_usd);
        s.get("min_spacing", b.events.min_spacing);
        s.get("edge_margin", b.events.edge_margin);
        s.get("did_assets", b.did_assets);
        s.get("prime_share", b.prime_share);
        auto m = s.sub("market");
        m.get("vix_loading", b.market.vix_loading);
        m.get("btc_mean", b.market.btc_mean);
        m.get("btc_sd", b.market.btc_sd);
        m.get("spread_sd", b.market.noise.spread_sd);
        m.get("baseline_spread", b.market.noise.baseline_spread);
        m.get("float_usd", b.market.noise.float_usd);
        m.get("flow_sd_usd", b.market.noise.flow_sd_usd);
        m.get("settlement_lag", b.market.noise.settlement_lag);
        m.finish();
        s.finish();
        b.market.universe = b.events.universe;
    }
    {
        auto s = root.sub("event_study");
        auto& b = c.event_study;
        s.get_window("window", b.window_lo, b.window_hi);
        s.get("outcome", b.outcome);
        s.get("controls", b.controls);
        s.get("difference_outcome", b.difference_outcome);
        s.finish();
    }
    {
        auto s = root.sub("threshold");
        auto& b = c.threshold;
        s.get_window("window", b.window_lo, b.window_hi);
        s.get("threshold_var", b.threshold_var);
        s.get("controls", b.controls);
        s.get("trim", b.trim);
        s.get("bootstrap", b.bootstrap);
        s.finish();
    }
    {
        auto s = root.sub("giv");
        auto& b = c.giv;
        s.get("instrument_lag", b.instrument_lag);
        s.get("winsor_pct", b.winsor_pct);
        s.get("nw_lag", b.nw_lag);
        s.get("event_day_control", b.event_day_control);
        s.get("factors", b.factors);
        s.get_window("window", b.window_lo, b.window_hi);
        s.get("weak_f", b.weak_f);
        s.get("market_tvl_usd", b.market_tvl_usd);
        s.get("n_active", b.n_active);
        s.finish();
    }
    {
        auto s = root.sub("lp");
        auto& b = c.lp;
        s.get("horizons", b.horizons);
        s.get("outcome_lags", b.outcome_lags);
        s.get("shock", b.shock);
        s.get("outcome", b.outcome);
        s.get("controls", b.controls);
        s.finish();
    }
    {
        auto s = root.sub("did");
        auto& b = c.did;
        s.get("assets", b.assets);
        s.get("treat", b.treat);
        s.get("tbill", b.tbill);
        s.get_window("window", b.window_lo, b.window_hi);
        s.finish();
    }
    {
        auto s = root.sub("monthly");
        auto& b = c.monthly;
        s.get("spec", b.spec);
        s.get("controls", b.controls);
        s.get("event_window_days_only", b.event_window_days_only);
        s.finish();
    }
    {
        auto s = root.sub("placebo");
        auto& b = c.placebo;
        s.get("n_draws", b.n_draws);
        s.get("n_dates", b.n_dates);
        s.get("exclusion_days", b.exclusion_days);
        s.get("tol_vix", b.tol_vix);
        s.get("tol_spread", b.tol_spread);
        s.finish();
    }
    {
        auto s = root.sub("calibrate");
        auto& b = c.calibrate;
        s.get("beta", b.beta);
        s.get("se", b.se);
        s.get("lambda_grid", b.lambda_grid);
        s.get("psi_grid", b.psi_grid);
        s.get("loss_grid", b.loss_grid);
        s.get("a_grid", b.a_grid);
        auto pr = s.sub("preferences");
        pr.get("gamma_r", b.preferences.gamma_r);
        pr.get("delta_d", b.preferences.delta_d);
        pr.get("psi_amb", b.preferences.psi_amb);
        pr.get("a_scale", b.preferences.a_scale);
        pr.finish();
        auto as = s.sub("asset");
        as.get("mu", b.asset.mu);
        as.get("sigma", b.asset.sigma);
        as.get("lambda_jump", b.asset.lambda_jump);
        as.get("loss_l", b.asset.loss_l);
        as.finish();
        auto g = s.sub("game");
        g.get("phi0_g", b.game.phi0_g);
        g.get("gamma_g", b.game.gamma_g);
        g.get("lambda_g", b.game.lambda_g);
        g.get("ambiguity_a", b.game.ambiguity_a);
        g.finish();
        auto gm = s.sub("gas_map");
        gm.get("m", b.gas_map.m);
        gm.get("b", b.gas_map.b);
        gm.finish();
        s.finish();
    }
    root.finish();

    for (std::string* p : {&c.paths.panel, &c.paths.events, &c.paths.prime_share, &c.paths.holidays,
                           &c.paths.blackout, &c.paths.out})
        *p = resolve(*p, base_dir);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::string text;
    try {
        text = read_file(path);
    } catch (const DataError& e) {
        throw ConfigError(std::string("cannot read config: ") + e.what());
    }
    const auto base = fs::path(path).parent_path().string();
    return parse_config(text, base.empty() ? "." : base);
}

void apply_env_overrides(RunConfig& c) {
    if (const char* s = std::getenv("LIQREC_SEED")) {
        char* end = nullptr;
        const auto v = std::strtoull(s, &end, 10);
        if (!*s || *end) throw ConfigError("LIQREC_SEED is not an unsigned integer");
        c.seed = v;
    }
    if (const char* s = std::getenv("LIQREC_OUT")) c.paths.out = s;
    if (const char* s = std::getenv("LIQREC_PANEL")) c.paths.panel = s;
    if (const char* s = std::getenv("LIQREC_EVENTS")) c.paths.events = s;
    if (const char* s = std::getenv("LIQREC_PRIME_SHARE")) c.paths.prime_share = s;
}

void validate(const RunConfig& c) {
    auto need = [](bool ok, const std::string& msg) {
        if (!ok) throw ConfigError(msg);
    };
    try {
        c.structural.validate();
        c.calibrate.preferences.validate();
        c.calibrate.asset.validate();
        c.calibrate.game.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    need(c.threads >= 0, "threads must be >= 0");
    need(!c.paths.out.empty(), "paths.out must not be empty");
    const auto& s = c.simulate;
    need(s.start <= s.end, "simulate.start must not be after simulate.end");
    need(s.n_events >= 0, "simulate.n_events must be >= 0");
    need(s.loss.log_sd >= 0, "simulate.loss_log_sd must be >= 0");
    need(s.events.universe.n_protocols >= 1, "simulate.n_protocols must be >= 1");
    need(s.events.universe.market_tvl_usd > 0, "simulate.market_tvl_usd must be > 0");
    need(s.events.min_spacing >= 0 && s.events.edge_margin >= 0, "simulate spacing and margin must be >= 0");
    need(s.market.btc_sd >= 0 && s.market.noise.spread_sd >= 0 && s.market.noise.flow_sd_usd >= 0 &&
             s.market.noise.settlement_lag >= 0 && s.market.noise.float_usd > 0,
         "simulate.market: noise settings must be >= 0 and float_usd > 0");
    auto window = [&](int lo, int hi, const std::string& name) {
        need(lo <= -1 && hi >= 0, name + ".window must contain -1 and 0");
    };
    window(c.event_study.window_lo, c.event_study.window_hi, "event_study");
    window(c.threshold.window_lo, c.threshold.window_hi, "threshold");
    window(c.giv.window_lo, c.giv.window_hi, "giv");
    window(c.did.window_lo, c.did.window_hi, "did");
    need(c.threshold.trim >= 0 && c.threshold.trim < 0.5, "threshold.trim must lie in [0, 0.5)");
    need(c.threshold.bootstrap >= 0, "threshold.bootstrap must be >= 0");
    need(c.giv.instrument_lag >= 0 && c.giv.nw_lag >= 0, "giv lags must be >= 0");
    need(c.giv.winsor_pct >= 0 && c.giv.winsor_pct < 50, "giv.winsor_pct must lie in [0, 50)");
    need(c.giv.market_tvl_usd > 0 && c.giv.n_active >= 1, "giv.market_tvl_usd and giv.n_active must be positive");
    need(c.lp.horizons >= 0 && c.lp.outcome_lags >= 0, "lp horizons and lags must be >= 0");
    need(c.lp.shock == "binary" || c.lp.shock == "log_loss", "lp.shock must be 'binary' or 'log_loss'");
    need(c.did.assets.size() >= 2, "did.assets needs at least two assets");
    need(c.monthly.spec == "level" || c.monthly.spec == "change", "monthly.spec must be 'level' or 'change'");
    need(c.placebo.n_draws >= 1, "placebo.n_draws must be >= 1");
    need(c.placebo.exclusion_days >= 0, "placebo.exclusion_days must be >= 0");
    need(c.calibrate.se >= 0, "calibrate.se must be >= 0");
    for (double l : c.calibrate.lambda_grid) need(l > 0, "calibrate.lambda_grid entries must be > 0");
    for (double p : c.calibrate.psi_grid) need(p > 0, "calibrate.psi_grid entries must be > 0");
    for (double l : c.calibrate.loss_grid) need(l >= 0 && l < 1, "calibrate.loss_grid entries must lie in [0, 1)");
    for (double a : c.calibrate.a_grid) need(a >= 1, "calibrate.a_grid entries must be >= 1");
}

}  // namespace liqrec::cli
