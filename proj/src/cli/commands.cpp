#include "liqrec/cli/commands.hpp"

#include "liqrec/econ/event.hpp"
#include "liqrec/econ/giv.hpp"
#include "liqrec/econ/inference.hpp"
#include "liqrec/econ/iv.hpp"
#include "liqrec/econ/lp.hpp"
#include "liqrec/econ/threshold.hpp"
#include "liqrec/error.hpp"
#include "liqrec/ingest.hpp"

#include <CLI11.hpp>
#include <json.hpp>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <random>
#include <sstream>

namespace liqrec::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw DataError("sha256 failed");
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 15];
    }
    return out;
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Output {
public:
    explicit Output(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec || !fs::is_directory(dir_)) throw DataError("cannot create output directory '" + dir + "'");
    }
    void write(const std::string& name, const std::string& contents) {
        write_file((dir_ / name).string(), contents);
        files_.emplace_back(name, contents);
    }
    std::vector<std::string> finish(const std::string& command, const RunConfig& cfg) {
        ordered_json m;
        m["command"] = command;
        m["seed"] = cfg.seed;
        m["outputs"] = ordered_json::array();
        std::vector<std::string> names;
        for (const auto& [name, body] : files_) {
            m["outputs"].push_back({{"file", name}, {"sha256", sha256_hex(body)}, {"bytes", body.size()}});
            names.push_back(name);
        }
        std::string tag = command;
        std::replace(tag.begin(), tag.end(), ' ', '-');
        write_file((dir_ / ("manifest-" + tag + ".json")).string(), m.dump(2) + "\n");
        names.push_back("manifest-" + tag + ".json");
        return names;
    }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> files_;
};

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

struct Row {
    std::string term;
    double coef = kNaN, se = kNaN, t = kNaN, p = kNaN, lo = kNaN, hi = kNaN;
};

Row row_of(const econ::RegressionResult& r, std::size_t i, const std::string& term) {
    Row x;
    x.term = term;
    x.coef = r.coef(static_cast<Eigen::Index>(i));
    x.se = r.se(i);
    if (std::isfinite(x.se) && x.se > 0) {
        x.t = r.t(i);
        x.p = r.p(i);
        std::tie(x.lo, x.hi) = r.ci(i);
    }
    return x;
}

std::vector<Row> rows_of(const econ::RegressionResult& r, const std::string& prefix = {}) {
    std::vector<Row> out;
    for (std::size_t i = 0; i < r.size(); ++i) out.push_back(row_of(r, i, prefix + r.names[i]));
    return out;
}

Row test_row(const econ::JointTest& t, const std::string& term) {
    Row x;
    x.term = term;
    x.coef = t.f;
    x.p = t.p;
    return x;
}

std::string table_csv(const std::vector<Row>& rows) {
    std::string s = "term,coef,se,t,p,ci_lo,ci_hi\n";
    for (const auto& r : rows)
        s += r.term + "," + format_double(r.coef) + "," + format_double(r.se) + "," + format_double(r.t) + "," +
             format_double(r.p) + "," + format_double(r.lo) + "," + format_double(r.hi) + "\n";
    return s;
}

ordered_json table_json(const std::vector<Row>& rows) {
    ordered_json a = ordered_json::array();
    for (const auto& r : rows)
        a.push_back({{"term", r.term}, {"coef", num(r.coef)}, {"se", num(r.se)}, {"t", num(r.t)}, {"p", num(r.p)},
                     {"ci_lo", num(r.lo)}, {"ci_hi", num(r.hi)}});
    return a;
}

ordered_json meta_json(const econ::RegressionResult& r) {
    ordered_json m;
    m["n_obs"] = r.n_obs;
    m["n_params"] = r.n_params;
    m["n_clusters"] = r.n_clusters;
    m["df_resid"] = r.df_resid;
    m["se_flavor"] = r.se_flavor;
    m["r2"] = num(r.r2);
    m["within_r2"] = num(r.within_r2);
    m["tests"] = ordered_json::array();
    for (const auto& t : r.tests)
        m["tests"].push_back({{"name", t.name}, {"f", num(t.f)}, {"df1", t.df1}, {"df2", t.df2}, {"p", num(t.p)}});
    m["warnings"] = r.warnings;
    return m;
}

void warn(const std::vector<std::string>& w) {
    for (const auto& s : w) std::cerr << "warning: " << s << "\n";
}

void emit_table(Output& out, const std::string& stem, const std::vector<Row>& rows, ordered_json extra) {
    out.write(stem + ".csv", table_csv(rows));
    extra["table"] = table_json(rows);
    out.write(stem + ".json", extra.dump(2) + "\n");
}

std::map<int, double> read_prime_share(const std::string& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::string line;
    std::map<int, double> out;
    int ln = 0;
    while (std::getline(in, line)) {
        ++ln;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (ln == 1 || line.empty()) continue;
        const auto f = split_csv_line(line);
        int y = 0, m = 0;
        char tail = 0;
        if (f.size() != 2 || std::sscanf(f[0].c_str(), "%d-%d%c", &y, &m, &tail) != 2 || m < 1 || m > 12)
            throw DataError(path + ":" + std::to_string(ln) + ": expected YYYY-MM,share");
        char* end = nullptr;
        const double v = std::strtod(f[1].c_str(), &end);
        if (f[1].empty() || *end) throw DataError(path + ":" + std::to_string(ln) + ": bad share value");
        out[y * 12 + m - 1] = v;
    }
    if (out.empty()) throw DataError(path + ": no prime share rows");
    return out;
}

struct Inputs {
    MarketPanel panel;
    Calendar calendar;
    EventCatalog events;
};

Inputs load_inputs(const RunConfig& cfg) {
    Inputs in;
    in.panel = read_panel_csv(cfg.panel_path());
    in.calendar = Calendar(in.panel.dates());
    in.events = parse_events(cfg.events_path(), in.calendar);
    for (const auto& e : in.events.events)
        if (!in.panel.row_of(e.date)) throw DataError("event " + e.date.iso() + " falls outside the panel");
    return in;
}

std::vector<double> event_indicator(const Inputs& in, bool log_loss) {
    std::vector<double> s(in.panel.rows(), 0.0);
    std::map<std::size_t, double> loss;
    for (const auto& e : in.events.events) loss[*in.panel.row_of(e.date)] += e.loss_usd;
    for (const auto& [r, l] : loss) s[r] = log_loss ? std::log(l) : 1.0;
    return s;
}

}  // namespace

std::vector<std::string> cmd_simulate(const RunConfig& cfg) {
    std::vector<Date> holidays;
    if (!cfg.paths.holidays.empty()) holidays = read_date_list(cfg.paths.holidays);
    const auto cal = Calendar::weekdays(cfg.simulate.start, cfg.simulate.end, holidays);
    auto eo = cfg.simulate.events;
    if (!cfg.paths.blackout.empty()) eo.blackout = read_date_list(cfg.paths.blackout);
    const auto events = gen_events(cfg.simulate.n_events, cfg.simulate.loss, cfg.seed, cal, eo);
    auto mk = cfg.simulate.market;
    mk.universe = eo.universe;
    auto m = gen_market(mk, cal, events, cfg.structural, cfg.seed);

    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32), 91u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> z(0.0, 1.0);
    if (cfg.simulate.did_assets) {
        // Rates in percent. aa_nonfin - tbill is the CP spread; a2p2 follows
        // the same path without the event-day moves, plus its own noise.
        const auto n = cal.size();
        const auto& cp = m.panel.column("cp_spread_bps");
        const auto& hack = m.panel.column("hack_day");
        std::vector<double> tb(n), aa(n), a2(n);
        double level = 2.0, event_moves = 0.0;
        for (std::size_t t = 0; t < n; ++t) {
            level = 2.0 + 0.999 * (level - 2.0) + 0.01 * z(rng);
            if (hack[t] != 0.0) event_moves += m.path.flows[t].spread_change;
            tb[t] = level;
            aa[t] = level + cp[t] / 100.0;
            a2[t] = level + (cp[t] - event_moves + 10.0 + z(rng)) / 100.0;
        }
        m.panel.set_column("tbill", tb);
        m.panel.set_column("aa_nonfin", aa);
        m.panel.set_column("a2p2", a2);
    }

    Output out(cfg.paths.out);
    out.write("panel.csv", panel_to_csv(m.panel));
    out.write("events.csv", events_to_csv(m.events));
    out.write("truth.txt", m.truth.to_text());
    if (cfg.simulate.prime_share) {
        std::set<int> hack_months;
        for (const auto& e : m.events.events) hack_months.insert(e.date.month_index());
        std::string s = "month,prime_share\n";
        double x = 0.0;
        for (int mi = cal[0].month_index(); mi <= cal[cal.size() - 1].month_index(); ++mi) {
            x = 0.8 * x + 0.02 * z(rng);
            s += month_label(mi) + "," + format_double(0.30 + x - (hack_months.count(mi) ? 0.01 : 0.0)) + "\n";
        }
        out.write("prime_share.csv", s);
    }
    return out.finish("simulate", cfg);
}

namespace {

econ::EventStudyOptions es_options(const RunConfig& cfg) {
    econ::EventStudyOptions o;
    o.controls = cfg.event_study.controls;
    o.difference_outcome = cfg.event_study.difference_outcome;
    o.window_lo = cfg.event_study.window_lo;
    o.window_hi = cfg.event_study.window_hi;
    return o;
}

StackOptions es_stack(const RunConfig& cfg) {
    return {cfg.event_study.window_lo, cfg.event_study.window_hi, cfg.event_study.outcome, cfg.event_study.controls};
}

std::vector<Row> event_rows(const econ::RegressionResult& r, int lo, int hi, const std::string& prefix) {
    std::vector<Row> rows;
    for (int k = lo; k <= hi; ++k) {
        if (k == -1) {
            Row b;
            b.term = prefix + econ::rel_day_name(k);
            b.coef = 0.0;
            rows.push_back(b);
            continue;
        }
        const auto name = prefix + econ::rel_day_name(k);
        rows.push_back(row_of(r, r.index(name), name));
    }
    return rows;
}

}  // namespace

std::vector<std::string> cmd_estimate(const RunConfig& cfg, const std::string& which) {
    static const std::set<std::string> known{"event-study", "threshold", "giv", "lp", "did", "monthly"};
    if (!known.count(which))
        throw ConfigError("unknown estimator '" + which + "' (event-study | threshold | giv | lp | did | monthly)");
    auto in = load_inputs(cfg);
    Output out(cfg.paths.out);
    const std::string stem = which;
    if (which == "event-study") {
        const auto st = build_stacked_panel(in.panel, in.events, es_stack(cfg));
        warn(st.warnings);
        const auto r = econ::event_study(st, es_options(cfg));
        warn(r.warnings);
        auto rows = event_rows(r, st.window_lo, st.window_hi, "");
        if (const auto* t = r.test("pretrend")) rows.push_back(test_row(*t, "joint_pretrend_F"));
        ordered_json extra;
        extra["estimator"] = "stacked event study";
        extra["meta"] = meta_json(r);
        std::vector<Row> ctrl;
        for (const auto& c : cfg.event_study.controls) ctrl.push_back(row_of(r, r.index(c), c));
        extra["controls"] = table_json(ctrl);
        emit_table(out, stem, rows, extra);
    } else if (which == "threshold") {
        const auto st = build_stacked_panel(
            in.panel, in.events,
            {cfg.threshold.window_lo, cfg.threshold.window_hi, cfg.event_study.outcome, cfg.threshold.controls});
        warn(st.warnings);
        econ::ThresholdOptions o;
        o.threshold_var = cfg.threshold.threshold_var;
        o.controls = cfg.threshold.controls;
        o.trim = cfg.threshold.trim;
        o.n_bootstrap = cfg.threshold.bootstrap;
        o.seed = cfg.seed;
        o.threads = cfg.threads;
        const auto r = econ::threshold_regression(st, o);
        warn(r.warnings);
        auto reg_row = [](const std::string& term, double b, double se, double df) {
            Row x;
            x.term = term;
            x.coef = b;
            x.se = se;
            if (se > 0) {
                x.t = b / se;
                x.p = econ::student_t_two_sided_p(x.t, df);
                const double q = econ::student_t_quantile(0.975, df);
                x.lo = b - q * se;
                x.hi = b + q * se;
            }
            return x;
        };
        const double df = static_cast<double>(st.distinct_events().size()) - 1.0;
        Row g;
        g.term = "gamma_hat";
        g.coef = r.gamma_hat;
        g.lo = r.ci_95.first;
        g.hi = r.ci_95.second;
        Row f;
        f.term = "threshold_F";
        f.coef = r.f_stat;
        f.p = r.bootstrap_p;
        std::vector<Row> rows{g, reg_row("post_low", r.beta1, r.se_beta1, df),
                              reg_row("post_high", r.beta2, r.se_beta2, df), f};
        ordered_json extra;
        extra["estimator"] = "panel threshold regression";
        extra["gamma_hat"] = num(r.gamma_hat);
        extra["ci_95"] = {num(r.ci_95.first), num(r.ci_95.second)};
        extra["bootstrap_p"] = num(r.bootstrap_p);
        extra["n_bootstrap"] = r.n_bootstrap;
        extra["f_stat"] = num(r.f_stat);
        extra["beta1"] = num(r.beta1);
        extra["se_beta1"] = num(r.se_beta1);
        extra["beta2"] = num(r.beta2);
        extra["se_beta2"] = num(r.se_beta2);
        extra["n_obs"] = r.n_obs;
        ordered_json grid = ordered_json::array();
        for (std::size_t j = 0; j < r.grid.size(); ++j)
            grid.push_back({{"gamma", num(r.grid[j])}, {"ssr", num(r.ssr[j])}, {"lr", num(r.lr[j])}});
        extra["grid"] = grid;
        extra["warnings"] = r.warnings;
        emit_table(out, stem, rows, extra);
        std::string lr = "gamma,lr\n";
        for (std::size_t j = 0; j < r.grid.size(); ++j) lr += format_double(r.grid[j]) + "," + format_double(r.lr[j]) + "\n";
        out.write("threshold_lr_curve.csv", lr);
    } else if (which == "giv") {
        if (!in.panel.has_column("giv_z")) {
            const auto days = econ::giv_days_from_events(in.events, cfg.giv.market_tvl_usd, cfg.giv.n_active);
            in.panel.set_column("giv_z", econ::giv_on_calendar(econ::build_giv(days), in.panel.dates()));
        }
        if (!in.panel.has_column("hack_day")) in.panel.set_column("hack_day", event_indicator(in, false));
        econ::TslsOptions o;
        o.instrument_lag = cfg.giv.instrument_lag;
        o.winsor_pct = cfg.giv.winsor_pct;
        o.nw_lag = cfg.giv.nw_lag;
        o.event_day_control = cfg.giv.event_day_control;
        o.factors = cfg.giv.factors;
        o.window_lo = cfg.giv.window_lo;
        o.window_hi = cfg.giv.window_hi;
        o.weak_f = cfg.giv.weak_f;
        o.outcome = cfg.event_study.outcome;
        const auto r = econ::tsls(in.panel, in.events, o);
        warn(r.warnings);
        auto rows = rows_of(r.first, "first:");
        auto second = rows_of(r.second, "second:");
        rows.insert(rows.end(), second.begin(), second.end());
        Row m = row_of(r.second, r.second.index("post_x_hat_flow"), "multiplier_bps_per_100m");
        for (double* v : {&m.coef, &m.se, &m.lo, &m.hi}) *v *= 1e8;
        rows.push_back(m);
        rows.push_back(test_row(*r.first.test("instrument_f"), "first_stage_F"));
        ordered_json extra;
        extra["estimator"] = "GIV two-stage least squares";
        extra["first_stage_f"] = num(r.first_stage_f);
        extra["weak_instrument"] = r.weak;
        extra["multiplier_bps_per_100m"] = num(r.multiplier);
        extra["multiplier_se"] = num(r.multiplier_se);
        extra["first_stage"] = meta_json(r.first);
        extra["second_stage"] = meta_json(r.second);
        extra["warnings"] = r.warnings;
        emit_table(out, stem, rows, extra);
    } else if (which == "lp") {
        const auto shock = event_indicator(in, cfg.lp.shock == "log_loss");
        std::vector<std::vector<double>> ctrl;
        for (const auto& c : cfg.lp.controls) ctrl.push_back(in.panel.column(c));
        econ::LpOptions o;
        o.horizons = cfg.lp.horizons;
        o.outcome_lags = cfg.lp.outcome_lags;
        o.control_names = cfg.lp.controls;
        const auto res = econ::local_projections(in.panel.column(cfg.lp.outcome), shock, ctrl, o);
        std::vector<Row> rows;
        ordered_json metas = ordered_json::array();
        for (std::size_t h = 0; h < res.size(); ++h) {
            rows.push_back(row_of(res[h], res[h].index("shock"), "h=" + std::to_string(h)));
            metas.push_back(meta_json(res[h]));
        }
        ordered_json extra;
        extra["estimator"] = "local projections";
        extra["shock"] = cfg.lp.shock;
        extra["horizons"] = metas;
        emit_table(out, stem, rows, extra);
    } else if (which == "did") {
        DidOptions o;
        o.assets = cfg.did.assets;
        o.treat_asset = cfg.did.treat;
        o.tbill = cfg.did.tbill;
        o.window_lo = cfg.did.window_lo;
        o.window_hi = cfg.did.window_hi;
        const auto d = build_did_panel(in.panel, in.events, o);
        warn(d.warnings);
        const auto r = econ::did_event_study(d);
        ordered_json extra;
        extra["estimator"] = "dynamic difference-in-differences";
        extra["treat"] = cfg.did.treat;
        extra["meta"] = meta_json(r);
        emit_table(out, stem, event_rows(r, d.window_lo, d.window_hi, "treat:"), extra);
    } else if (which == "monthly") {
        const auto st = build_stacked_panel(in.panel, in.events, es_stack(cfg));
        MonthlyOptions mo;
        mo.event_window_days_only = cfg.monthly.event_window_days_only;
        mo.controls = cfg.monthly.controls;
        const auto share = read_prime_share(cfg.prime_share_path());
        const auto mp = aggregate_monthly(st, in.panel, share, in.events.dates(), mo);
        warn(mp.warnings);
        const auto r = econ::state_dependence_monthly(
            mp, cfg.monthly.spec == "level" ? econ::MonthlySpec::level : econ::MonthlySpec::change);
        ordered_json extra;
        extra["estimator"] = "monthly state dependence";
        extra["spec"] = cfg.monthly.spec;
        extra["meta"] = meta_json(r);
        emit_table(out, stem, rows_of(r), extra);
        std::string s = "month,spread,spread_change,hack_month,pcs,pcs_z,n_days\n";
        for (const auto& m : mp.rows)
            s += month_label(m.month_index) + "," + format_double(m.spread) + "," +
                 format_double(m.spread_change.value_or(kNaN)) + "," + (m.hack_month ? "1" : "0") + "," +
                 format_double(m.pcs) + "," + format_double(m.pcs_z) + "," + std::to_string(m.n_days) + "\n";
        out.write("monthly_panel.csv", s);
    }
    return out.finish("estimate " + which, cfg);
}

std::vector<std::string> cmd_placebo(const RunConfig& cfg) {
    const auto in = load_inputs(cfg);
    const auto st = build_stacked_panel(in.panel, in.events, es_stack(cfg));
    const auto real = econ::event_study(st, es_options(cfg));
    econ::PlaceboOptions o;
    o.tol_vix = cfg.placebo.tol_vix;
    o.tol_spread = cfg.placebo.tol_spread;
    o.exclusion_days = cfg.placebo.exclusion_days;
    o.n_draws = cfg.placebo.n_draws;
    o.n_dates = cfg.placebo.n_dates;
    o.seed = cfg.seed;
    o.threads = cfg.threads;
    o.outcome = cfg.event_study.outcome;
    o.controls = cfg.event_study.controls;
    o.window_lo = cfg.event_study.window_lo;
    o.window_hi = cfg.event_study.window_hi;
    o.es = es_options(cfg);
    const auto r = econ::placebo(real, in.panel, in.events, o);

    Output out(cfg.paths.out);
    std::string s = "k,actual,p_value\n";
    for (std::size_t j = 0; j < r.rel_days.size(); ++j)
        s += std::to_string(r.rel_days[j]) + "," + format_double(r.actual[j]) + "," + format_double(r.p_value[j]) + "\n";
    out.write("placebo.csv", s);
    std::string d = "draw";
    for (int k : r.rel_days) d += "," + econ::rel_day_name(k);
    d += "\n";
    for (std::size_t i = 0; i < r.draws.size(); ++i) {
        d += std::to_string(i);
        for (double v : r.draws[i]) d += "," + format_double(v);
        d += "\n";
    }
    out.write("placebo_draws.csv", d);
    ordered_json j;
    j["pool_size"] = r.pool_size;
    j["n_draws"] = r.draws.size();
    j["mu_vix"] = num(r.mu_vix);
    j["mu_spread"] = num(r.mu_spread);
    j["tol_vix"] = num(r.tol_vix);
    j["tol_spread"] = num(r.tol_spread);
    j["rel_days"] = r.rel_days;
    ordered_json p = ordered_json::array();
    for (std::size_t k = 0; k < r.rel_days.size(); ++k)
        p.push_back({{"k", r.rel_days[k]}, {"actual", num(r.actual[k])}, {"p_value", num(r.p_value[k])}});
    j["table"] = p;
    out.write("placebo.json", j.dump(2) + "\n");
    return out.finish("placebo", cfg);
}

std::vector<std::string> cmd_calibrate(const RunConfig& cfg) {
    const auto& c = cfg.calibrate;
    Output out(cfg.paths.out);
    ordered_json j;

    const auto eta = econ::eta_recovery(c.beta, c.se, c.lambda_grid);
    std::string s = "lambda,eta,se,ci_lo,ci_hi\n";
    j["eta"] = ordered_json::array();
    for (const auto& r : eta) {
        s += format_double(r.lambda) + "," + format_double(r.eta) + "," + format_double(r.se) + "," +
             format_double(r.ci_lo) + "," + format_double(r.ci_hi) + "\n";
        j["eta"].push_back({{"lambda", r.lambda}, {"eta", r.eta}, {"se", r.se}, {"ci_lo", r.ci_lo}, {"ci_hi", r.ci_hi}});
    }
    out.write("eta_table.csv", s);

    s = "psi,loss_l,xi_star,w_star,eta_implied,corner,saturated\n";
    j["ambiguity"] = ordered_json::array();
    for (double psi : c.psi_grid)
        for (double l : c.loss_grid) {
            Preferences p = c.preferences;
            p.psi_amb = psi;
            JumpAsset a = c.asset;
            a.loss_l = l;
            const auto r = optimal_weight(p, a);
            s += format_double(psi) + "," + format_double(l) + "," + format_double(r.xi_star) + "," +
                 format_double(r.w_star) + "," + format_double(r.eta_implied) + "," + (r.corner ? "1" : "0") + "," +
                 (r.saturated ? "1" : "0") + "\n";
            j["ambiguity"].push_back({{"psi", psi}, {"loss_l", l}, {"xi_star", num(r.xi_star)}, {"w_star", num(r.w_star)},
                                      {"eta_implied", num(r.eta_implied)}, {"corner", r.corner},
                                      {"saturated", r.saturated}});
        }
    out.write("ambiguity.csv", s);

    const double cbar = avg_congestion(c.game);
    const double theta = run_threshold(cbar);
    s = "a,c_bar,theta_star,theta_amb,gas_threshold_gwei\n";
    j["game"] = ordered_json::array();
    for (double a : c.a_grid) {
        const double ta = ambiguous_threshold(cbar, a);
        const double gas = gas_threshold(ta, c.gas_map);
        s += format_double(a) + "," + format_double(cbar) + "," + format_double(theta) + "," + format_double(ta) + "," +
             format_double(gas) + "\n";
        j["game"].push_back({{"a", a}, {"c_bar", cbar}, {"theta_star", theta}, {"theta_amb", ta}, {"gas_threshold_gwei", gas}});
    }
    out.write("game.csv", s);
    out.write("calibrate.json", j.dump(2) + "\n");
    return out.finish("calibrate", cfg);
}

std::vector<std::string> cmd_report(const RunConfig& cfg) {
    const fs::path dir(cfg.paths.out);
    if (!fs::is_directory(dir)) throw DataError("report: output directory '" + cfg.paths.out + "' does not exist");
    std::vector<fs::path> manifests;
    for (const auto& e : fs::directory_iterator(dir)) {
        const auto name = e.path().filename().string();
        if (name.rfind("manifest-", 0) == 0 && name != "manifest-report.json") manifests.push_back(e.path());
    }
    std::sort(manifests.begin(), manifests.end());
    if (manifests.empty()) throw DataError("report: no manifests in '" + cfg.paths.out + "'");
    std::string rep = "# Results\n";
    for (const auto& mpath : manifests) {
        json m;
        try {
            m = json::parse(read_file(mpath.string()));
        } catch (const json::exception& e) {
            throw DataError(mpath.string() + ": " + e.what());
        }
        rep += "\n## " + m.at("command").get<std::string>() + "\n";
        for (const auto& o : m.at("outputs")) {
            const auto file = o.at("file").get<std::string>();
            const auto body = read_file((dir / file).string());
            if (sha256_hex(body) != o.at("sha256").get<std::string>())
                throw DataError("report: " + file + " does not match its manifest hash");
            if (file.size() < 4 || file.substr(file.size() - 4) != ".csv" || file == "panel.csv" ||
                file == "placebo_draws.csv" || file == "events.csv")
                continue;
            rep += "\n### " + file + "\n\n```\n" + body + "```\n";
        }
    }
    Output out(cfg.paths.out);
    out.write("report.md", rep);
    return out.finish("report", cfg);
}

int run(int argc, char** argv) {
    CLI::App app{"liqrec: DeFi exploit liquidity spillover toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<int> threads;
    app.add_option("--config", config_path, "JSON run configuration")->required();
    app.add_option("--seed", seed, "override the configured seed");
    app.add_option("--out", out_dir, "override the output directory");
    app.add_option("--threads", threads, "cap on worker threads (0 = all cores)");
    auto* sim = app.add_subcommand("simulate", "synthetic panel, events and ground truth");
    auto* est = app.add_subcommand("estimate", "run one estimator");
    std::string which;
    std::optional<int> bootstrap;
    est->add_option("which", which, "event-study | threshold | giv | lp | did | monthly")->required();
    est->add_option("--bootstrap", bootstrap, "threshold bootstrap replications");
    auto* plc = app.add_subcommand("placebo", "covariate-adaptive placebo test");
    std::optional<int> draws;
    plc->add_option("--draws", draws, "number of placebo draws");
    auto* cal = app.add_subcommand("calibrate", "eta table, robust portfolio and run thresholds");
    auto* rep = app.add_subcommand("report", "collect result tables into report.md");
    for (auto* s : {sim, est, plc, cal, rep}) s->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }

    try {
        RunConfig cfg = load_config(config_path);
        apply_env_overrides(cfg);
        if (seed) cfg.seed = *seed;
        if (out_dir) cfg.paths.out = *out_dir;
        if (threads) cfg.threads = *threads;
        if (bootstrap) cfg.threshold.bootstrap = *bootstrap;
        if (draws) cfg.placebo.n_draws = *draws;
        validate(cfg);

        std::vector<std::string> files;
        if (*sim) files = cmd_simulate(cfg);
        else if (*est) files = cmd_estimate(cfg, which);
        else if (*plc) files = cmd_placebo(cfg);
        else if (*cal) files = cmd_calibrate(cfg);
        else files = cmd_report(cfg);
        std::cout << "wrote " << files.size() << " files to " << cfg.paths.out << "\n";
        for (const auto& f : files) std::cout << "  " << f << "\n";
        return kOk;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DomainError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const DataError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const EstimatorError& e) {
        std::cerr << "estimator error: " << e.what() << "\n";
        return kEstimatorError;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "estimator error: " << e.what() << "\n";
        return kEstimatorError;
    }
}

}  // namespace liqrec::cli
