#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

#include "zflow/harness.hpp"

namespace zflow::harness {

namespace fs = std::filesystem;

namespace {

constexpr double kZerosHeightCap = 200.0;

struct Context {
    const Json& cfg;
    Json& summary;
    std::optional<fs::path> out_dir;
    std::ostream& out;
    std::ostream& err;

    // Path of an artifact inside --out, recorded in the summary; nullopt without --out.
    std::optional<fs::path> artifact(const std::string& name) {
        if (!out_dir) return std::nullopt;
        const fs::path p = *out_dir / name;
        summary["artifacts"].push_back(p.string());
        return p;
    }
};

Json complex_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Complex get_complex(const Json& cfg, const std::string& key) {
    const Json& v = cfg.at(key);
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_string()) return parse_complex(v.get<std::string>());
    if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError("'" + key + "' must be a number, a string or [re, im]");
}

Complex require_complex(const Json& cfg, const std::string& key) {
    if (!cfg.contains(key)) throw ConfigError("missing required parameter '" + key + "'");
    return get_complex(cfg, key);
}

EvalConfig eval_config(const Json& cfg) {
    EvalConfig ec;
    ec.abs_tol = cfg.value("abs_tol", ec.abs_tol);
    ec.trunc_threshold = std::min(ec.trunc_threshold, ec.abs_tol / 10.0);
    ec.validate();
    return ec;
}

std::optional<std::uint64_t> seed_of(const Json& cfg) {
    if (!cfg.contains("seed")) return std::nullopt;
    return cfg.at("seed").get<std::uint64_t>();
}

Json eval_json(Complex s, const EvalResult& r) {
    return Json{{"s", complex_json(s)},
                {"value", complex_json(r.value)},
                {"abs_err", r.abs_err},
                {"path", std::string(to_string(r.path))}};
}

// ---------------------------------------------------------------- eval

void cmd_eval(Context& ctx) {
    const Json& c = ctx.cfg;
    const std::string subject = c.value("subject", std::string("zeta"));
    const Complex s = require_complex(c, "s");
    const bool deriv = c.value("deriv", false);
    Json result;
    if (subject == "zeta" || subject == "hurwitz") {
        const double alpha = subject == "zeta" ? 1.0 : c.at("alpha").get<double>();
        const EvalConfig ec = eval_config(c);
        result = eval_json(s, hurwitz_zeta_detailed(s, alpha, ec));
        result["alpha"] = alpha;
        if (deriv) result["derivative"] = complex_json(hurwitz_zeta_deriv(s, alpha, ec));
    } else if (subject == "l") {
        const LFunction L = make_nonlinearity(c);
        result = eval_json(s, L.evaluate(s));
        result["period"] = L.period();
        if (deriv) result["derivative"] = complex_json(L.derivative(s));
    } else {
        throw ConfigError("eval subject must be zeta, hurwitz or l");
    }
    ctx.summary["result"] = result;
}

// ---------------------------------------------------------------- l

void cmd_l(Context& ctx) {
    const Json& c = ctx.cfg;
    const LFunction L = make_nonlinearity(c);
    Json result{{"period", L.period()},
                {"principal", L.character().is_principal()},
                {"real", L.character().is_real()},
                {"character", Json::parse(character_to_json(L.character()))}};
    if (c.contains("s")) {
        const Complex s = get_complex(c, "s");
        result["evaluation"] = eval_json(s, L.evaluate(s));
        result["derivative"] = complex_json(L.derivative(s));
        if (s.real() > 1.0) {
            const auto rb = re_bounds_check(L, s);
            result["re_bounds"] = Json{{"lower", rb.lower},
                                       {"upper", rb.upper},
                                       {"imag_bound", rb.imag_bound},
                                       {"ok", rb.all_ok()}};
        }
    }
    if (c.contains("sigma")) {
        const double sigma = c.at("sigma").get<double>();
        const double t_max = c.value("tmax", 50.0);
        const double t_step = c.value("tstep", 0.05);
        if (!(t_max > 0.0) || !(t_step > 0.0)) throw ConfigError("line scan needs tmax, tstep > 0");
        const auto [t_min, re_min] = min_real_part(L, sigma, t_max, t_step);
        result["line"] = Json{{"sigma", sigma}, {"tmax", t_max}, {"min_re", re_min}, {"argmin_t", t_min}};
        if (auto path = ctx.artifact("l_line.csv")) {
            CsvWriter csv(*path, {"t", "re", "im"});
            const auto steps = static_cast<long>(std::floor(t_max / t_step));
            for (long j = 0; j <= steps; ++j) {
                const double t = static_cast<double>(j) * t_step;
                const Complex v = L({sigma, t});
                csv.row({t, v.real(), v.imag()});
            }
        }
    }
    ctx.summary["result"] = result;
}

// ---------------------------------------------------------------- zeros

void cmd_zeros(Context& ctx) {
    const Json& c = ctx.cfg;
    const double t_max = c.value("tmax", 100.0);
    if (!(t_max >= 0.0) || t_max > kZerosHeightCap) throw ConfigError("zeros needs 0 <= tmax <= 200");
    const ZeroSearch search = find_critical_zeros(t_max, eval_config(c));
    const auto proportion = sink_proportion(search.zeros);

    Json list = Json::array();
    for (const auto& z : search.zeros) list.push_back(zero_to_json(z));
    Json result{{"tmax", t_max}, {"count", search.zeros.size()}, {"warnings", search.warnings}};
    result["sinks"] = std::count_if(search.zeros.begin(), search.zeros.end(), [](const auto& z) { return z.attracting(); });
    if (!proportion.empty()) result["final_proportion"] = proportion.back().second;

    if (c.value("verify", false) && t_max > 1.0) {
        result["argument_principle_count"] = argument_principle_count(-1e-3, 1.0 + 1e-3, 1.0, t_max, 0.01, eval_config(c));
    }
    if (auto path = ctx.artifact("zeros.json")) {
        std::ofstream(*path) << list.dump(2) << '\n';
    }
    if (auto path = ctx.artifact("proportion.csv")) {
        CsvWriter csv(*path, {"n", "proportion"});
        for (const auto& [n, p] : proportion) csv.row({static_cast<double>(n), p});
    }
    result["zeros"] = list;
    ctx.summary["result"] = result;
}

// ---------------------------------------------------------------- bounds

void cmd_bounds(Context& ctx) {
    const Json& c = ctx.cfg;
    const double beta = c.value("beta", 2.0);
    const int m = c.value("m", 1);
    if (m < 1) throw ConfigError("m must be >= 1");
    const double alpha = c.value("alpha", 1.0 / m);
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
    if (!(beta > 0.0)) throw ConfigError("beta must be positive");

    Json table = Json::array();
    const auto add = [&](const std::string& q, double v, const std::string& prov) {
        table.push_back(Json{{"quantity", q}, {"value", v}, {"provenance", prov}});
    };
    const BoundConstants b = bound_constants(alpha, beta);
    add("H1", b.h1, "closed-form");
    add("H2", b.h2, "closed-form");
    add("D1", d1_numeric(alpha, beta), "numerical-sup");
    add("D2", b.d2, "closed-form");
    add("E_r", b.e_r, "closed-form");
    for (double r : {0.5, 1.0, 2.0}) add("E_" + format_double(r), e_const(r), "closed-form");
    if (c.contains("eps")) {
        const SolverConstants k = local_constants(beta, c.at("eps").get<double>(), m);
        add("Z1", k.z1, "numerical-sup");
        add("Z2", k.z2, "numerical-sup");
        add("M1", k.m1, "numerical-sup");
        add("M2", k.m2, "numerical-sup");
        add("T", k.t_local, "numerical-sup");
    }
    ctx.summary["result"] = Json{{"alpha", alpha}, {"beta", beta}, {"table", table}};
    if (auto path = ctx.artifact("bounds.csv")) {
        CsvWriter csv(*path, {"quantity", "value", "provenance"});
        for (const auto& row : table)
            csv.row(std::vector<std::string>{row["quantity"], format_double(row["value"]), row["provenance"]});
    }
}

// ---------------------------------------------------------------- sigma

void cmd_sigma(Context& ctx) {
    const Json& c = ctx.cfg;
    const std::string which = c.value("which", std::string("sigma0"));
    if (which == "sigma1") {
        ctx.summary["result"] = Json{{"which", which}, {"value", sigma1_root(eval_config(c))}};
        return;
    }
    if (which != "sigma0") throw ConfigError("sigma --which must be sigma0 or sigma1");
    Sigma0Window w;
    w.sigma_lo = c.value("sigma_lo", w.sigma_lo);
    w.sigma_hi = c.value("sigma_hi", w.sigma_hi);
    w.t_max = c.value("tmax", w.t_max);
    w.sigma_step = c.value("sigma_step", w.sigma_step);
    w.t_step = c.value("tstep", w.t_step);
    w.tolerance = c.value("tol", w.tolerance);
    const Sigma0Estimate est = sigma0_estimate(make_nonlinearity(c), w);
    Json result{{"which", which},
                {"value", est.sigma},
                {"attained", est.attained},
                {"min_re_at_lo", est.min_re_at_lo},
                {"window",
                 Json{{"sigma_lo", w.sigma_lo},
                      {"sigma_hi", w.sigma_hi},
                      {"tmax", w.t_max},
                      {"sigma_step", w.sigma_step},
                      {"tstep", w.t_step},
                      {"tol", w.tolerance}}}};
    result["witness_t"] = est.witness_t ? Json(*est.witness_t) : Json(nullptr);
    if (!est.attained) {
        result["flag"] = "not attained in window";
        ctx.err << "warning: sigma0 not attained in window; reporting sigma_lo\n";
    }
    ctx.summary["result"] = result;
}

// ---------------------------------------------------------------- flow

FlowConfig flow_config(const Json& c) {
    FlowConfig f;
    f.nonlinearity = make_nonlinearity(c);
    f.lambda = c.value("lambda", f.lambda);
    f.rtol = c.value("rtol", f.rtol);
    f.atol = c.value("atol", f.atol);
    f.t_end = c.value("tend", 10.0);
    f.pole_guard_eps = c.value("pole_guard_eps", f.pole_guard_eps);
    f.validate();
    return f;
}

Json monitor_extrema(const std::vector<MonitorSample>& ms) {
    if (ms.empty()) return nullptr;
    constexpr double inf = std::numeric_limits<double>::infinity();
    double min_p = inf, u1_lo = inf, u1_hi = -inf, u2_lo = inf, u2_hi = -inf, sup = 0.0;
    for (const auto& s : ms) {
        min_p = std::min(min_p, s.min_p);
        u1_lo = std::min(u1_lo, s.u1_min);
        u1_hi = std::max(u1_hi, s.u1_max);
        u2_lo = std::min(u2_lo, s.u2_min);
        u2_hi = std::max(u2_hi, s.u2_max);
        sup = std::max(sup, s.sup_abs);
    }
    return Json{{"min_p", min_p}, {"u1_min", u1_lo}, {"u1_max", u1_hi},
                {"u2_min", u2_lo}, {"u2_max", u2_hi}, {"sup_abs_max", sup}};
}

void write_run_artifacts(Context& ctx, const RunRecord& run) {
    if (auto path = ctx.artifact("monitors.csv")) {
        CsvWriter csv(*path, {"t", "min_p", "u1_min", "u1_max", "u2_min", "u2_max", "sup_abs"});
        for (const auto& s : run.monitors) csv.row({s.t, s.min_p, s.u1_min, s.u1_max, s.u2_min, s.u2_max, s.sup_abs});
    }
    if (!ctx.cfg.value("fields", false)) return;
    if (auto path = ctx.artifact("fields.csv")) {
        CsvWriter csv(*path, {"t", "index", "re", "im"});
        for (const auto& snap : run.snapshots)
            for (std::size_t j = 0; j < snap.size(); ++j)
                csv.row({snap.time, static_cast<double>(j), snap.values[j].real(), snap.values[j].imag()});
    }
}

Json run_json(const RunRecord& run) {
    Json j{{"termination", to_string(run.termination)},
           {"final_time", run.final_field().time},
           {"final_dt", run.final_dt},
           {"halvings", run.halvings},
           {"monitors", monitor_extrema(run.monitors)}};
    if (run.termination == PdeTermination::quenched) j["quench_time"] = run.final_field().time;
    return j;
}

bool is_real_field(const GridField& g) {
    return std::all_of(g.values.begin(), g.values.end(), [](Complex v) { return v.imag() == 0.0; });
}

void flow_ode(Context& ctx, const FlowConfig& f, const Datum& datum) {
    if (datum.kind != "const") throw ConfigError("ode mode needs a const:<s0> datum");
    FlowConfig cfg = f;
    cfg.dt_max = ctx.cfg.value("dt_max", cfg.dt_max);
    FlowResult res;
    try {
        res = integrate_flow(cfg, datum.center);
    } catch (const StiffnessError& e) {
        ctx.summary["result"] = Json{{"termination", "stiffness"}, {"final_time", e.t()}, {"final_state", complex_json(e.state())}};
        throw;
    }
    if (auto path = ctx.artifact("trajectory.csv")) {
        CsvWriter csv(*path, {"t", "re", "im"});
        for (const auto& p : res.trajectory) csv.row({p.t, p.s.real(), p.s.imag()});
    }
    Json result{{"termination", to_string(res.termination)},
                {"final_time", res.final().t},
                {"final_state", complex_json(res.final().s)},
                {"accepted_steps", res.accepted_steps},
                {"rejected_steps", res.rejected_steps}};
    result["limit"] = res.limit ? zero_to_json(*res.limit) : Json(nullptr);
    ctx.summary["termination"] = result["termination"];
    ctx.summary["result"] = result;
}

void flow_stability(Context& ctx, const FlowConfig& f, const Datum& datum) {
    const Json& c = ctx.cfg;
    const ZeroRecord z0 = classify_zero(datum.center, f.nonlinearity);
    const double delta = c.value("delta", datum.radius);
    StabilityOptions opts;
    opts.dt = c.value("dt", opts.dt);
    opts.t_end = f.t_end;
    opts.tol = c.value("tol", opts.tol);
    const StabilityReport rep = stability_experiment(z0, delta, datum.field, f, opts);
    if (auto path = ctx.artifact("stability.csv")) {
        CsvWriter csv(*path, {"t", "sup_dist"});
        for (const auto& [t, d] : rep.sup_history) csv.row({t, d});
    }
    const bool pass = rep.converged && rep.disc_contained && !rep.escaped;
    ctx.summary["termination"] = rep.converged ? "converged" : (rep.escaped ? "escaped" : "completed");
    ctx.summary["check"] = Json{{"theorem", "thm1.8"},
                                {"pass", pass},
                                {"zero", zero_to_json(z0)},
                                {"delta", delta},
                                {"converged", rep.converged},
                                {"convergence_time", rep.converged ? Json(rep.convergence_time) : Json(nullptr)},
                                {"final_sup", rep.final_sup},
                                {"monotone_after_transient", rep.monotone_after_transient},
                                {"disc_contained", rep.disc_contained}};
}

void flow_pde(Context& ctx, const FlowConfig& f, const Datum& datum, const std::string& check) {
    const Json& c = ctx.cfg;
    PdeOptions opts;
    opts.dt = c.value("dt", opts.dt);
    opts.snapshot_every = c.value("snapshot_every", opts.snapshot_every);
    const GridField& g = datum.field;

    std::optional<Theorem> theorem;
    EnvelopeSpec spec;
    if (check == "thm1.9") {
        const auto s = envelope_spec_from(g);
        if (f.lambda != -1) throw ConfigError("thm1.9 needs lambda = -1");
        if (f.nonlinearity.period() != 1 || !is_real_field(g)) throw ConfigError("thm1.9 needs zeta and a real datum");
        if (!(s.i > 1.0 || (s.i > -2.0 && s.s < 1.0))) throw ConfigError("thm1.9 needs I > 1 or -2 < I <= S < 1");
    } else if (!check.empty()) {
        theorem = parse_theorem(check);
        spec = envelope_spec_from(g);
        RunRecord initial;
        initial.cfg = f;
        initial.options = opts;
        initial.snapshots = {g};
        envelope_check(initial, spec, *theorem);  // hypotheses, before any integration
    }

    RunRecord run;
    try {
        run = integrate_pde(g, f, opts);
    } catch (const FieldFailure& e) {
        ctx.summary["termination"] = "numerical_failure";
        ctx.summary["result"] = Json{{"last_valid_time", e.last_valid().time}};
        throw;
    }
    write_run_artifacts(ctx, run);
    Json result = run_json(run);
    if (datum.kind == "disc") {
        double d = 0.0;
        for (Complex v : run.final_field().values) d = std::max(d, std::abs(v - datum.center));
        result["final_sup_to_center"] = d;
    }
    ctx.summary["termination"] = result["termination"];
    ctx.summary["result"] = result;

    if (check == "thm1.9") {
        ctx.summary["check"] = Json{{"theorem", check}, {"pass", run.termination == PdeTermination::quenched}};
    } else if (theorem) {
        const double disc_err =
            run.termination == PdeTermination::completed ? self_convergence_estimate(g, f, opts.dt) : 0.0;
        const EnvelopeReport rep = envelope_check(run, spec, *theorem, disc_err);
        ctx.summary["check"] = Json{{"theorem", check},
                                    {"pass", rep.pass},
                                    {"worst_margin", rep.worst_margin},
                                    {"worst_t", rep.worst_t},
                                    {"slack", rep.slack},
                                    {"discretization_error", disc_err},
                                    {"detail", rep.detail}};
    }
}

void flow_picard(Context& ctx, const FlowConfig& f, const Datum& datum) {
    const Json& c = ctx.cfg;
    const GridField& g = datum.field;
    const double beta = c.value("beta", 2.0 * y_norm(g));
    const double min_p = min_pole_distance(g);
    const double eps = c.value("eps", f.nonlinearity.has_pole() ? min_p / 3.0 : 1.0);
    const SolverConstants k = local_constants(beta, eps, f.nonlinearity.period());
    const PicardResult res = picard_local_solve(g, k, c.value("iters", 8), f);
    if (auto path = ctx.artifact("picard.csv")) {
        CsvWriter csv(*path, {"iteration", "difference", "ratio"});
        for (std::size_t j = 0; j < res.differences.size(); ++j)
            csv.row({static_cast<double>(j + 1), res.differences[j],
                     j == 0 ? std::numeric_limits<double>::quiet_NaN() : res.ratios[j - 1]});
    }
    ctx.summary["termination"] = "completed";
    ctx.summary["result"] = Json{{"beta", beta},
                                 {"eps", eps},
                                 {"t_local", k.t_local},
                                 {"m1", k.m1},
                                 {"m2", k.m2},
                                 {"differences", res.differences},
                                 {"ratios", res.ratios},
                                 {"contracted", res.contracted},
                                 {"etd_difference", res.etd_difference}};
}

void cmd_flow(Context& ctx) {
    const Json& c = ctx.cfg;
    const std::string mode = c.value("mode", std::string("pde"));
    if (mode != "ode" && mode != "pde" && mode != "picard") throw ConfigError("--mode must be ode, pde or picard");
    if (!c.contains("datum")) throw ConfigError("flow needs a datum");
    const FlowConfig f = flow_config(c);
    const Datum datum = parse_datum(c.at("datum").get<std::string>(), c.value("n", 16), c.value("dims", 1), seed_of(c));
    const std::string check = c.value("check", std::string());

    if (mode == "ode") {
        if (!check.empty()) throw ConfigError("--check applies to pde mode");
        flow_ode(ctx, f, datum);
    } else if (mode == "picard") {
        if (!check.empty()) throw ConfigError("--check applies to pde mode");
        flow_picard(ctx, f, datum);
    } else if (check == "thm1.8") {
        flow_stability(ctx, f, datum);
    } else {
        flow_pde(ctx, f, datum, check);
    }
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const ValidationError*>(&e) ||
        dynamic_cast<const DomainError*>(&e) || dynamic_cast<const PoleError*>(&e) ||
        dynamic_cast<const Json::exception*>(&e))
        return exit_config;
    return exit_numerical;
}

}  // namespace

int execute(const Json& config, std::ostream& out, std::ostream& err) {
    Json summary{{"schema", kSchemaVersion}, {"config_hash", config_hash(config)}, {"artifacts", Json::array()}};
    std::optional<fs::path> out_dir;
    int code = exit_ok;
    const auto started = std::chrono::steady_clock::now();
    try {
        if (config.value("schema", kSchemaVersion) != kSchemaVersion) throw ConfigError("unsupported config schema");
        const std::string command = config.at("command").get<std::string>();
        summary["command"] = command;
        if (config.contains("out")) {
            out_dir = fs::path(config.at("out").get<std::string>());
            std::error_code ec;
            fs::create_directories(*out_dir, ec);
            if (ec) throw ConfigError("cannot create output directory " + out_dir->string());
        }
        Context ctx{config, summary, out_dir, out, err};
        if (command == "eval") cmd_eval(ctx);
        else if (command == "l") cmd_l(ctx);
        else if (command == "zeros") cmd_zeros(ctx);
        else if (command == "flow") cmd_flow(ctx);
        else if (command == "bounds") cmd_bounds(ctx);
        else if (command == "sigma") cmd_sigma(ctx);
        else throw ConfigError("unknown command '" + command + "'");
        summary["status"] = "ok";
    } catch (const std::exception& e) {
        code = exit_code_for(e);
        summary["status"] = "error";
        summary["error"] = e.what();
        if (!summary.contains("termination") && summary.value("command", "") == "flow") summary["termination"] = "error";
        err << "error: " << e.what() << '\n';
    }
    summary["exit_code"] = code;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    err << "wall time: " << wall << " s\n";

    if (out_dir) {
        summary["artifacts"].push_back((*out_dir / "summary.json").string());
        std::ofstream(*out_dir / "summary.json") << summary.dump(2) << '\n';
    }
    if (summary.value("command", "") == "bounds" && summary.contains("result")) {
        out << "quantity,value,provenance\n";
        for (const auto& row : summary["result"]["table"])
            out << row["quantity"].get<std::string>() << ',' << format_double(row["value"].get<double>()) << ','
                << row["provenance"].get<std::string>() << '\n';
    } else {
        out << summary.dump(2) << '\n';
    }
    return code;
}

}  // namespace zflow::harness
