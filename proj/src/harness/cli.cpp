#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "zflow/harness.hpp"

namespace zflow::harness {

namespace {

enum class Kind { number, integer, unsigned_integer, text, flag };

struct OptionSpec {
    std::string flag;
    std::string key;
    Kind kind;
    std::string help;
};

const std::vector<OptionSpec> kNonlinearity{
    {"--principal", "principal", Kind::integer, "principal character modulo m"},
    {"--prime", "prime", Kind::integer, "characters modulo a prime p"},
    {"--index", "index", Kind::integer, "character index j for --prime"},
    {"--character", "character", Kind::text, "character table JSON file"},
    {"--abs-tol", "abs_tol", Kind::number, "evaluation tolerance"},
};

std::map<std::string, std::vector<OptionSpec>> command_options() {
    std::map<std::string, std::vector<OptionSpec>> m;
    m["eval"] = {{"--s", "s", Kind::text, "evaluation point: 2, 0.5+14.1i or re,im"},
                 {"--alpha", "alpha", Kind::number, "Hurwitz shift in (0, 1]"},
                 {"--deriv", "deriv", Kind::flag, "also evaluate the derivative"}};
    m["l"] = {{"--s", "s", Kind::text, "evaluation point"},
              {"--sigma", "sigma", Kind::number, "scan the line sigma + it"},
              {"--tmax", "tmax", Kind::number, "scan height"},
              {"--tstep", "tstep", Kind::number, "scan spacing"}};
    m["zeros"] = {{"--tmax", "tmax", Kind::number, "height cap, at most 200"},
                  {"--verify", "verify", Kind::flag, "cross-check the count with the argument principle"}};
    m["flow"] = {{"--mode", "mode", Kind::text, "ode | pde | picard"},
                 {"--datum", "datum", Kind::text, "const:c | disc:z:r | real:lo:hi[:mlo:mhi] | fourier:mean[:k=a]..."},
                 {"--lambda", "lambda", Kind::integer, "+1 or -1"},
                 {"--tend", "tend", Kind::number, "final time"},
                 {"--dt", "dt", Kind::number, "time step (pde)"},
                 {"--dt-max", "dt_max", Kind::number, "largest step (ode)"},
                 {"--rtol", "rtol", Kind::number, "relative tolerance (ode)"},
                 {"--atol", "atol", Kind::number, "absolute tolerance (ode)"},
                 {"--pole-guard", "pole_guard_eps", Kind::number, "pole guard radius"},
                 {"--n", "n", Kind::integer, "grid points per axis"},
                 {"--dims", "dims", Kind::integer, "1 or 2"},
                 {"--seed", "seed", Kind::unsigned_integer, "seed for randomized data"},
                 {"--check", "check", Kind::text, "thm1.5 | cor1.6 | thm1.7i | thm1.7ii | thm1.7iii | thm1.8 | thm1.9"},
                 {"--delta", "delta", Kind::number, "disc radius for thm1.8"},
                 {"--tol", "tol", Kind::number, "convergence tolerance for thm1.8"},
                 {"--snapshot-every", "snapshot_every", Kind::integer, "steps between snapshots"},
                 {"--fields", "fields", Kind::flag, "write every snapshot to fields.csv"},
                 {"--beta", "beta", Kind::number, "box half-width (picard)"},
                 {"--eps", "eps", Kind::number, "pole clearance (picard)"},
                 {"--iters", "iters", Kind::integer, "Picard iterations"}};
    m["bounds"] = {{"--alpha", "alpha", Kind::number, "Hurwitz shift in (0, 1]"},
                   {"--beta", "beta", Kind::number, "box half-width"},
                   {"--eps", "eps", Kind::number, "pole clearance; adds Z, M, T"},
                   {"--m", "m", Kind::integer, "character period"}};
    m["sigma"] = {{"--which", "which", Kind::text, "sigma0 | sigma1"},
                  {"--tmax", "tmax", Kind::number, "window height"},
                  {"--sigma-lo", "sigma_lo", Kind::number, "window left edge"},
                  {"--sigma-hi", "sigma_hi", Kind::number, "window right edge"},
                  {"--sigma-step", "sigma_step", Kind::number, "coarse sigma spacing"},
                  {"--tstep", "tstep", Kind::number, "t spacing"},
                  {"--tol", "tol", Kind::number, "bisection tolerance"}};
    for (const auto& name : {"eval", "l", "flow", "sigma"})
        m[name].insert(m[name].end(), kNonlinearity.begin(), kNonlinearity.end());
    return m;
}

Json convert(const OptionSpec& spec, const std::string& raw) {
    try {
        std::size_t used = 0;
        switch (spec.kind) {
            case Kind::number: {
                const double v = std::stod(raw, &used);
                if (used == raw.size()) return v;
                break;
            }
            case Kind::integer: {
                const long long v = std::stoll(raw, &used);
                if (used == raw.size()) return v;
                break;
            }
            case Kind::unsigned_integer: {
                if (!raw.empty() && raw[0] == '-') break;
                const unsigned long long v = std::stoull(raw, &used);
                if (used == raw.size()) return v;
                break;
            }
            case Kind::text: return raw;
            case Kind::flag: return true;
        }
    } catch (const std::exception&) {
    }
    throw ConfigError("invalid value '" + raw + "' for " + spec.flag);
}

Json load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError("config " + path + " is not valid JSON: " + e.what());
    }
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"zflow: zeta-driven flows and their numerical checks"};
    app.require_subcommand(1);
    const auto specs = command_options();

    std::map<std::string, std::map<std::string, std::string>> values;
    std::map<std::string, bool> flags;
    std::string config_path, out_dir, subject = "zeta";

    for (const auto& [name, options] : specs) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON experiment document (flags override it)");
        sub->add_option("--out", out_dir, "output directory for CSV and summary.json");
        if (name == "eval") sub->add_option("subject", subject, "zeta | hurwitz | l");
        for (const auto& o : options) {
            if (o.kind == Kind::flag)
                sub->add_flag(o.flag, flags[name + o.key], o.help);
            else
                sub->add_option(o.flag, values[name][o.key], o.help);
        }
    }

    std::vector<std::string> args;
    for (int i = argc - 1; i > 0; --i) args.emplace_back(argv[i]);
    try {
        app.parse(args);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        std::ostringstream os;
        os << (e.get_exit_code() == 0 ? app.help() : std::string(e.what()));
        (e.get_exit_code() == 0 ? out : err) << os.str() << '\n';
        return e.get_exit_code() == 0 ? exit_ok : exit_config;
    }

    const CLI::App* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    Json doc;
    try {
        doc = config_path.empty() ? Json::object() : load_document(config_path);
        if (!doc.is_object()) throw ConfigError("config must be a JSON object");
        if (doc.contains("command") && doc["command"] != name)
            throw ConfigError("config is for '" + doc["command"].get<std::string>() + "', not '" + name + "'");
        doc["schema"] = doc.value("schema", kSchemaVersion);
        doc["command"] = name;
        if (!out_dir.empty()) doc["out"] = out_dir;
        if (name == "eval" && (sub->count("subject") > 0 || !doc.contains("subject"))) doc["subject"] = subject;
        for (const auto& o : specs.at(name)) {
            if (sub->count(o.flag) == 0) continue;
            doc[o.key] = o.kind == Kind::flag ? Json(true) : convert(o, values[name][o.key]);
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_config;
    }
    return execute(doc, out, err);
}

}  // namespace zflow::harness
