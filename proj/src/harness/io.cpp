#include <openssl/evp.h>

#include <cstdio>
#include <sstream>

#include "zflow/harness.hpp"

namespace zflow::harness {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) parts.push_back(cur);
    return parts;
}

double parse_number(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("not a number: '" + text + "'");
    }
    if (used != text.size()) throw ConfigError("not a number: '" + text + "'");
    return v;
}

}  // namespace

std::string config_hash(const Json& config) {
    const std::string text = config.dump();
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(text.data(), text.size(), digest, &len, EVP_sha256(), nullptr);
    std::string hex;
    char buf[3];
    for (unsigned int i = 0; i < len; ++i) {
        std::snprintf(buf, sizeof buf, "%02x", digest[i]);
        hex += buf;
    }
    return hex;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

Complex parse_complex(const std::string& raw) {
    std::string text;
    for (char c : raw)
        if (c != ' ') text += c;
    if (text.empty()) throw ConfigError("empty complex number");
    if (const auto comma = text.find(','); comma != std::string::npos)
        return {parse_number(text.substr(0, comma)), parse_number(text.substr(comma + 1))};
    if (text.back() != 'i' && text.back() != 'j') return {parse_number(text), 0.0};
    text.pop_back();
    // split at the last sign that is not an exponent sign or the leading sign
    std::size_t split_at = std::string::npos;
    for (std::size_t i = text.size(); i-- > 1;) {
        if ((text[i] == '+' || text[i] == '-') && text[i - 1] != 'e' && text[i - 1] != 'E') {
            split_at = i;
            break;
        }
    }
    const auto imag_of = [](const std::string& t) {
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_number(t);
    };
    if (split_at == std::string::npos) return {0.0, imag_of(text)};
    return {parse_number(text.substr(0, split_at)), imag_of(text.substr(split_at))};
}

Datum parse_datum(const std::string& spec, int n, int dims, std::optional<std::uint64_t> seed) {
    const auto parts = split(spec, ':');
    if (parts.empty()) throw ConfigError("empty datum spec");
    const std::string& kind = parts[0];
    Datum d;
    d.kind = kind;
    const auto need_seed = [&] {
        if (!seed) throw ConfigError("datum '" + kind + "' is randomized and needs a seed");
        return *seed;
    };
    if (kind == "const" && parts.size() == 2) {
        d.center = parse_complex(parts[1]);
        d.field = GridField::constant(d.center, n, dims);
    } else if (kind == "disc" && parts.size() == 3) {
        d.center = parse_complex(parts[1]);
        d.radius = parse_number(parts[2]);
        d.field = make_disc_random(d.center, d.radius, need_seed(), n, dims);
    } else if (kind == "real" && (parts.size() == 3 || parts.size() == 5)) {
        const double lo = parse_number(parts[1]);
        const double hi = parse_number(parts[2]);
        const double mlo = parts.size() == 5 ? parse_number(parts[3]) : lo + 0.25 * (hi - lo);
        const double mhi = parts.size() == 5 ? parse_number(parts[4]) : hi - 0.25 * (hi - lo);
        d.field = make_real_random(lo, hi, mlo, mhi, need_seed(), n, dims);
        d.center = 0.5 * (mlo + mhi);
    } else if (kind == "fourier" && parts.size() >= 2) {
        d.center = parse_complex(parts[1]);
        std::vector<FourierMode> modes;
        for (std::size_t i = 2; i < parts.size(); ++i) {
            const auto eq = parts[i].find('=');
            if (eq == std::string::npos) throw ConfigError("fourier mode must read k=amp or kx,ky=amp");
            const auto ks = split(parts[i].substr(0, eq), ',');
            FourierMode m;
            m.k = {static_cast<int>(parse_number(ks.at(0))), ks.size() > 1 ? static_cast<int>(parse_number(ks[1])) : 0};
            m.amplitude = parse_complex(parts[i].substr(eq + 1));
            modes.push_back(m);
        }
        d.field = make_fourier_field(d.center, modes, n, dims);
    } else {
        throw ConfigError("unrecognized datum spec '" + spec + "'");
    }
    return d;
}

LFunction make_nonlinearity(const Json& config) {
    EvalConfig ec;
    if (config.contains("abs_tol")) ec.abs_tol = config.at("abs_tol").get<double>();
    ec.validate();
    const int sources = config.contains("principal") + config.contains("character") + config.contains("prime");
    if (sources > 1) throw ConfigError("choose one of principal, character, prime");
    if (config.contains("principal")) return LFunction(principal_character(config.at("principal").get<int>()), ec);
    if (config.contains("prime")) {
        const auto chars = prime_characters(config.at("prime").get<int>());
        const int index = config.value("index", 0);
        if (index < 0 || index >= static_cast<int>(chars.size())) throw ConfigError("character index out of range");
        return LFunction(chars[static_cast<std::size_t>(index)], ec);
    }
    if (config.contains("character")) {
        const std::string path = config.at("character").get<std::string>();
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open character file " + path);
        std::stringstream buf;
        buf << in.rdbuf();
        return LFunction(character_from_json(buf.str()), ec);
    }
    return LFunction::zeta(ec);
}

Json zero_to_json(const ZeroRecord& z) {
    return Json{{"re", z.location.real()},   {"im", z.location.imag()}, {"deriv_re", z.deriv_re},
                {"deriv_im", z.deriv_im},    {"kind", to_string(z.kind)}, {"residual", z.residual}};
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header)
    : path_(path), stream_(std::make_unique<std::ofstream>(path)) {
    if (!*stream_) throw ConfigError("cannot write " + path.string());
    row(header);
}

void CsvWriter::row(const std::vector<double>& values) {
    std::vector<std::string> cells;
    cells.reserve(values.size());
    for (double v : values) cells.push_back(format_double(v));
    row(cells);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) *stream_ << (i ? "," : "") << cells[i];
    *stream_ << '\n';
}

}  // namespace zflow::harness
