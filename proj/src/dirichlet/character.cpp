#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "json.hpp"
#include "zflow/dirichlet.hpp"

namespace zflow {

namespace {

constexpr double kValueTol = 1e-12;

std::string residue_message(const std::string& what, long long r) {
    std::ostringstream os;
    os << what << " at residue " << r;
    return os.str();
}

int euler_phi(int m) {
    int count = 0;
    for (int r = 1; r <= m; ++r)
        if (std::gcd(r, m) == 1) ++count;
    return count;
}

bool is_prime(int p) {
    if (p < 2) return false;
    for (int d = 2; d * d <= p; ++d)
        if (p % d == 0) return false;
    return true;
}

int least_primitive_root(int p) {
    for (int g = 2; g < p; ++g) {
        long long x = 1;
        int order = 0;
        do {
            x = x * g % p;
            ++order;
        } while (x != 1);
        if (order == p - 1) return g;
    }
    return 1;  // p = 2
}

Complex snap(Complex z) {
    const auto clean = [](double v) { return std::abs(v) < 1e-15 ? 0.0 : v; };
    return {clean(z.real()), clean(z.imag())};
}

}  // namespace

CharacterTable::CharacterTable(std::vector<Complex> values) : values_(std::move(values)) {
    const int m = period();
    principal_ = true;
    real_ = true;
    for (int r = 1; r <= m; ++r) {
        const Complex v = values_[r - 1];
        if (std::abs(v.imag()) >= kValueTol) real_ = false;
        if (std::gcd(r, m) == 1 && std::abs(v - 1.0) >= kValueTol) principal_ = false;
    }
}

CharacterTable CharacterTable::validate(std::vector<Complex> values) {
    const long long m = static_cast<long long>(values.size());
    if (m < 1) throw ValidationError("character table must have period m >= 1");
    for (long long r = 1; r <= m; ++r)
        if (!is_finite(values[r - 1])) throw ValidationError(residue_message("non-finite value", r));

    const auto at = [&](long long n) { return values[((n % m) + m - 1) % m]; };
    if (std::abs(at(1) - 1.0) >= kValueTol) throw ValidationError("chi(1) must equal 1");

    const int phi = euler_phi(static_cast<int>(m));
    for (long long r = 1; r <= m; ++r) {
        const Complex v = at(r);
        if (std::gcd(r, m) > 1) {
            if (std::abs(v) >= kValueTol)
                throw ValidationError(residue_message("chi must vanish where gcd(n, m) > 1", r));
        } else {
            if (std::abs(std::abs(v) - 1.0) >= kValueTol)
                throw ValidationError(residue_message("chi must be a root of unity", r));
            if (std::abs(std::pow(v, phi) - 1.0) >= 1e-10)
                throw ValidationError(residue_message("chi^phi(m) must equal 1", r));
        }
    }
    for (long long a = 1; a <= m; ++a) {
        for (long long b = a; b <= m; ++b) {
            if (std::abs(at(a * b) - at(a) * at(b)) >= kValueTol) {
                std::ostringstream os;
                os << "multiplicativity fails for pair (" << a << ", " << b << ")";
                throw ValidationError(os.str());
            }
        }
    }
    return CharacterTable(std::move(values));
}

Complex CharacterTable::operator()(long long n) const {
    const long long m = period();
    return values_[((n % m) + m - 1) % m];
}

CharacterTable principal_character(int m) {
    if (m < 1) throw DomainError("character period must be >= 1");
    std::vector<Complex> values(static_cast<std::size_t>(m));
    for (int r = 1; r <= m; ++r) values[r - 1] = std::gcd(r, m) == 1 ? 1.0 : 0.0;
    return CharacterTable::validate(std::move(values));
}

std::vector<CharacterTable> prime_characters(int p) {
    if (!is_prime(p)) throw DomainError("prime_characters needs a prime modulus");
    const int g = least_primitive_root(p);
    std::vector<int> dlog(static_cast<std::size_t>(p), 0);
    long long x = 1;
    for (int k = 0; k < p - 1; ++k) {
        dlog[static_cast<std::size_t>(x)] = k;
        x = x * g % p;
    }
    std::vector<CharacterTable> out;
    for (int j = 0; j < p - 1; ++j) {
        std::vector<Complex> values(static_cast<std::size_t>(p), 0.0);
        for (int r = 1; r < p; ++r) {
            const long long num = static_cast<long long>(j) * dlog[static_cast<std::size_t>(r)] % (p - 1);
            if (num == 0) {
                values[r - 1] = 1.0;
            } else if (2 * num == p - 1) {
                values[r - 1] = -1.0;
            } else {
                values[r - 1] = snap(std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(num) / (p - 1)));
            }
        }
        out.push_back(CharacterTable::validate(std::move(values)));
    }
    return out;
}

CharacterTable character_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("character JSON: ") + e.what());
    }
    if (!doc.contains("period") || !doc.contains("values"))
        throw ConfigError("character JSON needs \"period\" and \"values\"");
    const int m = doc.at("period").get<int>();
    const auto& raw = doc.at("values");
    if (!raw.is_array() || static_cast<int>(raw.size()) != m)
        throw ValidationError("character JSON: values length must equal period");
    std::vector<Complex> values;
    for (const auto& v : raw) {
        if (v.is_number()) {
            values.emplace_back(v.get<double>(), 0.0);
        } else if (v.is_array() && v.size() == 2) {
            values.emplace_back(v[0].get<double>(), v[1].get<double>());
        } else {
            throw ConfigError("character JSON: each value must be a number or [re, im]");
        }
    }
    return CharacterTable::validate(std::move(values));
}

std::string character_to_json(const CharacterTable& table) {
    nlohmann::json doc;
    doc["period"] = table.period();
    doc["values"] = nlohmann::json::array();
    for (const auto& v : table.values()) doc["values"].push_back({v.real(), v.imag()});
    return doc.dump();
}

}  // namespace zflow
