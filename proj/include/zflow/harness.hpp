#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "zflow/flow_pde.hpp"

namespace zflow::harness {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_numerical = 3 };

/// Entry point shared by the zflow executable and the tests.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Runs one experiment document {"schema": 1, "command": ..., ...}; returns the exit code.
int execute(const Json& config, std::ostream& out, std::ostream& err);

/// SHA-256 of the canonical (key-sorted, compact) dump.
std::string config_hash(const Json& config);

/// 17 significant digits.
std::string format_double(double x);

/// "2", "-0.5", "0.5+14.13i", "3-2i", "2i", or "re,im".
Complex parse_complex(const std::string& text);

struct Datum {
    GridField field;
    std::string kind;  ///< const | disc | real | fourier
    Complex center;    ///< constant value, disc center or mean
    double radius = 0.0;
};

/// Initial datum from const:<c> | disc:<center>:<radius> | real:<lo>:<hi>[:<mean_lo>:<mean_hi>] |
/// fourier:<mean>[:<k>=<amp>]... ; randomized kinds need a seed.
Datum parse_datum(const std::string& spec, int n, int dims, std::optional<std::uint64_t> seed);

/// Nonlinearity from {"zeta"} | principal m | character file.
LFunction make_nonlinearity(const Json& config);

Json zero_to_json(const ZeroRecord& z);

/// CSV writer: header row, floats at 17 significant digits.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);
    void row(const std::vector<double>& values);
    void row(const std::vector<std::string>& cells);

private:
    std::filesystem::path path_;
    std::unique_ptr<std::ofstream> stream_;
};

}  // namespace zflow::harness
