#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace o3cp1::cli {

using Json = nlohmann::ordered_json;

/// Bad flags or config values. The message names the offending key.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Tolerances {
    double polar_identity = 1e-10;
    double jacobian = 1e-6;
    double marginalization = 1e-8;
    double one_site = 1e-6;
    double constant = 0.01;
    double roots = 1e-10;
    double n_sigma = 3.0;

    Json to_json() const;
};

struct RunConfig {
    std::string command;
    std::vector<int> dims = {8, 8};
    double g = 1.0;
    std::string model = "o3";
    std::string regime = "pullback";
    long sweeps = 50000;
    long thermalization = -1;
    long measure_every = 5;
    std::optional<std::uint64_t> seed;
    std::vector<double> eps = {0.1, 0.05, 0.025};
    std::vector<std::string> suite = {"all"};
    int points = 10;
    int bins = 50;
    double field = 0.0;
    int threads = 1;
    std::string out;
    std::string csv;
    std::string snapshot;
    Tolerances tol;

    /// seed with the documented default for verify
    std::uint64_t seed_or_default() const { return seed.value_or(20241014); }
    Json to_json() const;
};

/// Thread count from O3CP1_THREADS when set and valid, else 1.
int default_threads();

/// argv[1] is the subcommand. Values from --config are applied first, flags override them.
RunConfig parse_config(const std::vector<std::string>& args);

/// Names accepted by --suite, in run order.
const std::vector<std::string>& verify_suite_names();

struct Outcome {
    int exit_code = 0;
    Json report;
};

Outcome run_verify(const RunConfig& config);
/// `csv_text` receives the series CSV.
Outcome run_sample(const RunConfig& config, std::string& csv_text);
Outcome run_compare(const RunConfig& config, std::string& csv_text);

/// Full CLI: parse, run, write artifacts. Returns the process exit code
/// (0 all checks passed, 1 a check failed, 2 usage error).
int run_cli(const std::vector<std::string>& args);

}  // namespace o3cp1::cli
