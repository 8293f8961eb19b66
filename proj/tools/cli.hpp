#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "insider/market_model.hpp"

namespace insider::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNotConverged = 3, kInternalError = 4 };

struct McSection {
    std::string strategy = "classical";
    std::optional<std::size_t> paths;
    std::optional<std::string> grid;
    int steps = 1000;
    std::optional<std::uint64_t> seed;
    unsigned threads = 0;
    std::string path_csv;
};

struct RunConfig {
    CoefficientSet market;
    InsiderInfo info;
    double initial_price = 1.0;
    double initial_wealth = 1.0;
    double horizon = 1.0;
    double eps = 1e-3;
    std::optional<std::string> tgrid;
    std::vector<double> times;
    std::uint64_t seed = 1;
    std::optional<std::size_t> paths;
    McSection mc;
};

// Validates the whole document before anything runs; unknown keys at any
// level raise ValidationError.
RunConfig parse_run_config(const nlohmann::json& doc);

// Runs the command line (args excludes the program name). Reports go to out
// (or --out), diagnostics to err as one JSON object. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// Closed-form smoke checks; one PASS/FAIL line each. Returns the number of
// failures.
int selftest(std::ostream& out);

}  // namespace insider::cli
