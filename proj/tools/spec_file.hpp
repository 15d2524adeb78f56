#pragma once

// JSON problem files for the command-line tool.
//
//   {
//     "kind": "independent",
//     "n": 3, "c": [1, 2], "x": [0.3333333333333333, 0.6666666666666666],
//     "distributions": {"name": "uniform", "params": {"a": 0, "b": 1}},
//     "algorithm": "spill",
//     "options": {"prune": true}
//   }
//
//   {
//     "kind": "chain",
//     "n": 30, "c": [27, 28, 29], "x": [3, 5, 10],
//     "kernel": [0.4, 0.3, 0.3], "initial": 0
//   }
//
// Unknown keys anywhere are errors.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ordstat_cli {

class SpecError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DistSpec {
    std::string name;  // uniform | gaussian | exponential | atoms | empirical
    double a = 0.0, b = 1.0;
    double mean = 0.0, sigma = 1.0;
    double rate = 1.0;
    std::vector<double> points, masses, samples;
};

struct ProblemSpec {
    std::string kind;  // independent | chain
    std::int64_t n = 0;
    std::vector<std::int64_t> c;
    std::vector<double> x;

    // independent: one shared entry or n entries
    std::vector<DistSpec> distributions;

    // chain, step form: X_0 = initial, X_{i+1} = X_i + offsets[k]
    bool matrix_kernel = false;
    std::vector<std::int64_t> offsets;
    std::vector<double> probs;
    std::int64_t initial = 0;
    std::optional<std::pair<std::int64_t, std::int64_t>> truncation;
    // chain, matrix form over [support_lo, support_hi]
    std::int64_t support_lo = 0, support_hi = 0;
    std::vector<double> rows;  // row-major
    std::vector<double> initial_distribution;

    std::optional<std::string> algorithm;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<bool> prune;
    std::optional<bool> precompute_sums;
    std::optional<std::int64_t> H;
};

ProblemSpec parse_problem_spec(const std::string& text);
ProblemSpec load_problem_spec(const std::string& path);

} // namespace ordstat_cli
