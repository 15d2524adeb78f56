#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <string>

#include "spec_file.hpp"

using ordstat_cli::parse_problem_spec;
using ordstat_cli::SpecError;

TEST_CASE("independent problem with a shared distribution") {
    const auto s = parse_problem_spec(R"({
        "kind": "independent", "n": 3, "c": [1, 2], "x": [0.25, "inf"],
        "distributions": {"name": "uniform", "params": {"a": 0, "b": 1}},
        "algorithm": "boncelet", "options": {"prune": false, "precompute_sums": true}
    })");
    CHECK(s.kind == "independent");
    CHECK(s.n == 3);
    CHECK(s.c == std::vector<std::int64_t>{1, 2});
    CHECK(std::isinf(s.x[1]));
    REQUIRE(s.distributions.size() == 1);
    CHECK(s.distributions[0].name == "uniform");
    CHECK(s.distributions[0].b == 1.0);
    CHECK(*s.algorithm == "boncelet");
    CHECK(*s.prune == false);
    CHECK(*s.precompute_sums == true);
    CHECK_FALSE(s.trials.has_value());
}

TEST_CASE("per-variable distributions") {
    const auto s = parse_problem_spec(R"({
        "kind": "independent", "n": 2, "c": [1], "x": [0],
        "distributions": [{"name": "gaussian", "params": {"mean": 1, "sigma": 2}},
                          {"name": "atoms", "params": {"points": [0, 1], "masses": [0.5, 0.5]}}]
    })");
    REQUIRE(s.distributions.size() == 2);
    CHECK(s.distributions[0].sigma == 2.0);
    CHECK(s.distributions[1].points.size() == 2);
}

TEST_CASE("chain kernels") {
    SUBCASE("three-entry shorthand") {
        const auto s = parse_problem_spec(
            R"({"kind": "chain", "n": 3, "c": [3], "x": [0], "kernel": [0.4, 0.3, 0.3], "initial": 2})");
        CHECK(s.offsets == std::vector<std::int64_t>{-1, 0, 1});
        CHECK(s.probs[0] == 0.4);
        CHECK(s.initial == 2);
        CHECK_FALSE(s.matrix_kernel);
    }
    SUBCASE("offsets and probabilities") {
        const auto s = parse_problem_spec(R"({"kind": "chain", "n": 3, "c": [3], "x": [0],
            "kernel": {"offsets": [-2, 1], "probs": [0.5, 0.5]}, "truncation": [-4, 4]})");
        CHECK(s.offsets == std::vector<std::int64_t>{-2, 1});
        REQUIRE(s.truncation.has_value());
        CHECK(s.truncation->second == 4);
    }
    SUBCASE("explicit matrix") {
        const auto s = parse_problem_spec(R"({"kind": "chain", "n": 3, "c": [3], "x": [0],
            "kernel": {"support": [0, 1], "rows": [[0.5, 0.5], [0, 1]]}, "initial_distribution": [1, 0]})");
        CHECK(s.matrix_kernel);
        CHECK(s.rows.size() == 4);
        CHECK(s.initial_distribution.size() == 2);
    }
}

TEST_CASE("rejected documents") {
    const char* bad[] = {
        R"({"kind": "independent", "n": 3, "c": [1], "x": [0], "distributions": {"name": "uniform", "params": {"a": 0, "b": 1}}, "extra": 1})",
        R"({"kind": "independent", "n": 3, "c": [1], "x": [0], "distributions": {"name": "uniform", "params": {"a": 0, "b": 1, "c": 2}}})",
        R"({"kind": "independent", "n": 3, "c": [1], "x": [0], "distributions": {"name": "cauchy"}})",
        R"({"kind": "independent", "n": 3, "c": [1], "x": [0]})",
        R"({"kind": "independent", "n": 3, "c": [1], "x": [0], "distributions": {"name": "exponential", "params": {"rate": 1}}, "kernel": [0.3, 0.4, 0.3]})",
        R"({"kind": "chain", "n": 3, "c": [1], "x": [0], "kernel": [0.5, 0.5]})",
        R"({"kind": "chain", "n": 3, "c": [1], "x": [0], "kernel": {"offsets": [1], "probs": [1], "bias": 0}})",
        R"({"kind": "chain", "n": 3, "c": [1], "x": [0], "kernel": {"support": [0, 1], "rows": [[1, 0], [0, 1]]}})",
        R"({"kind": "chain", "n": 3, "c": [1], "x": [0], "kernel": [0.3, 0.4, 0.3], "distributions": []})",
        R"({"kind": "tree", "n": 3, "c": [1], "x": [0]})",
        R"({"kind": "chain", "n": 3.5, "c": [1], "x": [0], "kernel": [0.3, 0.4, 0.3]})",
        R"({"kind": "chain", "n": 3, "c": [1], "x": ["zero"], "kernel": [0.3, 0.4, 0.3]})",
        R"({"kind": "chain", "n": 3, "c": [1], "x": [0], "kernel": [0.3, 0.4, 0.3], "options": {"H": 0}})",
        R"({"kind": "chain", "n": 3, "c": [1], "x": [0], "kernel": [0.3, 0.4, 0.3], "options": {"fast": true}})",
        R"({"kind": "chain", "n": 3, "c": [1], "x": [0], "kernel": [0.3, 0.4, 0.3], "trials": -5})",
        R"({"kind": "chain", "n": 3,)",
        R"([1, 2, 3])",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(parse_problem_spec(text), SpecError);
    }
}

TEST_CASE("missing files") {
    CHECK_THROWS_AS(ordstat_cli::load_problem_spec("/nonexistent/problem.json"), SpecError);
}
