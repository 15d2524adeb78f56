#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "ordstat/distributions.hpp"
#include "ordstat/error.hpp"
#include "ordstat/rng.hpp"
#include "oracles.hpp"

using namespace ordstat;

namespace {

ErrorKind kind_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected an ordstat::Error");
    return ErrorKind::Numerical;
}

constexpr double inf = std::numeric_limits<double>::infinity();

} // namespace

TEST_CASE("cdf values") {
    CHECK(cdf_eval(CdfProvider(Uniform{0, 1}), 0.25) == 0.25);
    CHECK(cdf_eval(CdfProvider(Uniform{0, 1}), -1.0) == 0.0);
    CHECK(cdf_eval(CdfProvider(Uniform{0, 1}), 2.0) == 1.0);
    CHECK(cdf_eval(CdfProvider(Gaussian{0, 1}), 0.0) == 0.5);
    CHECK(cdf_eval(CdfProvider(Gaussian{0, 1}), 1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-14));
    CHECK(cdf_eval(CdfProvider(Exponential{2.0}), 0.5) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-15));
    CHECK(cdf_eval(CdfProvider(Exponential{2.0}), -0.5) == 0.0);
    CHECK(cdf_eval(CdfProvider(Empirical{{1, 2, 3, 4}}), 2.5) == 0.5);
    CHECK(cdf_eval(CdfProvider(Empirical{{4, 3, 2, 1}}), 2.0) == 0.5);  // right-closed
    CHECK(cdf_eval(CdfProvider(Empirical{{1, 2, 3, 4}}), 0.5) == 0.0);
}

TEST_CASE("atoms") {
    const CdfProvider a(DiscreteAtoms{{2.0, 0.0, 1.0, 1.0}, {0.25, 0.25, 0.25, 0.25}});
    CHECK(a.cdf(-0.5) == 0.0);
    CHECK(a.cdf(0.0) == 0.25);
    CHECK(a.cdf(1.0) == 0.75);  // duplicate locations merged
    CHECK(a.cdf(1.5) == 0.75);
    CHECK(a.cdf(2.0) == 1.0);
    const auto& params = std::get<DiscreteAtoms>(a.params());
    CHECK(params.points == std::vector<double>{0.0, 1.0, 2.0});
}

TEST_CASE("infinite arguments and NaN") {
    for (const CdfProvider& p : {CdfProvider(Uniform{0, 1}), CdfProvider(Gaussian{1, 2}), CdfProvider(Exponential{1}),
                                 CdfProvider(DiscreteAtoms{{0.0}, {1.0}}), CdfProvider(Empirical{{1.0}})}) {
        CHECK(p.cdf(-inf) == 0.0);
        CHECK(p.cdf(inf) == 1.0);
        CHECK(kind_of([&] { p.cdf(std::nan("")); }) == ErrorKind::Input);
    }
}

TEST_CASE("invalid parameters") {
    CHECK(kind_of([] { CdfProvider(Uniform{1, 1}); }) == ErrorKind::InvalidDistribution);
    CHECK(kind_of([] { CdfProvider(Uniform{0, inf}); }) == ErrorKind::InvalidDistribution);
    CHECK(kind_of([] { CdfProvider(Gaussian{0, 0}); }) == ErrorKind::InvalidDistribution);
    CHECK(kind_of([] { CdfProvider(Exponential{-1}); }) == ErrorKind::InvalidDistribution);
    CHECK(kind_of([] { CdfProvider(DiscreteAtoms{{0.0, 1.0}, {0.5, 0.6}}); }) == ErrorKind::InvalidDistribution);
    CHECK(kind_of([] { CdfProvider(DiscreteAtoms{{0.0, 1.0}, {1.5, -0.5}}); }) == ErrorKind::InvalidDistribution);
    CHECK(kind_of([] { CdfProvider(DiscreteAtoms{{0.0}, {}}); }) == ErrorKind::InvalidDistribution);
    CHECK(kind_of([] { CdfProvider(Empirical{{}}); }) == ErrorKind::InvalidDistribution);
    CHECK(kind_of([] { CdfProvider(Empirical{{1.0, inf}}); }) == ErrorKind::InvalidDistribution);
}

TEST_CASE("cdf is non-decreasing") {
    oracle::Gen gen(5);
    std::vector<double> samples;
    for (int k = 0; k < 50; ++k) samples.push_back(gen.uniform() * 10 - 5);
    const std::vector<CdfProvider> providers{
        CdfProvider(Uniform{-1, 3}), CdfProvider(Gaussian{0.3, 1.7}), CdfProvider(Exponential{0.7}),
        CdfProvider(DiscreteAtoms{{-2, 0, 0.5, 4}, {0.1, 0.2, 0.3, 0.4}}), CdfProvider(Empirical{samples})};
    for (const auto& p : providers) {
        for (int t = 0; t < 2000; ++t) {
            double a = gen.uniform() * 12 - 6;
            double b = gen.uniform() * 12 - 6;
            if (a > b) std::swap(a, b);
            CHECK(cdf_eval(p, b) - cdf_eval(p, a) >= -1e-15);
        }
    }
}

TEST_CASE("sampling matches the cdf") {
    const std::vector<CdfProvider> providers{CdfProvider(Uniform{-1, 3}), CdfProvider(Gaussian{0.3, 1.7}),
                                             CdfProvider(Exponential{0.7}),
                                             CdfProvider(DiscreteAtoms{{-2, 0, 0.5, 4}, {0.1, 0.2, 0.3, 0.4}}),
                                             CdfProvider(Empirical{{1, 2, 2, 5}})};
    const int trials = 40000;
    for (const auto& p : providers) {
        for (double t : {-1.5, 0.0, 0.5, 1.0, 2.5}) {
            int hits = 0;
            for (int k = 0; k < trials; ++k) {
                CounterRng rng(99, static_cast<std::uint64_t>(k));
                if (p.sample(rng) <= t) ++hits;
            }
            const double f = p.cdf(t);
            const double se = std::sqrt(f * (1 - f) / trials);
            CHECK(std::abs(hits / double(trials) - f) <= 5 * se + 1e-12);
        }
    }
}

TEST_CASE("counter rng is a pure function of (seed, counter)") {
    CounterRng a(7, 3), b(7, 3), c(7, 4), e(8, 3);
    const auto va = a.next_u64();
    CHECK(va == b.next_u64());
    CHECK(va != c.next_u64());
    CHECK(va != e.next_u64());
    CounterRng u(1, 1);
    for (int k = 0; k < 1000; ++k) {
        const double x = u.next_double();
        CHECK(x >= 0.0);
        CHECK(x < 1.0);
    }
}

TEST_CASE("conditional micro-bin rows") {
    const std::size_t M = 6;
    SUBCASE("independent provider returns its fixed row") {
        const std::vector<double> row{0.1, 0.2, 0.3, 0.1, 0.2, 0.1};
        const ConditionalProvider p = [&](std::size_t, std::span<const MicroBin>) { return row; };
        CHECK(conditional_micro_probs(p, 1, {}, M) == row);
    }
    SUBCASE("copy provider puts unit mass on the neighbour's micro-bin") {
        const std::size_t H = 2;
        const ConditionalProvider copy = [&](std::size_t, std::span<const MicroBin> nbr) {
            std::vector<double> r(M, 0.0);
            r[(nbr[0].bin - 1) * H + (nbr[0].micro - 1)] = 1.0;
            return r;
        };
        const MicroBin m{2, 2};
        const auto row = conditional_micro_probs(copy, 2, std::span(&m, 1), M);
        CHECK(row[3] == 1.0);
        double s = 0.0;
        for (double v : row) s += v;
        CHECK(s == 1.0);
    }
    SUBCASE("bad rows are rejected") {
        const ConditionalProvider short_row = [](std::size_t, std::span<const MicroBin>) {
            return std::vector<double>{1.0};
        };
        const ConditionalProvider negative = [](std::size_t, std::span<const MicroBin>) {
            return std::vector<double>{1.5, -0.5, 0, 0, 0, 0};
        };
        const ConditionalProvider unnormalised = [](std::size_t, std::span<const MicroBin>) {
            return std::vector<double>{0.5, 0.4, 0, 0, 0, 0};
        };
        CHECK(kind_of([&] { conditional_micro_probs(short_row, 1, {}, M); }) == ErrorKind::InvalidConditional);
        CHECK(kind_of([&] { conditional_micro_probs(negative, 1, {}, M); }) == ErrorKind::InvalidConditional);
        CHECK(kind_of([&] { conditional_micro_probs(unnormalised, 1, {}, M); }) == ErrorKind::InvalidConditional);
    }
}
