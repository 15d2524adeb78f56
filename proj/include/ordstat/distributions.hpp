#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "ordstat/rng.hpp"

namespace ordstat {

struct Uniform {
    double a;
    double b;
};

struct Gaussian {
    double mean;
    double sigma;
};

struct Exponential {
    double rate;
};

struct DiscreteAtoms {
    std::vector<double> points;  // sorted ascending, unique
    std::vector<double> masses;
};

struct Empirical {
    std::vector<double> samples;  // sorted ascending
};

/// Immutable univariate distribution. Construction validates parameters and
/// normalises the atom/sample representations, so evaluation never throws
/// except on NaN input.
class CdfProvider {
public:
    using Variant = std::variant<Uniform, Gaussian, Exponential, DiscreteAtoms, Empirical>;

    explicit CdfProvider(Uniform u);
    explicit CdfProvider(Gaussian g);
    explicit CdfProvider(Exponential e);
    explicit CdfProvider(DiscreteAtoms atoms);
    explicit CdfProvider(Empirical emp);

    const Variant& params() const noexcept { return params_; }

    /// F(t). Empirical uses F(t) = #{samples <= t} / N. +-inf are accepted.
    double cdf(double t) const;

    /// Draws one value by inversion (Box-Muller for the Gaussian).
    double sample(CounterRng& rng) const;

private:
    Variant params_;
};

inline double cdf_eval(const CdfProvider& provider, double t) { return provider.cdf(t); }

/// Coordinate of a micro-bin: macro bin in [1, d+1] and micro index in [1, H].
struct MicroBin {
    std::uint32_t bin = 1;
    std::uint32_t micro = 1;

    friend bool operator==(const MicroBin&, const MicroBin&) = default;
};

/// Conditional distribution of variable i (1-based) over the (d+1)*H
/// micro-bins, given the micro-bin locations of its lower-indexed graph
/// neighbours (in increasing variable order). Entry (j, h) is stored at
/// (j-1)*H + (h-1).
using ConditionalProvider =
    std::function<std::vector<double>(std::size_t i, std::span<const MicroBin> neighbors)>;

/// Calls the provider and checks the result: correct length, entries >= 0,
/// sum within 1e-12 of 1.
std::vector<double> conditional_micro_probs(const ConditionalProvider& provider,
                                            std::size_t i,
                                            std::span<const MicroBin> neighbor_locations,
                                            std::size_t micro_bin_count);

} // namespace ordstat
