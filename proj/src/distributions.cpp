#include "ordstat/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "ordstat/error.hpp"

namespace ordstat {

namespace {

struct CdfVisitor {
    double t;

    double operator()(const Uniform& u) const {
        if (t <= u.a) return 0.0;
        if (t >= u.b) return 1.0;
        return (t - u.a) / (u.b - u.a);
    }
    double operator()(const Gaussian& g) const {
        return 0.5 * std::erfc(-(t - g.mean) / (g.sigma * std::numbers::sqrt2));
    }
    double operator()(const Exponential& e) const {
        return t <= 0.0 ? 0.0 : -std::expm1(-e.rate * t);
    }
    double operator()(const DiscreteAtoms& a) const {
        const auto end = std::upper_bound(a.points.begin(), a.points.end(), t);
        const auto k = static_cast<std::size_t>(end - a.points.begin());
        if (k == a.points.size()) return 1.0;
        double acc = 0.0;
        for (std::size_t i = 0; i < k; ++i) acc += a.masses[i];
        return std::min(acc, 1.0);
    }
    double operator()(const Empirical& e) const {
        const auto k = std::upper_bound(e.samples.begin(), e.samples.end(), t) - e.samples.begin();
        return static_cast<double>(k) / static_cast<double>(e.samples.size());
    }
};

struct SampleVisitor {
    CounterRng& rng;

    double operator()(const Uniform& u) const { return u.a + (u.b - u.a) * rng.next_double(); }
    double operator()(const Gaussian& g) const {
        // Box-Muller; 1 - u keeps the log argument in (0, 1]
        const double u1 = 1.0 - rng.next_double();
        const double u2 = rng.next_double();
        return g.mean + g.sigma * std::sqrt(-2.0 * std::log(u1)) *
                            std::cos(2.0 * std::numbers::pi * u2);
    }
    double operator()(const Exponential& e) const {
        return -std::log1p(-rng.next_double()) / e.rate;
    }
    double operator()(const DiscreteAtoms& a) const {
        const double u = rng.next_double();
        double acc = 0.0;
        for (std::size_t i = 0; i < a.points.size(); ++i) {
            acc += a.masses[i];
            if (u < acc) return a.points[i];
        }
        return a.points.back();
    }
    double operator()(const Empirical& e) const {
        const auto k = static_cast<std::size_t>(rng.next_double() * static_cast<double>(e.samples.size()));
        return e.samples[std::min(k, e.samples.size() - 1)];
    }
};

} // namespace

CdfProvider::CdfProvider(Uniform u) : params_(u) {
    if (!(std::isfinite(u.a) && std::isfinite(u.b) && u.a < u.b)) {
        fail(ErrorKind::InvalidDistribution, "uniform requires finite a < b");
    }
}

CdfProvider::CdfProvider(Gaussian g) : params_(g) {
    if (!(std::isfinite(g.mean) && std::isfinite(g.sigma) && g.sigma > 0.0)) {
        fail(ErrorKind::InvalidDistribution, "gaussian requires finite mean and sigma > 0");
    }
}

CdfProvider::CdfProvider(Exponential e) : params_(e) {
    if (!(std::isfinite(e.rate) && e.rate > 0.0)) {
        fail(ErrorKind::InvalidDistribution, "exponential requires rate > 0");
    }
}

CdfProvider::CdfProvider(DiscreteAtoms atoms) {
    if (atoms.points.empty() || atoms.points.size() != atoms.masses.size()) {
        fail(ErrorKind::InvalidDistribution, "atoms need matching, non-empty point and mass lists");
    }
    std::vector<std::size_t> order(atoms.points.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return atoms.points[a] < atoms.points[b]; });
    DiscreteAtoms sorted;
    double total = 0.0;
    for (std::size_t k : order) {
        const double p = atoms.points[k];
        const double m = atoms.masses[k];
        if (!std::isfinite(p)) fail(ErrorKind::InvalidDistribution, "atom location must be finite");
        if (!(m >= 0.0)) fail(ErrorKind::InvalidDistribution, "atom mass must be non-negative");
        total += m;
        if (!sorted.points.empty() && sorted.points.back() == p) {
            sorted.masses.back() += m;
        } else {
            sorted.points.push_back(p);
            sorted.masses.push_back(m);
        }
    }
    if (std::abs(total - 1.0) > 1e-12) {
        fail(ErrorKind::InvalidDistribution, "atom masses sum to " + std::to_string(total));
    }
    params_ = std::move(sorted);
}

CdfProvider::CdfProvider(Empirical emp) {
    if (emp.samples.empty()) fail(ErrorKind::InvalidDistribution, "empirical sample is empty");
    for (double s : emp.samples) {
        if (!std::isfinite(s)) fail(ErrorKind::InvalidDistribution, "empirical sample is not finite");
    }
    std::sort(emp.samples.begin(), emp.samples.end());
    params_ = std::move(emp);
}

double CdfProvider::cdf(double t) const {
    if (std::isnan(t)) fail(ErrorKind::Input, "CDF evaluated at NaN");
    if (t == -INFINITY) return 0.0;
    if (t == INFINITY) return 1.0;
    return std::visit(CdfVisitor{t}, params_);
}

double CdfProvider::sample(CounterRng& rng) const {
    return std::visit(SampleVisitor{rng}, params_);
}

std::vector<double> conditional_micro_probs(const ConditionalProvider& provider,
                                            std::size_t i,
                                            std::span<const MicroBin> neighbor_locations,
                                            std::size_t micro_bin_count) {
    std::vector<double> row = provider(i, neighbor_locations);
    if (row.size() != micro_bin_count) {
        fail(ErrorKind::InvalidConditional, "conditional for variable " + std::to_string(i) + " has " +
                                                std::to_string(row.size()) + " entries, expected " +
                                                std::to_string(micro_bin_count));
    }
    double sum = 0.0;
    for (double v : row) {
        if (!(v >= 0.0)) {
            fail(ErrorKind::InvalidConditional,
                 "conditional for variable " + std::to_string(i) + " has a negative or NaN entry");
        }
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        fail(ErrorKind::InvalidConditional,
             "conditional for variable " + std::to_string(i) + " sums to " + std::to_string(sum));
    }
    return row;
}

} // namespace ordstat
