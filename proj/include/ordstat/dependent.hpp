#pragma once

// Spill dynamic program for dependent variables on a Markov random field.
//
// Variables are thrown in index order 1..n. Besides the spill state, step i
// remembers the micro-bin location of every earlier variable that is still
// adjacent to a variable yet to come (the boundary set). By the local Markov
// property that is all the history needed to draw the remaining variables.
// The joint table after step i is indexed by (kappa, locations of Bnd(i+1)).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "ordstat/distributions.hpp"
#include "ordstat/query.hpp"
#include "ordstat/spill.hpp"

namespace ordstat {

/// Each macro bin (x_{j-1}, x_j] is split into H micro-bins with bounds
/// x_{j-1} = m_{j,0} <= ... <= m_{j,H} = x_j; micro-bin h is (m_{j,h-1}, m_{j,h}].
class MicroBinSpec {
public:
    MicroBinSpec(std::size_t bins, std::size_t H, std::vector<double> bounds);

    /// H = 1: micro-bins coincide with the macro bins.
    static MicroBinSpec coarse(const OrderQuery& query);

    /// Splits every bin into H equal-width pieces. The two unbounded end bins
    /// are split over [outer_lo, x_1] and [x_d, outer_hi]; their first/last
    /// micro-bin still extends to infinity.
    static MicroBinSpec uniform(const OrderQuery& query, std::size_t H,
                                double outer_lo, double outer_hi);

    /// One micro-bin per support point (H = largest number of points in any
    /// bin, unused micro-bins are empty). Exact for discrete variables.
    static MicroBinSpec from_support(const OrderQuery& query, std::span<const double> support);

    std::size_t bins() const noexcept { return bins_; }
    std::size_t granularity() const noexcept { return H_; }
    std::size_t count() const noexcept { return bins_ * H_; }

    double bound(std::size_t j, std::size_t h) const { return bounds_[(j - 1) * (H_ + 1) + h]; }
    MicroBin locate(double value) const;

    std::size_t flat(MicroBin m) const noexcept { return (m.bin - 1) * H_ + (m.micro - 1); }
    MicroBin coord(std::size_t flat) const noexcept {
        return {static_cast<std::uint32_t>(flat / H_ + 1), static_cast<std::uint32_t>(flat % H_ + 1)};
    }

private:
    std::size_t bins_;
    std::size_t H_;
    std::vector<double> bounds_;
};

/// Processing schedule for variables 1..n in their given order.
class DependencySchedule {
public:
    std::size_t n() const noexcept { return neighbors_.size(); }

    /// Nbr(i): graph neighbours j < i, ascending. i in [1, n].
    const std::vector<std::size_t>& neighbors(std::size_t i) const { return neighbors_[i - 1]; }
    /// Bnd(i): variables j < i adjacent to some k >= i, ascending. i in [1, n+1].
    const std::vector<std::size_t>& boundary(std::size_t i) const { return boundary_[i - 1]; }
    /// b(*) = max_i |Bnd(i)|.
    std::size_t max_boundary() const noexcept { return max_boundary_; }

private:
    friend DependencySchedule boundary_sets(std::size_t n,
                                            std::span<const std::pair<std::size_t, std::size_t>> edges);
    std::vector<std::vector<std::size_t>> neighbors_;
    std::vector<std::vector<std::size_t>> boundary_;
    std::size_t max_boundary_ = 0;
};

/// Builds Nbr and Bnd for an undirected graph on vertices 1..n.
DependencySchedule boundary_sets(std::size_t n,
                                 std::span<const std::pair<std::size_t, std::size_t>> edges);

DependencySchedule chain_schedule(std::size_t n);

/// Micro-bin locations of the members of a boundary set, in increasing
/// variable order.
using BoundaryState = std::vector<MicroBin>;

/// Step-i boundary states consistent with a step-(i+1) boundary state: shared
/// variables are pinned to their target locations, retired variables range
/// over all micro-bins. Returned in lexicographic order. No filtering by the
/// spill state is done; inconsistent states carry zero mass.
std::vector<BoundaryState> psi(const DependencySchedule& schedule, std::size_t i,
                               const BoundaryState& target, const MicroBinSpec& micro);

/// Weight with which prior boundary state `prior` feeds target (kappa,
/// target) through a ball that ends up in `target_bin` (d+1 for the branch
/// where kappa is unchanged). If i is tracked in Bnd(i+1), its recorded
/// micro-bin must lie in sigma(target_bin, kappa); otherwise the conditional
/// mass of sigma(target_bin, kappa) is summed over all micro-bins.
double gamma(const DependencySchedule& schedule, std::size_t i, const BoundaryState& target,
             const BoundaryState& prior, std::span<const std::int64_t> kappa,
             std::span<const std::int64_t> deltas, std::size_t target_bin,
             const ConditionalProvider& cond, const MicroBinSpec& micro);

/// Joint table over (spill state, boundary state). Only spill states that
/// are still reachable and, under pruning, still able to reach the
/// accepting state have storage; everything else reads as zero.
class JointTable {
public:
    JointTable(const MixedRadix& layout, std::size_t boundary_count);

    std::size_t boundary_count() const noexcept { return boundary_count_; }
    std::size_t spill_count() const noexcept { return block_of_.size(); }
    std::size_t stored_entries() const noexcept { return values_.size(); }

    void allocate(std::span<const std::size_t> kappa_indices);

    bool has_block(std::size_t kappa) const { return block_of_[kappa] >= 0; }
    std::span<const double> block(std::size_t kappa) const;
    std::span<double> block(std::size_t kappa);
    double at(std::size_t kappa, std::size_t boundary) const;
    double total() const;

private:
    std::size_t boundary_count_;
    std::vector<std::ptrdiff_t> block_of_;
    std::vector<double> values_;
};

struct DependentOptions {
    bool prune = true;
    unsigned threads = 1;
    /// Cap on the entries stored in one joint table and on the boundary
    /// state space of a single step.
    std::size_t max_table_entries = kDefaultMaxTableEntries;
    std::function<void(std::size_t, const JointTable&)> observer;
};

/// Exact P(X_(c_1) <= x_1, ..., X_(c_d) <= x_d) for variables whose
/// conditionals given their lower neighbours are measurable on the micro-bin
/// partition; otherwise an approximation that improves with H.
double solve_dependent(const OrderQuery& query, const MicroBinSpec& micro,
                       const DependencySchedule& schedule, const ConditionalProvider& cond,
                       const DependentOptions& options = {});

} // namespace ordstat
