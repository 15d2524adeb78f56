#include "ordstat/dependent.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_map>

#include "ordstat/error.hpp"
#include "parallel.hpp"

namespace ordstat {

// ---------------------------------------------------------------------------
// micro-bins
// ---------------------------------------------------------------------------

MicroBinSpec::MicroBinSpec(std::size_t bins, std::size_t H, std::vector<double> bounds)
    : bins_(bins), H_(H), bounds_(std::move(bounds)) {
    if (bins_ < 2 || H_ < 1) fail(ErrorKind::Input, "micro-bin spec needs >= 2 bins and H >= 1");
    if (bounds_.size() != bins_ * (H_ + 1)) fail(ErrorKind::Input, "micro-bound array has wrong size");
    for (std::size_t j = 1; j <= bins_; ++j) {
        for (std::size_t h = 1; h <= H_; ++h) {
            if (!(bound(j, h - 1) <= bound(j, h))) fail(ErrorKind::Input, "micro-bounds must be non-decreasing");
        }
        if (j > 1 && bound(j, 0) != bound(j - 1, H_)) {
            fail(ErrorKind::Input, "micro-bins of adjacent bins must share their bound");
        }
    }
}

MicroBinSpec MicroBinSpec::coarse(const OrderQuery& query) {
    const BinSpec bins = make_bins(query);
    std::vector<double> bounds;
    for (std::size_t j = 1; j <= bins.bin_count(); ++j) {
        bounds.push_back(bins.bounds[j - 1]);
        bounds.push_back(bins.bounds[j]);
    }
    return MicroBinSpec(bins.bin_count(), 1, std::move(bounds));
}

MicroBinSpec MicroBinSpec::uniform(const OrderQuery& query, std::size_t H, double outer_lo,
                                   double outer_hi) {
    if (H < 1) fail(ErrorKind::Input, "H must be positive");
    const BinSpec bins = make_bins(query);
    std::vector<double> bounds;
    for (std::size_t j = 1; j <= bins.bin_count(); ++j) {
        const double lower = bins.bounds[j - 1];
        const double upper = bins.bounds[j];
        const double lo = std::isinf(lower) ? std::min(outer_lo, upper) : lower;
        const double hi = std::isinf(upper) ? std::max(outer_hi, lower) : upper;
        bounds.push_back(lower);
        for (std::size_t h = 1; h < H; ++h) {
            bounds.push_back(lo + (hi - lo) * static_cast<double>(h) / static_cast<double>(H));
        }
        bounds.push_back(upper);
    }
    return MicroBinSpec(bins.bin_count(), H, std::move(bounds));
}

MicroBinSpec MicroBinSpec::from_support(const OrderQuery& query, std::span<const double> support) {
    const BinSpec bins = make_bins(query);
    std::vector<std::vector<double>> members(bins.bin_count());
    for (std::size_t k = 0; k < support.size(); ++k) {
        if (k > 0 && !(support[k - 1] < support[k])) {
            fail(ErrorKind::Input, "support points must be strictly increasing");
        }
        members[bins.locate(support[k]) - 1].push_back(support[k]);
    }
    std::size_t H = 1;
    for (const auto& m : members) H = std::max(H, m.size());
    std::vector<double> bounds;
    for (std::size_t j = 1; j <= bins.bin_count(); ++j) {
        const auto& m = members[j - 1];
        bounds.push_back(bins.bounds[j - 1]);
        for (std::size_t h = 1; h <= H; ++h) {
            bounds.push_back(h < m.size() ? m[h - 1] : bins.bounds[j]);
        }
    }
    return MicroBinSpec(bins.bin_count(), H, std::move(bounds));
}

MicroBin MicroBinSpec::locate(double value) const {
    if (std::isnan(value)) fail(ErrorKind::Input, "cannot locate NaN");
    std::size_t j = 1;
    while (j < bins_ && value > bound(j, H_)) ++j;
    std::size_t h = 1;
    while (h < H_ && value > bound(j, h)) ++h;
    return {static_cast<std::uint32_t>(j), static_cast<std::uint32_t>(h)};
}

// ---------------------------------------------------------------------------
// schedule
// ---------------------------------------------------------------------------

DependencySchedule boundary_sets(std::size_t n,
                                 std::span<const std::pair<std::size_t, std::size_t>> edges) {
    if (n < 1) fail(ErrorKind::Input, "schedule needs at least one variable");
    std::vector<std::vector<std::size_t>> lower(n + 1);
    std::vector<std::size_t> last_neighbor(n + 1, 0);
    for (auto [u, v] : edges) {
        if (u < 1 || v < 1 || u > n || v > n) {
            fail(ErrorKind::Input, "edge (" + std::to_string(u) + ", " + std::to_string(v) +
                                       ") references a vertex outside 1.." + std::to_string(n));
        }
        if (u == v) fail(ErrorKind::Input, "self-loop on vertex " + std::to_string(u));
        const std::size_t lo = std::min(u, v);
        const std::size_t hi = std::max(u, v);
        lower[hi].push_back(lo);
        last_neighbor[lo] = std::max(last_neighbor[lo], hi);
    }

    DependencySchedule s;
    s.neighbors_.resize(n);
    s.boundary_.resize(n + 1);
    for (std::size_t i = 1; i <= n; ++i) {
        auto& nb = lower[i];
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        s.neighbors_[i - 1] = nb;
    }
    for (std::size_t i = 1; i <= n + 1; ++i) {
        auto& b = s.boundary_[i - 1];
        for (std::size_t j = 1; j < i; ++j) {
            if (last_neighbor[j] >= i) b.push_back(j);
        }
        s.max_boundary_ = std::max(s.max_boundary_, b.size());
    }
    return s;
}

DependencySchedule chain_schedule(std::size_t n) {
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (std::size_t i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
    return boundary_sets(n, edges);
}

// ---------------------------------------------------------------------------
// psi / gamma, the literal form of the recurrence's pieces
// ---------------------------------------------------------------------------

namespace {

std::size_t position_of(const std::vector<std::size_t>& members, std::size_t v) {
    const auto it = std::lower_bound(members.begin(), members.end(), v);
    if (it == members.end() || *it != v) return members.size();
    return static_cast<std::size_t>(it - members.begin());
}

void check_state(const BoundaryState& state, std::size_t expected, const MicroBinSpec& micro,
                 const char* what) {
    if (state.size() != expected) {
        fail(ErrorKind::Input, std::string(what) + " has " + std::to_string(state.size()) +
                                   " entries, expected " + std::to_string(expected));
    }
    for (const MicroBin& m : state) {
        if (m.bin < 1 || m.bin > micro.bins() || m.micro < 1 || m.micro > micro.granularity()) {
            fail(ErrorKind::Input, std::string(what) + " holds an invalid micro-bin");
        }
    }
}

} // namespace

std::vector<BoundaryState> psi(const DependencySchedule& schedule, std::size_t i,
                               const BoundaryState& target, const MicroBinSpec& micro) {
    if (i < 1 || i > schedule.n()) fail(ErrorKind::Input, "psi: step out of range");
    const auto& prior = schedule.boundary(i);
    const auto& next = schedule.boundary(i + 1);
    check_state(target, next.size(), micro, "target boundary state");

    BoundaryState base(prior.size());
    std::vector<std::size_t> retired;
    for (std::size_t k = 0; k < prior.size(); ++k) {
        const std::size_t pos = position_of(next, prior[k]);
        if (pos < next.size()) {
            base[k] = target[pos];
        } else {
            retired.push_back(k);
            base[k] = {1, 1};
        }
    }

    std::vector<BoundaryState> out;
    std::vector<std::size_t> digit(retired.size(), 0);
    const std::size_t M = micro.count();
    while (true) {
        for (std::size_t r = 0; r < retired.size(); ++r) base[retired[r]] = micro.coord(digit[r]);
        out.push_back(base);
        std::size_t r = retired.size();
        while (r > 0 && ++digit[r - 1] == M) digit[--r] = 0;
        if (r == 0) break;
    }
    return out;
}

double gamma(const DependencySchedule& schedule, std::size_t i, const BoundaryState& target,
             const BoundaryState& prior, std::span<const std::int64_t> kappa,
             std::span<const std::int64_t> deltas, std::size_t target_bin,
             const ConditionalProvider& cond, const MicroBinSpec& micro) {
    const auto& prior_members = schedule.boundary(i);
    const auto& next_members = schedule.boundary(i + 1);
    check_state(prior, prior_members.size(), micro, "prior boundary state");
    check_state(target, next_members.size(), micro, "target boundary state");

    std::vector<MicroBin> nbr;
    for (std::size_t v : schedule.neighbors(i)) nbr.push_back(prior[position_of(prior_members, v)]);
    const std::vector<double> row = conditional_micro_probs(cond, i, nbr, micro.count());
    const BinRange range = sigma(target_bin, kappa, deltas);

    if (!next_members.empty() && next_members.back() == i) {
        const MicroBin own = target.back();
        return range.contains(own.bin) ? row[micro.flat(own)] : 0.0;
    }
    const std::size_t H = micro.granularity();
    double acc = 0.0;
    for (std::size_t j = range.first; j <= range.last; ++j) {
        double bin_mass = 0.0;
        for (std::size_t h = 0; h < H; ++h) bin_mass += row[(j - 1) * H + h];
        acc += bin_mass;
    }
    return acc;
}

// ---------------------------------------------------------------------------
// joint table
// ---------------------------------------------------------------------------

JointTable::JointTable(const MixedRadix& layout, std::size_t boundary_count)
    : boundary_count_(boundary_count), block_of_(layout.size(), -1) {}

void JointTable::allocate(std::span<const std::size_t> kappa_indices) {
    values_.assign(kappa_indices.size() * boundary_count_, 0.0);
    std::ptrdiff_t b = 0;
    for (std::size_t k : kappa_indices) block_of_[k] = b++;
}

std::span<const double> JointTable::block(std::size_t kappa) const {
    const std::ptrdiff_t b = block_of_[kappa];
    if (b < 0) return {};
    return {values_.data() + static_cast<std::size_t>(b) * boundary_count_, boundary_count_};
}

std::span<double> JointTable::block(std::size_t kappa) {
    const std::ptrdiff_t b = block_of_[kappa];
    if (b < 0) return {};
    return {values_.data() + static_cast<std::size_t>(b) * boundary_count_, boundary_count_};
}

double JointTable::at(std::size_t kappa, std::size_t boundary) const {
    const auto blk = block(kappa);
    return blk.empty() ? 0.0 : blk[boundary];
}

double JointTable::total() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s;
}

// ---------------------------------------------------------------------------
// solver
// ---------------------------------------------------------------------------

namespace {

double checked_power(std::size_t base, std::size_t exp, std::size_t cap, const char* what) {
    const double v = std::pow(static_cast<double>(base), static_cast<double>(exp));
    if (v > static_cast<double>(cap)) {
        fail(ErrorKind::Resource, std::string(what) + " needs " + std::to_string(v) +
                                      " boundary states, cap is " + std::to_string(cap));
    }
    return v;
}

struct CachedRow {
    std::vector<double> probs;
    std::vector<double> bin_mass;  // sum over micro-bins, per macro bin
};

// One incoming term for a target boundary state: prior boundary index and
// either the tracked conditional weight or the row to collapse over sigma.
struct Incoming {
    std::size_t prior;
    double weight;
    const CachedRow* row;
};

} // namespace

double solve_dependent(const OrderQuery& query, const MicroBinSpec& micro,
                       const DependencySchedule& schedule, const ConditionalProvider& cond,
                       const DependentOptions& options) {
    const std::size_t d = query.d();
    const auto n = static_cast<std::size_t>(query.n);
    if (schedule.n() != n) {
        fail(ErrorKind::Input, "schedule covers " + std::to_string(schedule.n()) + " variables, query has " +
                                   std::to_string(n));
    }
    if (micro.bins() != d + 1) fail(ErrorKind::Input, "micro-bin spec does not match the query's bins");
    if (!cond) fail(ErrorKind::Input, "conditional provider is empty");

    const std::vector<std::int64_t> deltas = compute_deltas(query);
    std::int64_t capacity = 0;
    for (std::int64_t v : deltas) capacity += v;
    const MixedRadix layout(deltas, options.max_table_entries);
    const std::size_t M = micro.count();
    const std::size_t H = micro.granularity();
    const std::size_t cap = options.max_table_entries;

    std::vector<std::int64_t> filled(layout.size());
    for (std::size_t k = 0; k < layout.size(); ++k) {
        std::int64_t s = 0;
        for (std::int64_t v : layout.decode(k)) s += v;
        filled[k] = s;
    }

    JointTable prev(layout, 1);
    {
        const std::size_t origin = 0;
        prev.allocate({&origin, 1});
        prev.block(0)[0] = 1.0;
    }

    for (std::size_t i = 1; i <= n; ++i) {
        const auto& prior_members = schedule.boundary(i);
        const auto& next_members = schedule.boundary(i + 1);
        const auto& nbr = schedule.neighbors(i);
        const std::size_t prior_count =
            static_cast<std::size_t>(checked_power(M, prior_members.size(), cap, "prior step"));
        const std::size_t next_count =
            static_cast<std::size_t>(checked_power(M, next_members.size(), cap, "next step"));
        const bool tracked = !next_members.empty() && next_members.back() == i;

        // place value of each prior member's digit in the target index (0 if retired)
        std::vector<std::size_t> to_target(prior_members.size(), 0);
        {
            std::size_t place = 1;
            for (std::size_t k = next_members.size(); k-- > 0;) {
                if (next_members[k] != i) {
                    const std::size_t pos = position_of(prior_members, next_members[k]);
                    if (pos == prior_members.size()) {
                        fail(ErrorKind::Input, "schedule boundary sets are inconsistent at step " +
                                                   std::to_string(i));
                    }
                    to_target[pos] = place;
                }
                place *= M;
            }
        }
        std::vector<std::size_t> nbr_pos;
        for (std::size_t v : nbr) {
            const std::size_t pos = position_of(prior_members, v);
            if (pos == prior_members.size()) {
                fail(ErrorKind::Input, "neighbour " + std::to_string(v) + " of variable " + std::to_string(i) +
                                           " is not in its boundary set");
            }
            nbr_pos.push_back(pos);
        }

        // prior boundary states carrying any mass
        std::vector<char> live(prior_count, 0);
        for (std::size_t k = 0; k < layout.size(); ++k) {
            const auto blk = prev.block(k);
            for (std::size_t a = 0; a < blk.size(); ++a) {
                if (blk[a] != 0.0) live[a] = 1;
            }
        }

        // incoming lists per target boundary state, priors ascending
        std::unordered_map<std::size_t, CachedRow> rows;
        std::vector<std::pair<std::size_t, Incoming>> edges;
        std::vector<std::size_t> digits(prior_members.size());
        std::vector<MicroBin> nbr_loc(nbr.size());
        for (std::size_t a = 0; a < prior_count; ++a) {
            if (!live[a]) continue;
            std::size_t rest = a;
            for (std::size_t k = prior_members.size(); k-- > 0;) {
                digits[k] = rest % M;
                rest /= M;
            }
            std::size_t key = 0;
            for (std::size_t t = 0; t < nbr.size(); ++t) {
                nbr_loc[t] = micro.coord(digits[nbr_pos[t]]);
                key = key * M + digits[nbr_pos[t]];
            }
            auto [it, inserted] = rows.try_emplace(key);
            if (inserted) {
                it->second.probs = conditional_micro_probs(cond, i, nbr_loc, M);
                it->second.bin_mass.assign(d + 1, 0.0);
                for (std::size_t j = 0; j <= d; ++j) {
                    double s = 0.0;
                    for (std::size_t h = 0; h < H; ++h) s += it->second.probs[j * H + h];
                    it->second.bin_mass[j] = s;
                }
            }
            const CachedRow& row = it->second;
            std::size_t base = 0;
            for (std::size_t k = 0; k < prior_members.size(); ++k) base += digits[k] * to_target[k];
            if (tracked) {
                for (std::size_t m = 0; m < M; ++m) {
                    if (row.probs[m] != 0.0) edges.push_back({base + m, {a, row.probs[m], &row}});
                }
            } else {
                edges.push_back({base, {a, 0.0, &row}});
            }
        }
        std::stable_sort(edges.begin(), edges.end(),
                         [](const auto& l, const auto& r) { return l.first < r.first; });
        std::vector<std::size_t> targets;
        std::vector<std::size_t> target_begin;
        std::vector<Incoming> incoming;
        incoming.reserve(edges.size());
        for (const auto& [t, in] : edges) {
            if (targets.empty() || targets.back() != t) {
                targets.push_back(t);
                target_begin.push_back(incoming.size());
            }
            incoming.push_back(in);
        }
        target_begin.push_back(incoming.size());

        // spill states kept at this step: reachable with i balls and, under
        // pruning, still able to fill every bin with the n - i balls left
        std::vector<std::size_t> kept;
        const auto balls = static_cast<std::int64_t>(i);
        const auto left = static_cast<std::int64_t>(n - i);
        for (std::size_t k = 0; k < layout.size(); ++k) {
            if (filled[k] > balls) continue;
            if (options.prune && capacity - filled[k] > left) continue;
            kept.push_back(k);
        }
        if (static_cast<double>(kept.size()) * static_cast<double>(next_count) > static_cast<double>(cap)) {
            fail(ErrorKind::Resource, "joint table at step " + std::to_string(i) + " needs " +
                                          std::to_string(static_cast<double>(kept.size()) * next_count) +
                                          " entries, cap is " + std::to_string(cap));
        }
        JointTable next(layout, next_count);
        next.allocate(kept);

        detail::parallel_chunks(
            kept.size(), options.threads,
            [&](std::size_t begin, std::size_t end) {
                std::vector<std::size_t> first(d + 2, 1);
                for (std::size_t q = begin; q < end; ++q) {
                    const std::size_t k = kept[q];
                    const SpillState kappa = layout.decode(k);
                    for (std::size_t j = 2; j <= d + 1; ++j) {
                        first[j] = kappa[j - 2] == deltas[j - 2] ? first[j - 1] : j;
                    }
                    // source spill state for target bin tb: kappa itself for
                    // d+1, kappa - e_tb otherwise
                    std::vector<std::span<const double>> source(d + 2);
                    source[d + 1] = prev.block(k);
                    for (std::size_t j = 1; j <= d; ++j) {
                        if (kappa[j - 1] > 0) source[j] = prev.block(k - layout.stride(j - 1));
                    }
                    auto out = next.block(k);
                    for (std::size_t t = 0; t < targets.size(); ++t) {
                        const std::size_t lo = target_begin[t];
                        const std::size_t hi = target_begin[t + 1];
                        const std::size_t own_bin = tracked ? (targets[t] % M) / H + 1 : 0;
                        double acc = 0.0;
                        for (std::size_t step = 0; step <= d; ++step) {
                            const std::size_t tb = step == 0 ? d + 1 : step;
                            const auto src = source[tb];
                            if (src.empty()) continue;
                            if (tracked) {
                                if (own_bin < first[tb] || own_bin > tb) continue;
                                for (std::size_t e = lo; e < hi; ++e) {
                                    acc += src[incoming[e].prior] * incoming[e].weight;
                                }
                            } else {
                                for (std::size_t e = lo; e < hi; ++e) {
                                    const auto& mass = incoming[e].row->bin_mass;
                                    double g = 0.0;
                                    for (std::size_t j = first[tb]; j <= tb; ++j) g += mass[j - 1];
                                    acc += src[incoming[e].prior] * g;
                                }
                            }
                        }
                        out[targets[t]] = acc;
                    }
                }
            },
            16);

        prev = std::move(next);
        if (options.observer) options.observer(i, prev);
    }
    return prev.at(layout.size() - 1, 0);
}

} // namespace ordstat
