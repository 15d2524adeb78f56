// ordstat: command-line front end over the C interface.
//
//   ordstat compute SPEC.json [--algorithm spill|boncelet|brute|mc] [--cross-check]
//   ordstat bench --out results.csv [--n-list ...] [--d-list ...] [--algorithms ...]
//   ordstat randomwalk [--kernel q_dn,q_0,q_up] [--horizons ...] [--out walk.csv]
//
// Exit codes: 0 ok, 2 parse or validation error, 3 resource limit or
// unwritable output, 4 numerical check failure.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "ordstat/ordstat.h"
#include "spec_file.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitParse = 2;
constexpr int kExitResource = 3;
constexpr int kExitNumerical = 4;

struct Failure {
    int code;
    std::string message;
};

int exit_code(ordstat_status s) {
    switch (s) {
    case ORDSTAT_OK: return kExitOk;
    case ORDSTAT_ERR_RESOURCE: return kExitResource;
    case ORDSTAT_ERR_NUMERICAL: return kExitNumerical;
    case ORDSTAT_ERR_INTERNAL: return 1;
    default: return kExitParse;
    }
}

void check(ordstat_status s) {
    if (s != ORDSTAT_OK) throw Failure{exit_code(s), std::string(ordstat_status_name(s)) + ": " + ordstat_last_error()};
}

struct QueryDeleter {
    void operator()(ordstat_query* p) const { ordstat_query_destroy(p); }
};
struct DistDeleter {
    void operator()(ordstat_dist* p) const { ordstat_dist_destroy(p); }
};
struct MatrixDeleter {
    void operator()(ordstat_matrix* p) const { ordstat_matrix_destroy(p); }
};
struct ChainDeleter {
    void operator()(ordstat_chain* p) const { ordstat_chain_destroy(p); }
};
using QueryPtr = std::unique_ptr<ordstat_query, QueryDeleter>;
using DistPtr = std::unique_ptr<ordstat_dist, DistDeleter>;
using MatrixPtr = std::unique_ptr<ordstat_matrix, MatrixDeleter>;
using ChainPtr = std::unique_ptr<ordstat_chain, ChainDeleter>;

QueryPtr make_query(std::int64_t n, const std::vector<std::int64_t>& c, const std::vector<double>& x) {
    if (c.size() != x.size()) {
        throw Failure{kExitParse, "c has " + std::to_string(c.size()) + " entries but x has " + std::to_string(x.size())};
    }
    ordstat_query* q = nullptr;
    check(ordstat_query_create(n, c.data(), x.data(), c.size(), &q));
    return QueryPtr(q);
}

DistPtr make_dist(const ordstat_cli::DistSpec& d) {
    ordstat_dist* out = nullptr;
    if (d.name == "uniform") {
        check(ordstat_dist_uniform(d.a, d.b, &out));
    } else if (d.name == "gaussian") {
        check(ordstat_dist_gaussian(d.mean, d.sigma, &out));
    } else if (d.name == "exponential") {
        check(ordstat_dist_exponential(d.rate, &out));
    } else if (d.name == "atoms") {
        if (d.points.size() != d.masses.size()) throw Failure{kExitParse, "atoms: points and masses differ in length"};
        check(ordstat_dist_atoms(d.points.data(), d.masses.data(), d.points.size(), &out));
    } else {
        check(ordstat_dist_empirical(d.samples.data(), d.samples.size(), &out));
    }
    return DistPtr(out);
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_short(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

template <typename T>
std::vector<T> parse_list(const std::string& text, const char* what) {
    std::vector<T> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::istringstream is(item);
        T v{};
        if (!(is >> v) || !(is >> std::ws).eof()) throw Failure{kExitParse, std::string(what) + ": cannot parse \"" + item + "\""};
        out.push_back(v);
    }
    if (out.empty()) throw Failure{kExitParse, std::string(what) + ": empty list"};
    return out;
}

// ---------------------------------------------------------------------------
// compute
// ---------------------------------------------------------------------------

struct ComputeArgs {
    std::string spec_path;
    std::string algorithm;
    std::optional<std::uint64_t> trials;
    std::optional<std::uint64_t> seed;
    std::optional<bool> prune;
    bool precompute_sums = false;
    bool cross_check = false;
    unsigned threads = 1;
};

// One problem instance behind the C interface, either kind.
class Problem {
public:
    Problem(const ordstat_cli::ProblemSpec& spec, const ComputeArgs& args) : spec_(spec) {
        query_ = make_query(spec.n, spec.c, spec.x);
        if (spec.kind == "independent") {
            std::vector<const ordstat_dist*> raw;
            for (const auto& d : spec.distributions) {
                dists_.push_back(make_dist(d));
                raw.push_back(dists_.back().get());
            }
            ordstat_matrix* m = nullptr;
            check(ordstat_matrix_from_distributions(query_.get(), raw.data(), raw.size(), &m));
            matrix_.reset(m);
        } else {
            ordstat_chain* ch = nullptr;
            if (spec.matrix_kernel) {
                const double size = static_cast<double>(spec.support_hi) - static_cast<double>(spec.support_lo) + 1.0;
                if (size < 1.0 || static_cast<double>(spec.rows.size()) != size * size ||
                    static_cast<double>(spec.initial_distribution.size()) != size) {
                    throw Failure{kExitParse, "kernel rows or initial_distribution do not match the support"};
                }
                check(ordstat_chain_from_matrix(spec.support_lo, spec.support_hi, spec.rows.data(),
                                                spec.initial_distribution.data(), &ch));
            } else {
                if (spec.offsets.size() != spec.probs.size()) {
                    throw Failure{kExitParse, "kernel offsets and probs differ in length"};
                }
                check(ordstat_chain_from_steps(spec.offsets.data(), spec.probs.data(), spec.offsets.size(),
                                               spec.initial, static_cast<std::size_t>(std::max<std::int64_t>(1, spec.n)),
                                               spec.truncation.has_value(), spec.truncation ? spec.truncation->first : 0,
                                               spec.truncation ? spec.truncation->second : 0, &ch));
            }
            chain_.reset(ch);
        }
        spill_ = ordstat_spill_default_options();
        spill_.prune = args.prune.value_or(spec.prune.value_or(true)) ? 1 : 0;
        spill_.precompute_sums = (args.precompute_sums || spec.precompute_sums.value_or(false)) ? 1 : 0;
        spill_.threads = args.threads;
        dep_ = ordstat_dependent_default_options();
        dep_.prune = spill_.prune;
        dep_.threads = args.threads;
        trials_ = args.trials.value_or(spec.trials.value_or(10000));
        seed_ = args.seed.value_or(spec.seed.value_or(1));
        threads_ = args.threads;
    }

    bool is_chain() const { return chain_ != nullptr; }
    std::uint64_t trials() const { return trials_; }

    double exact(const std::string& algorithm) const {
        double p = 0.0;
        if (is_chain()) {
            if (algorithm == "spill") {
                check(ordstat_solve_chain(chain_.get(), query_.get(), &dep_, &p));
            } else if (algorithm == "brute") {
                check(ordstat_enumerate_paths(chain_.get(), query_.get(), 1e7, &p));
            } else {
                throw Failure{kExitParse, "algorithm \"" + algorithm + "\" does not apply to chains"};
            }
        } else if (algorithm == "spill") {
            check(ordstat_solve_spill(query_.get(), matrix_.get(), &spill_, &p));
        } else if (algorithm == "boncelet") {
            check(ordstat_solve_boncelet(query_.get(), matrix_.get(), 0, threads_, &p));
        } else if (algorithm == "brute") {
            check(ordstat_solve_brute(query_.get(), matrix_.get(), &p));
        } else {
            throw Failure{kExitParse, "unknown algorithm \"" + algorithm + "\""};
        }
        return p;
    }

    ordstat_mc_result monte_carlo() const {
        ordstat_mc_result r{};
        if (is_chain()) {
            check(ordstat_monte_carlo_chain(chain_.get(), query_.get(), trials_, seed_, threads_, &r));
        } else {
            std::vector<const ordstat_dist*> raw;
            for (const auto& d : dists_) raw.push_back(d.get());
            check(ordstat_monte_carlo_independent(query_.get(), raw.data(), raw.size(), trials_, seed_, threads_, &r));
        }
        return r;
    }

    // Exact path-enumeration / brute-force value, or nothing when over the cap.
    std::optional<double> brute_if_feasible() const {
        double p = 0.0;
        const ordstat_status s = is_chain() ? ordstat_enumerate_paths(chain_.get(), query_.get(), 1e7, &p)
                                            : ordstat_solve_brute(query_.get(), matrix_.get(), &p);
        if (s == ORDSTAT_ERR_RESOURCE) return std::nullopt;
        check(s);
        return p;
    }

private:
    const ordstat_cli::ProblemSpec& spec_;
    QueryPtr query_;
    std::vector<DistPtr> dists_;
    MatrixPtr matrix_;
    ChainPtr chain_;
    ordstat_spill_options spill_{};
    ordstat_dependent_options dep_{};
    std::uint64_t trials_ = 10000;
    std::uint64_t seed_ = 1;
    unsigned threads_ = 1;
};

int run_compute(const ComputeArgs& args) {
    ordstat_cli::ProblemSpec spec;
    try {
        spec = ordstat_cli::load_problem_spec(args.spec_path);
    } catch (const ordstat_cli::SpecError& e) {
        throw Failure{kExitParse, e.what()};
    }
    const std::string algorithm = !args.algorithm.empty() ? args.algorithm : spec.algorithm.value_or("spill");
    if (algorithm != "spill" && algorithm != "boncelet" && algorithm != "brute" && algorithm != "mc") {
        throw Failure{kExitParse, "unknown algorithm \"" + algorithm + "\""};
    }
    if (spec.kind == "chain" && spec.H) {
        std::cerr << "note: options.H is ignored for chains; micro-bins resolve every support point\n";
    }
    const Problem problem(spec, args);

    double value = 0.0;
    if (algorithm == "mc") {
        const auto r = problem.monte_carlo();
        value = r.estimate;
        std::printf("probability=%s\n", fmt17(value).c_str());
        std::printf("stderr=%s\ntrials=%llu\n", fmt17(r.stderr_value).c_str(),
                    static_cast<unsigned long long>(r.trials));
    } else {
        value = problem.exact(algorithm);
        std::printf("probability=%s\n", fmt17(value).c_str());
    }
    std::fflush(stdout);
    if (!args.cross_check) return kExitOk;

    // reference: brute force when feasible, otherwise the other side of the
    // exact / Monte Carlo divide
    std::string oracle;
    double reference = 0.0;
    double tolerance = 1e-10;
    bool statistical = false;
    const auto brute = algorithm == "brute" ? std::nullopt : problem.brute_if_feasible();
    if (brute) {
        oracle = problem.is_chain() ? "path-enumeration" : "brute-force";
        reference = *brute;
        statistical = algorithm == "mc";
    } else if (algorithm == "mc" || algorithm == "brute") {
        oracle = "spill";
        reference = problem.exact("spill");
        statistical = algorithm == "mc";
    } else {
        oracle = "monte-carlo";
        reference = problem.monte_carlo().estimate;
        statistical = true;
    }
    if (statistical) {
        // 4 standard errors of a binomial proportion at the exact value
        const double exact = algorithm == "mc" ? reference : value;
        tolerance = 4.0 * std::sqrt(exact * (1.0 - exact) / static_cast<double>(problem.trials())) + 1e-12;
    }
    const double diff = std::abs(value - reference);
    const bool ok = diff <= tolerance;
    std::printf("cross_check=%s reference=%s abs_diff=%s tolerance=%s status=%s\n", oracle.c_str(),
                fmt17(reference).c_str(), fmt_short(diff).c_str(), fmt_short(tolerance).c_str(),
                ok ? "ok" : "mismatch");
    return ok ? kExitOk : kExitNumerical;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
    std::string n_list = "6,12,18,24,30";
    std::string d_list = "1,2,3,4,5,6";
    std::string c_list;
    std::string algorithms = "spill,boncelet";
    int reps = 3;
    std::string out;
    std::uint64_t seed = 1;
    bool parallel_cells = false;
    bool prune = true;
    bool precompute_sums = false;
};

struct BenchRun {
    std::string algorithm;
    int rep = 0;
    bool skipped = false;
    double seconds = 0.0;
    double result = 0.0;
};

struct BenchCell {
    std::int64_t n = 0;
    std::vector<std::int64_t> c;
    std::vector<BenchRun> runs;
    std::string error;
    int error_code = 0;
};

std::string join_c(const std::vector<std::int64_t>& c) {
    std::string s;
    for (std::size_t j = 0; j < c.size(); ++j) s += (j ? ";" : "") + std::to_string(c[j]);
    return s;
}

// Seeded random bin-probability rows; every entry is at least 1e-3 before
// normalisation so no bin is impossible.
std::vector<double> random_rows(std::int64_t n, std::size_t cols, std::uint64_t seed, std::size_t d) {
    std::seed_seq seq{seed, static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(d)};
    std::mt19937_64 gen(seq);
    std::vector<double> values;
    for (std::int64_t i = 0; i < n; ++i) {
        std::vector<double> row(cols);
        double sum = 0.0;
        for (double& v : row) {
            v = 1e-3 + static_cast<double>(gen() >> 11) * 0x1.0p-53;
            sum += v;
        }
        for (double& v : row) values.push_back(v / sum);
    }
    return values;
}

void run_cell(BenchCell& cell, const std::vector<std::string>& algorithms, const BenchArgs& args) {
    try {
        const auto d = cell.c.size();
        std::vector<double> x(d);
        for (std::size_t j = 0; j < d; ++j) x[j] = static_cast<double>(j + 1);
        const QueryPtr query = make_query(cell.n, cell.c, x);
        const auto values = random_rows(cell.n, d + 1, args.seed, d);
        ordstat_matrix* m = nullptr;
        check(ordstat_matrix_create(static_cast<std::size_t>(cell.n), d + 1, values.data(), &m));
        const MatrixPtr matrix(m);
        ordstat_spill_options opts = ordstat_spill_default_options();
        opts.prune = args.prune ? 1 : 0;
        opts.precompute_sums = args.precompute_sums ? 1 : 0;

        for (const auto& algorithm : algorithms) {
            for (int rep = 0; rep < args.reps; ++rep) {
                BenchRun run{algorithm, rep, false, 0.0, 0.0};
                double p = 0.0;
                const auto start = std::chrono::steady_clock::now();
                ordstat_status s = ORDSTAT_OK;
                if (algorithm == "spill") {
                    s = ordstat_solve_spill(query.get(), matrix.get(), &opts, &p);
                } else if (algorithm == "boncelet") {
                    s = ordstat_solve_boncelet(query.get(), matrix.get(), 0, 1, &p);
                } else {
                    s = ordstat_solve_brute(query.get(), matrix.get(), &p);
                }
                const auto stop = std::chrono::steady_clock::now();
                if (s == ORDSTAT_ERR_RESOURCE) {
                    run.skipped = true;
                } else {
                    check(s);
                    run.seconds = std::chrono::duration<double>(stop - start).count();
                    run.result = p;
                }
                cell.runs.push_back(run);
                if (run.skipped) {
                    for (int r = rep + 1; r < args.reps; ++r) cell.runs.push_back({algorithm, r, true, 0.0, 0.0});
                    break;
                }
            }
        }
    } catch (const Failure& f) {
        cell.error = f.message;
        cell.error_code = f.code;
    }
}

std::string summary_path(const std::string& out) {
    const std::string ext = ".csv";
    if (out.size() > ext.size() && out.compare(out.size() - ext.size(), ext.size(), ext) == 0) {
        return out.substr(0, out.size() - ext.size()) + ".summary.csv";
    }
    return out + ".summary.csv";
}

int run_bench(const BenchArgs& args) {
    const auto ns = parse_list<std::int64_t>(args.n_list, "--n-list");
    const auto algorithms = parse_list<std::string>(args.algorithms, "--algorithms");
    for (const auto& a : algorithms) {
        if (a != "spill" && a != "boncelet" && a != "brute") {
            throw Failure{kExitParse, "--algorithms: unknown or non-exact algorithm \"" + a + "\""};
        }
    }
    if (args.reps < 1) throw Failure{kExitParse, "--reps must be positive"};

    std::ofstream csv(args.out);
    std::ofstream summary(summary_path(args.out));
    if (!csv || !summary) throw Failure{kExitResource, "cannot write " + args.out};

    std::vector<std::vector<std::int64_t>> cs;
    if (!args.c_list.empty()) {
        cs.push_back(parse_list<std::int64_t>(args.c_list, "--c-list"));
    } else {
        for (std::int64_t d : parse_list<std::int64_t>(args.d_list, "--d-list")) {
            if (d < 1) throw Failure{kExitParse, "--d-list entries must be positive"};
            std::vector<std::int64_t> c;
            for (std::int64_t j = 1; j <= d; ++j) c.push_back(j);
            cs.push_back(c);
        }
    }
    std::vector<BenchCell> cells;
    for (std::int64_t n : ns) {
        for (const auto& c : cs) cells.push_back({n, c, {}, {}, 0});
    }

    if (args.parallel_cells) {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t k = next++; k < cells.size(); k = next++) run_cell(cells[k], algorithms, args);
            });
        }
        for (auto& t : pool) t.join();
    } else {
        for (auto& cell : cells) run_cell(cell, algorithms, args);
    }

    int status = kExitOk;
    csv << "algorithm,n,d,c,rep,wall_time_seconds,result\n";
    summary << "algorithm,n,d,c,reps,median_wall_time_seconds,result\n";
    for (const auto& cell : cells) {
        const std::string key = std::to_string(cell.n) + "," + std::to_string(cell.c.size()) + "," + join_c(cell.c);
        if (!cell.error.empty()) {
            // an invalid cell (e.g. d > n) is skipped, anything else aborts
            if (cell.error_code != kExitParse) throw Failure{cell.error_code, cell.error};
            for (const auto& a : algorithms) {
                for (int rep = 0; rep < args.reps; ++rep) csv << a << "," << key << "," << rep << ",,skipped\n";
                summary << a << "," << key << "," << args.reps << ",,skipped\n";
            }
            continue;
        }
        double lo = 2.0, hi = -1.0;
        for (const auto& a : algorithms) {
            std::vector<double> times;
            std::optional<double> result;
            for (const auto& r : cell.runs) {
                if (r.algorithm != a) continue;
                if (r.skipped) {
                    csv << a << "," << key << "," << r.rep << ",,skipped\n";
                    continue;
                }
                char t[64];
                std::snprintf(t, sizeof t, "%.9g", r.seconds);
                csv << a << "," << key << "," << r.rep << "," << t << "," << fmt17(r.result) << "\n";
                times.push_back(r.seconds);
                result = r.result;
                lo = std::min(lo, r.result);
                hi = std::max(hi, r.result);
            }
            if (times.empty()) {
                summary << a << "," << key << "," << args.reps << ",,skipped\n";
                continue;
            }
            std::sort(times.begin(), times.end());
            const std::size_t m = times.size();
            const double median = m % 2 ? times[m / 2] : 0.5 * (times[m / 2 - 1] + times[m / 2]);
            char t[64];
            std::snprintf(t, sizeof t, "%.9g", median);
            summary << a << "," << key << "," << m << "," << t << "," << fmt17(*result) << "\n";
        }
        if (hi >= lo && hi - lo > 1e-10) {
            std::cerr << "cell n=" << cell.n << " c=" << join_c(cell.c) << ": algorithms disagree by "
                      << fmt_short(hi - lo) << "\n";
            status = kExitNumerical;
        }
    }
    if (!csv || !summary) throw Failure{kExitResource, "error writing " + args.out};
    return status;
}

// ---------------------------------------------------------------------------
// randomwalk
// ---------------------------------------------------------------------------

struct WalkArgs {
    std::string kernel = "0.4,0.3,0.3";
    std::string horizons = "30,60,90,120,150,180,210,240,270,300,330,360,365";
    std::string percentiles = "90,95,99";
    std::string thresholds = "3,5,10";
    std::uint64_t trials = 10000;
    std::uint64_t seed = 1;
    std::int64_t initial = 0;
    std::string out;
    unsigned threads = 1;
    bool prune = true;
};

int run_randomwalk(const WalkArgs& args) {
    const auto q = parse_list<double>(args.kernel, "--kernel");
    if (q.size() != 3) throw Failure{kExitParse, "--kernel expects q_dn,q_0,q_up"};
    const auto horizons = parse_list<std::int64_t>(args.horizons, "--horizons");
    const auto percentiles = parse_list<std::int64_t>(args.percentiles, "--percentiles");
    const auto thresholds = parse_list<double>(args.thresholds, "--thresholds");
    if (percentiles.size() != thresholds.size()) {
        throw Failure{kExitParse, "--percentiles and --thresholds differ in length"};
    }
    for (std::int64_t p : percentiles) {
        if (p < 1 || p > 100) throw Failure{kExitParse, "--percentiles entries must lie in 1..100"};
    }

    std::ofstream file;
    if (!args.out.empty()) {
        file.open(args.out);
        if (!file) throw Failure{kExitResource, "cannot write " + args.out};
    }
    std::ostream& out = args.out.empty() ? std::cout : file;
    out << "horizon,exact_probability,mc_estimate,mc_stderr\n";

    const std::int64_t offsets[3] = {-1, 0, 1};
    for (std::int64_t n : horizons) {
        if (n < 1) throw Failure{kExitParse, "--horizons entries must be positive"};
        // c_j = floor(p_j n / 100); equal indices keep the tightest threshold
        std::vector<std::pair<std::int64_t, double>> pairs;
        for (std::size_t j = 0; j < percentiles.size(); ++j) {
            const std::int64_t c = percentiles[j] * n / 100;
            if (c >= 1) pairs.emplace_back(c, thresholds[j]);
        }
        if (pairs.empty()) throw Failure{kExitParse, "horizon " + std::to_string(n) + " leaves no order statistic"};
        std::sort(pairs.begin(), pairs.end());
        std::vector<std::int64_t> c;
        std::vector<double> x;
        for (const auto& [ci, xi] : pairs) {
            if (!c.empty() && c.back() == ci) {
                x.back() = std::min(x.back(), xi);
            } else {
                c.push_back(ci);
                x.push_back(xi);
            }
        }
        const QueryPtr query = make_query(n, c, x);
        ordstat_chain* ch = nullptr;
        check(ordstat_chain_from_steps(offsets, q.data(), 3, args.initial, static_cast<std::size_t>(n), 0, 0, 0, &ch));
        const ChainPtr chain(ch);
        ordstat_dependent_options opts = ordstat_dependent_default_options();
        opts.threads = args.threads;
        opts.prune = args.prune ? 1 : 0;
        double exact = 0.0;
        check(ordstat_solve_chain(chain.get(), query.get(), &opts, &exact));
        ordstat_mc_result mc{};
        check(ordstat_monte_carlo_chain(chain.get(), query.get(), args.trials,
                                        args.seed + static_cast<std::uint64_t>(n), args.threads, &mc));
        out << n << "," << fmt17(exact) << "," << fmt17(mc.estimate) << "," << fmt17(mc.stderr_value) << "\n";
        out.flush();
    }
    if (!out) throw Failure{kExitResource, "error writing output"};
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact joint CDFs of order statistics"};
    app.require_subcommand(1);

    ComputeArgs compute;
    auto* cmd_compute = app.add_subcommand("compute", "Solve one problem file and print its probability");
    cmd_compute->add_option("spec", compute.spec_path, "Problem file (JSON)")->required();
    cmd_compute->add_option("--algorithm", compute.algorithm, "spill | boncelet | brute | mc")
        ->check(CLI::IsMember({"spill", "boncelet", "brute", "mc"}));
    cmd_compute->add_option("--trials", compute.trials, "Monte Carlo trials (default 10000)");
    cmd_compute->add_option("--seed", compute.seed, "Monte Carlo seed (default 1)");
    cmd_compute->add_flag("--prune,!--no-prune", compute.prune, "Skip spill states that cannot reach acceptance");
    cmd_compute->add_flag("--precompute-sums", compute.precompute_sums, "Tabulate run sums once per step");
    cmd_compute->add_flag("--cross-check", compute.cross_check, "Compare against brute force or Monte Carlo");
    cmd_compute->add_option("--threads", compute.threads, "Worker threads")->check(CLI::Range(1u, 256u));

    BenchArgs bench;
    auto* cmd_bench = app.add_subcommand("bench", "Time solvers over an (n, d) grid and write CSV");
    cmd_bench->add_option("--n-list", bench.n_list, "Comma-separated n values")->capture_default_str();
    cmd_bench->add_option("--d-list", bench.d_list, "Comma-separated d values, C = (1..d)")->capture_default_str();
    cmd_bench->add_option("--c-list", bench.c_list, "Fixed index list C for every n (overrides --d-list)");
    cmd_bench->add_option("--algorithms", bench.algorithms, "spill,boncelet,brute")->capture_default_str();
    cmd_bench->add_option("--reps", bench.reps, "Repetitions per cell")->capture_default_str();
    cmd_bench->add_option("--out", bench.out, "CSV output path")->required();
    cmd_bench->add_option("--seed", bench.seed, "Seed for the random bin probabilities")->capture_default_str();
    cmd_bench->add_flag("--parallel-cells", bench.parallel_cells, "Run cells concurrently");
    cmd_bench->add_flag("--prune,!--no-prune", bench.prune, "Pruning for the spill solver");
    cmd_bench->add_flag("--precompute-sums", bench.precompute_sums, "Precomputed run sums for the spill solver");

    WalkArgs walk;
    auto* cmd_walk = app.add_subcommand("randomwalk", "Random-walk drawdown probabilities, exact vs Monte Carlo");
    cmd_walk->add_option("--kernel", walk.kernel, "q_dn,q_0,q_up")->capture_default_str();
    cmd_walk->add_option("--horizons", walk.horizons, "Comma-separated horizons n")->capture_default_str();
    cmd_walk->add_option("--percentiles", walk.percentiles, "c_j = floor(p_j n / 100)")->capture_default_str();
    cmd_walk->add_option("--thresholds", walk.thresholds, "x_j, one per percentile")->capture_default_str();
    cmd_walk->add_option("--trials", walk.trials, "Monte Carlo trials")->capture_default_str();
    cmd_walk->add_option("--seed", walk.seed, "Monte Carlo seed (horizon n uses seed + n)")->capture_default_str();
    cmd_walk->add_option("--initial", walk.initial, "X_0")->capture_default_str();
    cmd_walk->add_option("--out", walk.out, "CSV output path (default stdout)");
    cmd_walk->add_option("--threads", walk.threads, "Worker threads")->check(CLI::Range(1u, 256u));
    cmd_walk->add_flag("--prune,!--no-prune", walk.prune, "Skip spill states that cannot reach acceptance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitParse;
    }

    try {
        if (cmd_compute->parsed()) return run_compute(compute);
        if (cmd_bench->parsed()) return run_bench(bench);
        return run_randomwalk(walk);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
