#include "spec_file.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace ordstat_cli {

namespace {

using nlohmann::json;

void only_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw SpecError(where + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed) known = known || key == a;
        if (!known) throw SpecError(where + ": unknown key \"" + key + "\"");
    }
}

const json& required(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw SpecError(where + ": missing \"" + key + "\"");
    return *it;
}

double number(const json& v, const std::string& what) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
        if (s == "-inf") return -std::numeric_limits<double>::infinity();
    }
    throw SpecError(what + ": expected a number");
}

std::int64_t integer(const json& v, const std::string& what) {
    if (v.is_number_integer()) return v.get<std::int64_t>();
    if (v.is_number_float()) {
        const double d = v.get<double>();
        if (std::floor(d) == d && std::abs(d) < 9.0e15) return static_cast<std::int64_t>(d);
    }
    throw SpecError(what + ": expected an integer");
}

std::uint64_t unsigned_integer(const json& v, const std::string& what) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    const std::int64_t i = integer(v, what);
    if (i < 0) throw SpecError(what + ": must be non-negative");
    return static_cast<std::uint64_t>(i);
}

std::vector<double> numbers(const json& v, const std::string& what) {
    if (!v.is_array()) throw SpecError(what + ": expected an array");
    std::vector<double> out;
    for (const auto& e : v) out.push_back(number(e, what));
    return out;
}

std::vector<std::int64_t> integers(const json& v, const std::string& what) {
    if (!v.is_array()) throw SpecError(what + ": expected an array");
    std::vector<std::int64_t> out;
    for (const auto& e : v) out.push_back(integer(e, what));
    return out;
}

bool boolean(const json& v, const std::string& what) {
    if (!v.is_boolean()) throw SpecError(what + ": expected true or false");
    return v.get<bool>();
}

DistSpec parse_distribution(const json& v, const std::string& where) {
    only_keys(v, where, {"name", "params"});
    const json& name = required(v, "name", where);
    if (!name.is_string()) throw SpecError(where + ".name: expected a string");
    DistSpec d;
    d.name = name.get<std::string>();
    const json params = v.contains("params") ? v.at("params") : json::object();
    const std::string pw = where + ".params";
    if (d.name == "uniform") {
        only_keys(params, pw, {"a", "b"});
        d.a = number(required(params, "a", pw), pw + ".a");
        d.b = number(required(params, "b", pw), pw + ".b");
    } else if (d.name == "gaussian") {
        only_keys(params, pw, {"mean", "sigma"});
        d.mean = number(required(params, "mean", pw), pw + ".mean");
        d.sigma = number(required(params, "sigma", pw), pw + ".sigma");
    } else if (d.name == "exponential") {
        only_keys(params, pw, {"rate"});
        d.rate = number(required(params, "rate", pw), pw + ".rate");
    } else if (d.name == "atoms") {
        only_keys(params, pw, {"points", "masses"});
        d.points = numbers(required(params, "points", pw), pw + ".points");
        d.masses = numbers(required(params, "masses", pw), pw + ".masses");
    } else if (d.name == "empirical") {
        only_keys(params, pw, {"samples"});
        d.samples = numbers(required(params, "samples", pw), pw + ".samples");
    } else {
        throw SpecError(where + ".name: unknown distribution \"" + d.name + "\"");
    }
    return d;
}

void parse_kernel(const json& k, ProblemSpec& spec) {
    if (k.is_array()) {
        const auto q = numbers(k, "kernel");
        if (q.size() != 3) throw SpecError("kernel: expected [q_dn, q_0, q_up]");
        spec.offsets = {-1, 0, 1};
        spec.probs = q;
        return;
    }
    if (!k.is_object()) throw SpecError("kernel: expected an array or an object");
    if (k.contains("rows")) {
        only_keys(k, "kernel", {"support", "rows"});
        const auto support = integers(required(k, "support", "kernel"), "kernel.support");
        if (support.size() != 2) throw SpecError("kernel.support: expected [lo, hi]");
        spec.matrix_kernel = true;
        spec.support_lo = support[0];
        spec.support_hi = support[1];
        const json& rows = required(k, "rows", "kernel");
        if (!rows.is_array()) throw SpecError("kernel.rows: expected an array of rows");
        for (const auto& r : rows) {
            const auto row = numbers(r, "kernel.rows");
            spec.rows.insert(spec.rows.end(), row.begin(), row.end());
        }
        return;
    }
    only_keys(k, "kernel", {"offsets", "probs"});
    spec.offsets = integers(required(k, "offsets", "kernel"), "kernel.offsets");
    spec.probs = numbers(required(k, "probs", "kernel"), "kernel.probs");
}

} // namespace

ProblemSpec parse_problem_spec(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw SpecError(std::string("malformed JSON: ") + e.what());
    }
    only_keys(doc, "spec", {"kind", "n", "c", "x", "distributions", "kernel", "initial", "initial_distribution",
                            "truncation", "algorithm", "trials", "seed", "options"});

    ProblemSpec spec;
    const json& kind = required(doc, "kind", "spec");
    if (!kind.is_string()) throw SpecError("kind: expected a string");
    spec.kind = kind.get<std::string>();
    spec.n = integer(required(doc, "n", "spec"), "n");
    spec.c = integers(required(doc, "c", "spec"), "c");
    spec.x = numbers(required(doc, "x", "spec"), "x");

    if (spec.kind == "independent") {
        for (const char* key : {"kernel", "initial", "initial_distribution", "truncation"}) {
            if (doc.contains(key)) throw SpecError(std::string("\"") + key + "\" only applies to chains");
        }
        const json& dists = required(doc, "distributions", "spec");
        if (dists.is_array()) {
            for (std::size_t k = 0; k < dists.size(); ++k) {
                spec.distributions.push_back(parse_distribution(dists[k], "distributions[" + std::to_string(k) + "]"));
            }
        } else {
            spec.distributions.push_back(parse_distribution(dists, "distributions"));
        }
    } else if (spec.kind == "chain") {
        if (doc.contains("distributions")) throw SpecError("\"distributions\" only applies to independent problems");
        parse_kernel(required(doc, "kernel", "spec"), spec);
        if (spec.matrix_kernel) {
            if (doc.contains("initial") || doc.contains("truncation")) {
                throw SpecError("matrix kernels take \"initial_distribution\", not \"initial\" or \"truncation\"");
            }
            spec.initial_distribution =
                numbers(required(doc, "initial_distribution", "spec"), "initial_distribution");
        } else {
            if (doc.contains("initial_distribution")) {
                throw SpecError("\"initial_distribution\" requires a matrix kernel");
            }
            if (doc.contains("initial")) spec.initial = integer(doc.at("initial"), "initial");
            if (doc.contains("truncation")) {
                const auto t = integers(doc.at("truncation"), "truncation");
                if (t.size() != 2) throw SpecError("truncation: expected [lo, hi]");
                spec.truncation = std::make_pair(t[0], t[1]);
            }
        }
    } else {
        throw SpecError("kind: expected \"independent\" or \"chain\", got \"" + spec.kind + "\"");
    }

    if (doc.contains("algorithm")) {
        if (!doc.at("algorithm").is_string()) throw SpecError("algorithm: expected a string");
        spec.algorithm = doc.at("algorithm").get<std::string>();
    }
    if (doc.contains("trials")) spec.trials = unsigned_integer(doc.at("trials"), "trials");
    if (doc.contains("seed")) spec.seed = unsigned_integer(doc.at("seed"), "seed");
    if (doc.contains("options")) {
        const json& o = doc.at("options");
        only_keys(o, "options", {"prune", "precompute_sums", "H"});
        if (o.contains("prune")) spec.prune = boolean(o.at("prune"), "options.prune");
        if (o.contains("precompute_sums")) {
            spec.precompute_sums = boolean(o.at("precompute_sums"), "options.precompute_sums");
        }
        if (o.contains("H")) {
            spec.H = integer(o.at("H"), "options.H");
            if (*spec.H < 1) throw SpecError("options.H: must be positive");
        }
    }
    return spec;
}

ProblemSpec load_problem_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SpecError("cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem_spec(buf.str());
}

} // namespace ordstat_cli
