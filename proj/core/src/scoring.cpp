#include "bnkit/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <unordered_map>

#include "bnkit/search.hpp"

namespace bnkit {

double log_big(const BigInt& v) {
    if (v <= 0) throw Error("log_big needs a positive integer");
    const unsigned bits = boost::multiprecision::msb(v);
    if (bits <= 52) return std::log(v.convert_to<double>());
    const unsigned shift = bits - 52;
    const double mantissa = BigInt(v >> shift).convert_to<double>();
    return std::log(mantissa) + static_cast<double>(shift) * std::numbers::ln2;
}

namespace {

struct VectorHash {
    std::size_t operator()(const std::vector<int>& v) const {
        std::size_t seed = v.size();
        for (int x : v) {
            seed ^= static_cast<std::size_t>(x) + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2);
        }
        return seed;
    }
};

}  // namespace

CountTable tabulate_counts(const Database& db, int node, std::span<const int> parents) {
    const int n = db.num_variables();
    if (node < 0 || node >= n) throw Error("tabulate_counts: node index out of range");
    for (int p : parents) {
        if (p < 0 || p >= n) throw Error("tabulate_counts: parent index out of range");
        if (p == node) throw Error("tabulate_counts: node cannot be its own parent");
    }

    CountTable table;
    table.node = node;
    table.parents.assign(parents.begin(), parents.end());

    const int r = db.variables[node].arity();
    std::unordered_map<std::vector<int>, int, VectorHash> index;
    index.reserve(db.cases.size());
    std::vector<int> inst(parents.size());
    for (const auto& c : db.cases) {
        for (size_t k = 0; k < parents.size(); ++k) inst[k] = c[parents[k]];
        auto [it, inserted] = index.try_emplace(inst, table.num_instantiations());
        if (inserted) {
            CountEntry entry;
            entry.instantiation = inst;
            entry.value_counts.assign(r, 0);
            table.entries.push_back(std::move(entry));
        }
        CountEntry& entry = table.entries[it->second];
        ++entry.total;
        ++entry.value_counts[c[node]];
    }
    return table;
}

LogFactorialTable::LogFactorialTable(std::int64_t max_value) {
    if (max_value < 0) throw Error("LogFactorialTable needs max_value >= 0");
    table_.resize(static_cast<size_t>(max_value) + 1);
    long double acc = 0.0L;
    table_[0] = 0.0;
    for (std::int64_t k = 1; k <= max_value; ++k) {
        acc += std::log(static_cast<long double>(k));
        table_[static_cast<size_t>(k)] = static_cast<double>(acc);
    }
}

double LogFactorialTable::operator()(std::int64_t k) const {
    if (k < 0 || k > max_value()) {
        throw Error("log-factorial table does not cover " + std::to_string(k));
    }
    return table_[static_cast<size_t>(k)];
}

LogFactorialTable LogFactorialTable::for_database(const Database& db) {
    int max_arity = 2;
    for (const Variable& v : db.variables) max_arity = std::max(max_arity, v.arity());
    return LogFactorialTable(static_cast<std::int64_t>(db.num_cases()) + max_arity - 1);
}

double g_log_from_counts(const CountTable& counts, int child_arity, const LogFactorialTable& lf) {
    // Sum entries in instantiation-sorted order so the floating-point
    // result does not depend on the order cases were seen in.
    std::vector<int> order(counts.entries.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return counts.entries[a].instantiation < counts.entries[b].instantiation;
    });

    const double log_r_minus_1_fact = lf(child_arity - 1);
    double total = 0.0;
    for (int idx : order) {
        const CountEntry& e = counts.entries[idx];
        double term = log_r_minus_1_fact - lf(e.total + child_arity - 1);
        for (std::int64_t a : e.value_counts) term += lf(a);
        total += term;
    }
    return total;
}

double g_log(const Database& db, int node, std::span<const int> parents,
             const LogFactorialTable& lf) {
    const CountTable counts = tabulate_counts(db, node, parents);
    return g_log_from_counts(counts, db.variables[node].arity(), lf);
}

double g_log(const Database& db, int node, std::span<const int> parents) {
    return g_log(db, node, parents, LogFactorialTable::for_database(db));
}

double PriorMode::log_prior() const {
    switch (kind) {
        case PriorKind::none:
            return 0.0;
        case PriorKind::uniform_all_dags:
            return -log_big(count_dags(num_variables));
        case PriorKind::uniform_ordered:
            return -(static_cast<double>(num_variables) * (num_variables - 1) / 2.0) *
                   std::numbers::ln2;
    }
    return 0.0;
}

double LogScore::log10_value() const { return log_value / std::numbers::ln10; }

double LogScore::linear_value() const { return std::exp(log_value); }

LogScore structure_log_score(const Structure& s, const Database& db, const PriorMode& prior) {
    if (!same_variables(s.variables, db.variables)) {
        throw VariableMismatchError("structure and database variables differ");
    }
    if (db.num_cases() < 1) throw Error("scoring needs at least one case");
    check_database(db);
    if (prior.kind != PriorKind::none && prior.num_variables != s.num_nodes()) {
        throw VariableMismatchError("prior was built for a different variable count");
    }

    const LogFactorialTable lf = LogFactorialTable::for_database(db);
    double total = prior.log_prior();
    for (int i = 0; i < s.num_nodes(); ++i) {
        total += g_log(db, i, s.parents[i], lf);
    }
    return LogScore{total, prior};
}

Comparison compare(const Structure& s1, const Structure& s2, const Database& db) {
    const PriorMode no_prior = PriorMode::none();
    const double l1 = structure_log_score(s1, db, no_prior).log_value;
    const double l2 = structure_log_score(s2, db, no_prior).log_value;
    Comparison c;
    c.log_ratio = l1 - l2;
    c.ratio = std::exp(c.log_ratio);
    return c;
}

std::vector<double> normalized_posteriors(const std::vector<Structure>& structures,
                                          const Database& db, const PriorMode& prior) {
    if (structures.empty()) throw Error("normalized_posteriors needs a nonempty structure list");

    std::vector<double> logs;
    logs.reserve(structures.size());
    for (const Structure& s : structures) {
        logs.push_back(structure_log_score(s, db, prior).log_value);
    }
    const double max_log = *std::max_element(logs.begin(), logs.end());
    double sum = 0.0;
    for (double l : logs) sum += std::exp(l - max_log);
    const double log_norm = max_log + std::log(sum);

    std::vector<double> posteriors;
    posteriors.reserve(logs.size());
    for (double l : logs) posteriors.push_back(std::exp(l - log_norm));
    return posteriors;
}

}  // namespace bnkit
