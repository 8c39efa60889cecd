#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bnkit/model.hpp"

namespace bnkit {

using BigInt = boost::multiprecision::cpp_int;

// Natural log of a positive big integer, accurate to double precision.
double log_big(const BigInt& v);

// Counts for one (node, parent set) pair: one entry per parent
// instantiation observed in the database, in first-occurrence order.
struct CountEntry {
    std::vector<int> instantiation;      // one value index per parent, ascending parent order
    std::int64_t total = 0;              // N_ij
    std::vector<std::int64_t> value_counts;  // alpha_ij., one per child value
};

struct CountTable {
    int node = 0;
    std::vector<int> parents;
    std::vector<CountEntry> entries;

    int num_instantiations() const { return static_cast<int>(entries.size()); }
};

// Single pass over the cases; amortized O(1) per case via hashing on the
// parent instantiation vector.
CountTable tabulate_counts(const Database& db, int node, std::span<const int> parents);

// Precomputed table of ln(k!) for k = 0..max_value, built by exact
// summation of logs (long double accumulator), not a Stirling series.
class LogFactorialTable {
public:
    explicit LogFactorialTable(std::int64_t max_value);

    double operator()(std::int64_t k) const;
    std::int64_t max_value() const { return static_cast<std::int64_t>(table_.size()) - 1; }

    // Large enough for any per-node term of the given database: covers
    // m + max arity - 1.
    static LogFactorialTable for_database(const Database& db);

private:
    std::vector<double> table_;
};

// The structure prior P(B_S) convention in use.
enum class PriorKind {
    none,              // P(B_S) = 1: the score is the marginal likelihood
    uniform_all_dags,  // P(B_S) = 1 / (number of labeled DAGs on n nodes)
    uniform_ordered,   // P(B_S) = 1 / 2^(n(n-1)/2)
};

struct PriorMode {
    PriorKind kind = PriorKind::none;
    int num_variables = 0;

    static PriorMode none() { return {PriorKind::none, 0}; }
    static PriorMode uniform_all_dags(int n) { return {PriorKind::uniform_all_dags, n}; }
    static PriorMode uniform_ordered(int n) { return {PriorKind::uniform_ordered, n}; }

    double log_prior() const;
};

// A score kept in natural-log domain, tagged with the prior that
// produced it.
struct LogScore {
    double log_value = 0.0;
    PriorMode prior;

    double log10_value() const;
    // exp(log_value); underflows to 0 below roughly 1e-308.
    double linear_value() const;
};

// ln of the per-node factor
//   prod_j (r_i - 1)! / (N_ij + r_i - 1)! * prod_k alpha_ijk!
// over the observed parent instantiations. Entries are summed in a
// canonical (instantiation-sorted) order so the result is bit-identical
// under any permutation of the database's cases.
double g_log(const Database& db, int node, std::span<const int> parents,
             const LogFactorialTable& lf);
double g_log(const Database& db, int node, std::span<const int> parents);
double g_log_from_counts(const CountTable& counts, int child_arity, const LogFactorialTable& lf);

// log P(B_S) + sum_i g_log(i, parents_i). Decomposable by construction.
LogScore structure_log_score(const Structure& s, const Database& db, const PriorMode& prior);

// Joint-probability ratio of two structures under equal priors; the
// prior constant cancels.
struct Comparison {
    double log_ratio = 0.0;
    double ratio = 1.0;
};
Comparison compare(const Structure& s1, const Structure& s2, const Database& db);

// Posterior probability of each listed structure, normalized over the
// list via log-sum-exp with max subtraction.
std::vector<double> normalized_posteriors(const std::vector<Structure>& structures,
                                          const Database& db, const PriorMode& prior);

}  // namespace bnkit
