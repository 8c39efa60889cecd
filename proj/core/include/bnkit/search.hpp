#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "bnkit/model.hpp"
#include "bnkit/scoring.hpp"

namespace bnkit {

// Search settings: node ordering, parent-count cap, prior, and the worker
// count for the per-node candidate scoring loop (1 = sequential).
struct SearchConfig {
    Ordering ordering;
    int max_parents = kNoParentBound;  // resolves to n-1
    PriorMode prior = PriorMode::none();
    int threads = 1;

    static constexpr int kNoParentBound = -1;
};

// One scored candidate parent set. For the greedy search this is the
// current set plus one tried node; for the exhaustive search, a whole
// subset.
struct TraceStep {
    std::vector<int> parents_tried;
    double log_g = 0.0;
    bool accepted = false;
};

struct NodeTrace {
    int node = 0;
    std::vector<TraceStep> steps;
};

struct SearchResult {
    Structure structure;
    std::vector<double> per_node_log_g;
    LogScore total;
    std::vector<NodeTrace> trace;
};

// Greedy parent selection per node in ordering position order: grow the
// parent set by the predecessor whose addition most increases g, while
// the increase is strictly positive and the set stays under the bound.
// Ties go to the candidate earliest in the ordering. Deterministic,
// including the trace, for any thread count.
SearchResult k2(const Database& db, const SearchConfig& cfg);

// Scores every subset of `candidates` of size <= max_parents and returns
// the best (parent set, log g). Ties prefer smaller sets, then the
// lexicographically smallest index vector.
std::pair<std::vector<int>, double> best_parents_exhaustive(const Database& db, int node,
                                                            std::span<const int> candidates,
                                                            int max_parents);

// Per-node exhaustive maximization over all ordering-consistent parent
// sets; the global optimum among structures honoring the ordering and
// the parent bound.
SearchResult exhaustive_ordered_search(const Database& db, const SearchConfig& cfg);

// Visits every labeled DAG on n nodes exactly once, as a vector of
// ascending parent sets per node. Guarded at n <= 6.
inline constexpr int kDagEnumerationGuard = 6;
void enumerate_all_dags(int n,
                        const std::function<void(const std::vector<std::vector<int>>&)>& visit);

// Exact count of labeled DAGs on n nodes (alternating-sum recurrence).
BigInt count_dags(int n);

// Exact count of ordering-consistent structures: 2^(n(n-1)/2).
BigInt count_ordered(int n);

}  // namespace bnkit
