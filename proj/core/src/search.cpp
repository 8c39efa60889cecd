#include "bnkit/search.hpp"

#include <algorithm>
#include <functional>
#include <thread>

namespace bnkit {

namespace {

int resolve_parent_bound(const SearchConfig& cfg, int n) {
    int u = cfg.max_parents;
    if (u == SearchConfig::kNoParentBound) u = n - 1;
    if (u < 1 || u > n - 1) {
        throw Error("max_parents must be between 1 and n-1 (got " + std::to_string(u) + ")");
    }
    return u;
}

void check_search_inputs(const Database& db, const SearchConfig& cfg) {
    if (db.num_cases() < 1) throw Error("search needs at least one case");
    check_database(db);
    if (!cfg.ordering.is_permutation_of(db.num_variables())) {
        throw VariableMismatchError("ordering is not a permutation of the database's variables");
    }
    if (cfg.prior.kind != PriorKind::none && cfg.prior.num_variables != db.num_variables()) {
        throw VariableMismatchError("prior was built for a different variable count");
    }
    if (cfg.threads < 1) throw Error("thread count must be at least 1");
}

Structure structure_from_parents(const Database& db, std::vector<std::vector<int>> parents) {
    return Structure{db.variables, std::move(parents)};
}

// Scores g(i, parents(z)) for every candidate z, optionally across
// threads. Results land in a dense vector so the reduction below is
// identical regardless of scheduling.
std::vector<double> score_candidates(const Database& db, int node,
                                     const std::vector<int>& base_parents,
                                     const std::vector<int>& candidates,
                                     const LogFactorialTable& lf, int threads) {
    std::vector<double> scores(candidates.size());
    auto score_one = [&](size_t idx) {
        std::vector<int> trial = base_parents;
        trial.insert(std::upper_bound(trial.begin(), trial.end(), candidates[idx]),
                     candidates[idx]);
        scores[idx] = g_log(db, node, trial, lf);
    };
    const int workers = std::min<int>(threads, static_cast<int>(candidates.size()));
    if (workers <= 1) {
        for (size_t idx = 0; idx < candidates.size(); ++idx) score_one(idx);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (size_t idx = w; idx < candidates.size(); idx += workers) score_one(idx);
            });
        }
        for (auto& t : pool) t.join();
    }
    return scores;
}

}  // namespace

SearchResult k2(const Database& db, const SearchConfig& cfg) {
    check_search_inputs(db, cfg);
    const int n = db.num_variables();
    const int u = resolve_parent_bound(cfg, n);
    const LogFactorialTable lf = LogFactorialTable::for_database(db);

    std::vector<std::vector<int>> parents(n);
    std::vector<double> per_node_log_g(n, 0.0);
    std::vector<NodeTrace> trace;
    trace.reserve(n);

    std::vector<int> pred;  // predecessors in ordering position order
    for (int pos = 0; pos < n; ++pos) {
        const int node = cfg.ordering.order[pos];
        NodeTrace node_trace;
        node_trace.node = node;

        std::vector<int> current;  // ascending parent indices
        double log_old = g_log(db, node, current, lf);
        node_trace.steps.push_back(TraceStep{current, log_old, true});

        while (static_cast<int>(current.size()) < u) {
            std::vector<int> candidates;
            for (int z : pred) {
                if (!std::binary_search(current.begin(), current.end(), z)) {
                    candidates.push_back(z);
                }
            }
            if (candidates.empty()) break;

            const std::vector<double> scores =
                score_candidates(db, node, current, candidates, lf, cfg.threads);
            // First strict maximum wins: candidates are iterated in
            // ordering position order, so ties resolve to the earliest.
            size_t best = 0;
            for (size_t idx = 1; idx < candidates.size(); ++idx) {
                if (scores[idx] > scores[best]) best = idx;
            }
            const bool improves = scores[best] > log_old;
            for (size_t idx = 0; idx < candidates.size(); ++idx) {
                std::vector<int> tried = current;
                tried.insert(std::upper_bound(tried.begin(), tried.end(), candidates[idx]),
                             candidates[idx]);
                node_trace.steps.push_back(
                    TraceStep{std::move(tried), scores[idx], improves && idx == best});
            }
            if (!improves) break;
            current.insert(std::upper_bound(current.begin(), current.end(), candidates[best]),
                           candidates[best]);
            log_old = scores[best];
        }

        parents[node] = current;
        per_node_log_g[node] = log_old;
        trace.push_back(std::move(node_trace));
        pred.push_back(node);
    }

    SearchResult result;
    result.structure = structure_from_parents(db, std::move(parents));
    result.per_node_log_g = std::move(per_node_log_g);
    double total = cfg.prior.log_prior();
    for (double g : result.per_node_log_g) total += g;
    result.total = LogScore{total, cfg.prior};
    result.trace = std::move(trace);
    return result;
}

namespace {

// Visits every subset of `pool` of size <= k_max, ascending size and
// lexicographic within a size, with its log g.
void for_each_subset_scored(const Database& db, int node, const std::vector<int>& pool, int k_max,
                            const LogFactorialTable& lf,
                            const std::function<void(const std::vector<int>&, double)>& visit) {
    visit({}, g_log(db, node, {}, lf));
    std::vector<int> combo;
    for (int size = 1; size <= k_max; ++size) {
        combo.assign(size, 0);
        for (int k = 0; k < size; ++k) combo[k] = k;
        while (true) {
            std::vector<int> subset(size);
            for (int k = 0; k < size; ++k) subset[k] = pool[combo[k]];
            visit(subset, g_log(db, node, subset, lf));
            int k = size - 1;
            while (k >= 0 && combo[k] == static_cast<int>(pool.size()) - size + k) --k;
            if (k < 0) break;
            ++combo[k];
            for (int j = k + 1; j < size; ++j) combo[j] = combo[j - 1] + 1;
        }
    }
}

}  // namespace

std::pair<std::vector<int>, double> best_parents_exhaustive(const Database& db, int node,
                                                            std::span<const int> candidates,
                                                            int max_parents) {
    for (int c : candidates) {
        if (c == node) throw Error("candidate parents must exclude the node itself");
    }
    const LogFactorialTable lf = LogFactorialTable::for_database(db);
    std::vector<int> pool(candidates.begin(), candidates.end());
    std::sort(pool.begin(), pool.end());
    const int k_max = std::min<int>(max_parents, static_cast<int>(pool.size()));

    // Only a strict improvement replaces the incumbent, which realizes
    // the smaller-set-then-lexicographic tie-break.
    std::vector<int> best_set;
    double best_log = 0.0;
    bool first = true;
    for_each_subset_scored(db, node, pool, k_max, lf,
                           [&](const std::vector<int>& subset, double lg) {
                               if (first || lg > best_log) {
                                   first = false;
                                   best_log = lg;
                                   best_set = subset;
                               }
                           });
    return {std::move(best_set), best_log};
}

SearchResult exhaustive_ordered_search(const Database& db, const SearchConfig& cfg) {
    check_search_inputs(db, cfg);
    const int n = db.num_variables();
    const int u = resolve_parent_bound(cfg, n);
    const LogFactorialTable lf = LogFactorialTable::for_database(db);

    std::vector<std::vector<int>> parents(n);
    std::vector<double> per_node_log_g(n, 0.0);
    std::vector<NodeTrace> trace;
    trace.reserve(n);

    std::vector<int> pred;
    for (int pos = 0; pos < n; ++pos) {
        const int node = cfg.ordering.order[pos];
        std::vector<int> pool = pred;
        std::sort(pool.begin(), pool.end());
        const int k_max = std::min<int>(u, static_cast<int>(pool.size()));

        NodeTrace node_trace;
        node_trace.node = node;
        size_t best_step = 0;
        for_each_subset_scored(db, node, pool, k_max, lf,
                               [&](const std::vector<int>& subset, double lg) {
                                   node_trace.steps.push_back(TraceStep{subset, lg, false});
                                   if (lg > node_trace.steps[best_step].log_g) {
                                       best_step = node_trace.steps.size() - 1;
                                   }
                               });
        node_trace.steps[best_step].accepted = true;

        parents[node] = node_trace.steps[best_step].parents_tried;
        per_node_log_g[node] = node_trace.steps[best_step].log_g;
        trace.push_back(std::move(node_trace));
        pred.push_back(node);
    }

    SearchResult result;
    result.structure = structure_from_parents(db, std::move(parents));
    result.per_node_log_g = std::move(per_node_log_g);
    double total = cfg.prior.log_prior();
    for (double g : result.per_node_log_g) total += g;
    result.total = LogScore{total, cfg.prior};
    result.trace = std::move(trace);
    return result;
}

namespace {

bool parent_sets_acyclic(const std::vector<std::vector<int>>& parents) {
    const int n = static_cast<int>(parents.size());
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<int>> children(n);
    for (int i = 0; i < n; ++i) {
        for (int p : parents[i]) {
            children[p].push_back(i);
            ++indegree[i];
        }
    }
    std::vector<int> stack;
    for (int i = 0; i < n; ++i) {
        if (indegree[i] == 0) stack.push_back(i);
    }
    int emitted = 0;
    while (!stack.empty()) {
        const int node = stack.back();
        stack.pop_back();
        ++emitted;
        for (int c : children[node]) {
            if (--indegree[c] == 0) stack.push_back(c);
        }
    }
    return emitted == n;
}

}  // namespace

void enumerate_all_dags(int n,
                        const std::function<void(const std::vector<std::vector<int>>&)>& visit) {
    if (n < 0) throw Error("enumerate_all_dags needs n >= 0");
    if (n > kDagEnumerationGuard) {
        throw TooManyVariablesError("enumeration guard: " + std::to_string(n) +
                                    " nodes exceeds the limit of " +
                                    std::to_string(kDagEnumerationGuard));
    }

    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    }

    // Odometer over {absent, i->j, j->i} per unordered pair, filtered by a
    // cycle check. Each labeled DAG shows up exactly once.
    std::vector<int> state(pairs.size(), 0);
    std::vector<std::vector<int>> parents(n);
    while (true) {
        for (auto& p : parents) p.clear();
        for (size_t k = 0; k < pairs.size(); ++k) {
            if (state[k] == 1) parents[pairs[k].second].push_back(pairs[k].first);
            if (state[k] == 2) parents[pairs[k].first].push_back(pairs[k].second);
        }
        if (parent_sets_acyclic(parents)) {
            for (auto& p : parents) std::sort(p.begin(), p.end());
            visit(parents);
        }
        size_t k = 0;
        while (k < state.size() && state[k] == 2) {
            state[k] = 0;
            ++k;
        }
        if (k == state.size()) break;
        ++state[k];
    }
}

BigInt count_dags(int n) {
    if (n < 0) throw Error("count_dags needs n >= 0");
    std::vector<BigInt> r(static_cast<size_t>(n) + 1);
    r[0] = 1;
    for (int m = 1; m <= n; ++m) {
        // Binomial coefficients C(m, k) built incrementally.
        BigInt binom = 1;
        BigInt total = 0;
        for (int k = 1; k <= m; ++k) {
            binom = binom * (m - k + 1) / k;
            BigInt term = binom * (BigInt(1) << (k * (m - k))) * r[m - k];
            if (k % 2 == 1) {
                total += term;
            } else {
                total -= term;
            }
        }
        r[m] = total;
    }
    return r[static_cast<size_t>(n)];
}

BigInt count_ordered(int n) {
    if (n < 1) throw Error("count_ordered needs n >= 1");
    return BigInt(1) << (static_cast<std::int64_t>(n) * (n - 1) / 2);
}

}  // namespace bnkit
