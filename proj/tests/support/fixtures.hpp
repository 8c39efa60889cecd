#pragma once

// Shared hand-built fixtures: the ten-case example database and the
// three-variable chain network, plus small random-input generators.

#include <cstdint>
#include <vector>

#include "bnkit/model.hpp"
#include "bnkit/simulate.hpp"

namespace fixtures {

// Value index 0 = absent, 1 = present.
inline std::vector<bnkit::Variable> xyz_variables() {
    return {
        {"x1", {"absent", "present"}},
        {"x2", {"absent", "present"}},
        {"x3", {"absent", "present"}},
    };
}

// The ten-case example database over (x1, x2, x3).
inline bnkit::Database table1() {
    bnkit::Database db;
    db.variables = xyz_variables();
    db.cases = {
        {1, 0, 0}, {1, 1, 1}, {0, 0, 1}, {1, 1, 1}, {0, 0, 0},
        {0, 1, 1}, {1, 1, 1}, {0, 0, 0}, {1, 1, 1}, {0, 0, 0},
    };
    return db;
}

// Chain x1 -> x2 -> x3.
inline bnkit::Structure bs1() {
    return bnkit::Structure{xyz_variables(), {{}, {0}, {1}}};
}

// Fork x1 -> x2, x1 -> x3.
inline bnkit::Structure bs2() {
    return bnkit::Structure{xyz_variables(), {{}, {0}, {0}}};
}

// The chain structure with its conditional probabilities.
inline bnkit::Network b1() {
    bnkit::Network net;
    net.structure = bs1();
    net.cpts = {
        {{0.4, 0.6}},
        {{0.7, 0.3}, {0.2, 0.8}},
        {{0.85, 0.15}, {0.1, 0.9}},
    };
    return net;
}

// Uniformly random complete database over n variables with the given
// arities.
inline bnkit::Database random_database(bnkit::RandomStream& rng, const std::vector<int>& arities,
                                       int m) {
    bnkit::Database db;
    for (size_t i = 0; i < arities.size(); ++i) {
        bnkit::Variable v;
        v.name = "v" + std::to_string(i);
        for (int k = 0; k < arities[i]; ++k) v.values.push_back("c" + std::to_string(k));
        db.variables.push_back(std::move(v));
    }
    db.cases.assign(m, std::vector<int>(arities.size(), 0));
    for (auto& row : db.cases) {
        for (size_t i = 0; i < arities.size(); ++i) {
            row[i] = static_cast<int>(rng.next_bits() % static_cast<std::uint64_t>(arities[i]));
        }
    }
    return db;
}

// Random DAG over the database's variables: each node draws parents from
// the nodes before it in a random permutation.
inline bnkit::Structure random_structure(bnkit::RandomStream& rng,
                                         const std::vector<bnkit::Variable>& variables,
                                         int max_parents) {
    const int n = static_cast<int>(variables.size());
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_bits() % static_cast<std::uint64_t>(i + 1));
        std::swap(perm[i], perm[j]);
    }
    std::vector<std::vector<int>> parents(n);
    for (int pos = 1; pos < n; ++pos) {
        const int node = perm[pos];
        for (int prev = 0; prev < pos; ++prev) {
            if (static_cast<int>(parents[node].size()) >= max_parents) break;
            if (rng.next_bits() % 2 == 0) parents[node].push_back(perm[prev]);
        }
        std::sort(parents[node].begin(), parents[node].end());
    }
    return bnkit::Structure{variables, std::move(parents)};
}

}  // namespace fixtures
