#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bnkit/errors.hpp"

namespace bnkit {

// A named discrete variable with an ordered list of value labels.
// Value indices used throughout the library are 0-based positions in
// `values`.
struct Variable {
    std::string name;
    std::vector<std::string> values;

    int arity() const { return static_cast<int>(values.size()); }

    std::optional<int> value_index(std::string_view label) const {
        for (int k = 0; k < arity(); ++k) {
            if (values[k] == label) return k;
        }
        return std::nullopt;
    }
};

bool same_variables(const std::vector<Variable>& a, const std::vector<Variable>& b);

// A directed acyclic graph over variables, stored as per-node parent sets.
// parents[i] holds the indices of node i's parents, sorted ascending.
struct Structure {
    std::vector<Variable> variables;
    std::vector<std::vector<int>> parents;

    int num_nodes() const { return static_cast<int>(variables.size()); }

    bool has_arc(int parent, int child) const;

    // All arcs as (parent, child) pairs, grouped by child in node order.
    std::vector<std::pair<int, int>> arcs() const;

    int num_arcs() const { return static_cast<int>(arcs().size()); }

    std::optional<int> variable_index(std::string_view name) const {
        for (int i = 0; i < num_nodes(); ++i) {
            if (variables[i].name == name) return i;
        }
        return std::nullopt;
    }
};

// A structure plus one conditional probability table per node.
// cpts[i] has one row per full parent instantiation, in canonical row
// order (see parent_row_index), each row holding arity(i) probabilities.
struct Network {
    Structure structure;
    std::vector<std::vector<std::vector<double>>> cpts;
};

// m complete cases over n variables, value-indexed.
struct Database {
    std::vector<Variable> variables;
    std::vector<std::vector<int>> cases;

    int num_variables() const { return static_cast<int>(variables.size()); }
    int num_cases() const { return static_cast<int>(cases.size()); }
};

// A permutation of variable indices; order[pos] is the variable at
// position pos.
struct Ordering {
    std::vector<int> order;

    int size() const { return static_cast<int>(order.size()); }
    bool is_permutation_of(int n) const;

    // position_of[i] = position of variable i in the ordering.
    std::vector<int> positions() const;

    // Variable indices strictly preceding i in the ordering.
    std::vector<int> predecessors(int i) const;
};

// Canonical parent-instantiation row layout: with parents p_1 < ... < p_s,
// the row index of instantiation (w_1, ..., w_s) is
// sum_k w_k * prod_{l>k} r_{p_l}; the last parent varies fastest.
int parent_row_count(const Structure& s, int node);
int parent_row_index(std::span<const int> parent_values, std::span<const int> parent_arities);
std::vector<int> parent_row_decode(int row, std::span<const int> parent_arities);

// A validation outcome; violations are data, not failures.
struct ValidationReport {
    std::vector<std::string> violations;

    bool ok() const { return violations.empty(); }
};

// Reports every violated Structure/Network invariant: acyclicity, parent
// index hygiene, CPT shape, row sums within 1e-9, nonnegative entries.
ValidationReport validate_network(const Network& net);
ValidationReport validate_structure(const Structure& s);

// Sanity check for a value-indexed database: every case assigns exactly
// one in-range value to every variable. Throws IncompleteDatabaseError.
void check_database(const Database& db);

// Deterministic topological order: among ready nodes, the lowest declared
// index is emitted first. Throws CyclicStructureError.
Ordering topological_order(const Structure& s);

// A partial assignment: (variable index, value index) pairs.
using PartialAssignment = std::vector<std::pair<int, int>>;

// P(X_1 = a_1, ..., X_n = a_n) as the product of CPT entries. The
// assignment must give an in-range value index for every variable;
// a value of -1 marks a variable as unassigned and raises
// IncompleteAssignmentError.
double joint_probability(const Network& net, std::span<const int> assignment);

// P(Z | Y) by exact enumeration over all full assignments. Refuses
// networks with more than kEnumerationGuard variables.
inline constexpr int kEnumerationGuard = 20;
double query(const Network& net, const PartialAssignment& targets,
             const PartialAssignment& evidence);

}  // namespace bnkit
