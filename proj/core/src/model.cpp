#include "bnkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <sstream>

namespace bnkit {

bool same_variables(const std::vector<Variable>& a, const std::vector<Variable>& b) {
    if (a.size() != b.size()) return false;
    for (size_t i = 0; i < a.size(); ++i) {
        if (a[i].name != b[i].name || a[i].values != b[i].values) return false;
    }
    return true;
}

bool Structure::has_arc(int parent, int child) const {
    if (child < 0 || child >= num_nodes()) return false;
    const auto& ps = parents[child];
    return std::binary_search(ps.begin(), ps.end(), parent);
}

std::vector<std::pair<int, int>> Structure::arcs() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 0; i < num_nodes(); ++i) {
        for (int p : parents[i]) out.emplace_back(p, i);
    }
    return out;
}

bool Ordering::is_permutation_of(int n) const {
    if (size() != n) return false;
    std::vector<bool> seen(n, false);
    for (int v : order) {
        if (v < 0 || v >= n || seen[v]) return false;
        seen[v] = true;
    }
    return true;
}

std::vector<int> Ordering::positions() const {
    std::vector<int> pos(order.size());
    for (int p = 0; p < size(); ++p) pos[order[p]] = p;
    return pos;
}

std::vector<int> Ordering::predecessors(int i) const {
    std::vector<int> pred;
    for (int v : order) {
        if (v == i) break;
        pred.push_back(v);
    }
    return pred;
}

int parent_row_count(const Structure& s, int node) {
    int rows = 1;
    for (int p : s.parents[node]) rows *= s.variables[p].arity();
    return rows;
}

int parent_row_index(std::span<const int> parent_values, std::span<const int> parent_arities) {
    int row = 0;
    for (size_t k = 0; k < parent_values.size(); ++k) {
        row = row * parent_arities[k] + parent_values[k];
    }
    return row;
}

std::vector<int> parent_row_decode(int row, std::span<const int> parent_arities) {
    std::vector<int> values(parent_arities.size());
    for (int k = static_cast<int>(parent_arities.size()) - 1; k >= 0; --k) {
        values[k] = row % parent_arities[k];
        row /= parent_arities[k];
    }
    return values;
}

namespace {

// Kahn's algorithm; returns nullopt if a cycle remains. Ready nodes are
// emitted lowest-index-first.
std::optional<std::vector<int>> try_topological_order(const Structure& s) {
    const int n = s.num_nodes();
    std::vector<int> indegree(n, 0);
    std::vector<std::vector<int>> children(n);
    for (int i = 0; i < n; ++i) {
        for (int p : s.parents[i]) {
            if (p < 0 || p >= n || p == i) return std::nullopt;
            children[p].push_back(i);
            ++indegree[i];
        }
    }
    std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
    for (int i = 0; i < n; ++i) {
        if (indegree[i] == 0) ready.push(i);
    }
    std::vector<int> order;
    order.reserve(n);
    while (!ready.empty()) {
        int u = ready.top();
        ready.pop();
        order.push_back(u);
        for (int c : children[u]) {
            if (--indegree[c] == 0) ready.push(c);
        }
    }
    if (static_cast<int>(order.size()) != n) return std::nullopt;
    return order;
}

}  // namespace

ValidationReport validate_structure(const Structure& s) {
    ValidationReport report;
    const int n = s.num_nodes();
    std::ostringstream msg;

    for (int i = 0; i < n; ++i) {
        const Variable& v = s.variables[i];
        if (v.name.empty()) {
            report.violations.push_back("variable " + std::to_string(i) + " has an empty name");
        }
        if (v.arity() < 2) {
            report.violations.push_back("variable '" + v.name + "' has fewer than 2 values");
        }
        for (int a = 0; a < v.arity(); ++a) {
            for (int b = a + 1; b < v.arity(); ++b) {
                if (v.values[a] == v.values[b]) {
                    report.violations.push_back("variable '" + v.name + "' repeats value label '" +
                                                v.values[a] + "'");
                }
            }
        }
        for (int j = i + 1; j < n; ++j) {
            if (s.variables[j].name == v.name) {
                report.violations.push_back("duplicate variable name '" + v.name + "'");
            }
        }
    }

    if (static_cast<int>(s.parents.size()) != n) {
        report.violations.push_back("parent-set list length does not match variable count");
        return report;
    }
    for (int i = 0; i < n; ++i) {
        const auto& ps = s.parents[i];
        for (size_t k = 0; k < ps.size(); ++k) {
            if (ps[k] < 0 || ps[k] >= n) {
                report.violations.push_back("node '" + s.variables[i].name +
                                            "' has an out-of-range parent index");
            } else if (ps[k] == i) {
                report.violations.push_back("node '" + s.variables[i].name + "' is its own parent");
            }
            if (k + 1 < ps.size() && ps[k] == ps[k + 1]) {
                report.violations.push_back("node '" + s.variables[i].name +
                                            "' repeats a parent index");
            }
        }
        if (!std::is_sorted(ps.begin(), ps.end())) {
            report.violations.push_back("node '" + s.variables[i].name +
                                        "' has an unsorted parent list");
        }
    }
    if (report.ok() && !try_topological_order(s)) {
        report.violations.push_back("cycle: the arc set admits no topological order");
    }
    return report;
}

ValidationReport validate_network(const Network& net) {
    ValidationReport report = validate_structure(net.structure);
    const Structure& s = net.structure;
    const int n = s.num_nodes();

    if (static_cast<int>(net.cpts.size()) != n) {
        report.violations.push_back("CPT list length does not match variable count");
        return report;
    }
    if (!report.ok()) return report;  // row shapes are meaningless on a broken structure

    for (int i = 0; i < n; ++i) {
        const auto& cpt = net.cpts[i];
        const int rows = parent_row_count(s, i);
        const int r = s.variables[i].arity();
        if (static_cast<int>(cpt.size()) != rows) {
            report.violations.push_back("CPT for '" + s.variables[i].name + "' has " +
                                        std::to_string(cpt.size()) + " rows, expected " +
                                        std::to_string(rows));
            continue;
        }
        for (int j = 0; j < rows; ++j) {
            if (static_cast<int>(cpt[j].size()) != r) {
                report.violations.push_back("CPT row " + std::to_string(j) + " for '" +
                                            s.variables[i].name + "' has wrong width");
                continue;
            }
            double sum = 0.0;
            bool negative = false;
            for (double p : cpt[j]) {
                sum += p;
                if (!(p >= 0.0)) negative = true;
            }
            if (negative) {
                report.violations.push_back("CPT row " + std::to_string(j) + " for '" +
                                            s.variables[i].name + "' has a negative entry");
            }
            if (!(std::abs(sum - 1.0) <= 1e-9)) {
                std::ostringstream m;
                m << "CPT row " << j << " for '" << s.variables[i].name << "' sums to " << sum
                  << ", row sum != 1";
                report.violations.push_back(m.str());
            }
        }
    }
    return report;
}

void check_database(const Database& db) {
    const int n = db.num_variables();
    for (size_t j = 0; j < db.cases.size(); ++j) {
        if (static_cast<int>(db.cases[j].size()) != n) {
            throw IncompleteDatabaseError("case " + std::to_string(j + 1) +
                                          " does not assign every variable");
        }
        for (int i = 0; i < n; ++i) {
            const int v = db.cases[j][i];
            if (v < 0 || v >= db.variables[i].arity()) {
                throw IncompleteDatabaseError("case " + std::to_string(j + 1) +
                                              " has an out-of-range value for variable '" +
                                              db.variables[i].name + "'");
            }
        }
    }
}

Ordering topological_order(const Structure& s) {
    auto order = try_topological_order(s);
    if (!order) throw CyclicStructureError("structure has no topological order (cycle)");
    return Ordering{std::move(*order)};
}

double joint_probability(const Network& net, std::span<const int> assignment) {
    const Structure& s = net.structure;
    const int n = s.num_nodes();
    if (static_cast<int>(assignment.size()) != n) {
        throw IncompleteAssignmentError("assignment does not cover every variable");
    }
    for (int i = 0; i < n; ++i) {
        if (assignment[i] < 0 || assignment[i] >= s.variables[i].arity()) {
            throw IncompleteAssignmentError("variable '" + s.variables[i].name +
                                            "' is unassigned or out of range");
        }
    }
    double p = 1.0;
    std::vector<int> pv, pa;
    for (int i = 0; i < n; ++i) {
        pv.clear();
        pa.clear();
        for (int par : s.parents[i]) {
            pv.push_back(assignment[par]);
            pa.push_back(s.variables[par].arity());
        }
        const int row = parent_row_index(pv, pa);
        p *= net.cpts[i][row][assignment[i]];
    }
    return p;
}

namespace {

bool matches(std::span<const int> assignment, const PartialAssignment& partial) {
    for (const auto& [var, val] : partial) {
        if (assignment[var] != val) return false;
    }
    return true;
}

}  // namespace

double query(const Network& net, const PartialAssignment& targets,
             const PartialAssignment& evidence) {
    const Structure& s = net.structure;
    const int n = s.num_nodes();
    if (targets.empty()) throw Error("query needs at least one target assignment");
    if (n > kEnumerationGuard) {
        throw TooManyVariablesError("enumeration guard: network has " + std::to_string(n) +
                                    " variables, limit is " + std::to_string(kEnumerationGuard));
    }
    for (const auto& partial : {targets, evidence}) {
        for (const auto& [var, val] : partial) {
            if (var < 0 || var >= n || val < 0 || val >= s.variables[var].arity()) {
                throw Error("query assignment references an unknown variable or value");
            }
        }
    }

    // One pass over all full assignments, in lexicographic order with the
    // last variable varying fastest.
    std::vector<int> assignment(n, 0);
    double numerator = 0.0;
    double denominator = 0.0;
    while (true) {
        if (matches(assignment, evidence)) {
            const double p = joint_probability(net, assignment);
            denominator += p;
            if (matches(assignment, targets)) numerator += p;
        }
        int i = n - 1;
        while (i >= 0 && assignment[i] + 1 == s.variables[i].arity()) {
            assignment[i] = 0;
            --i;
        }
        if (i < 0) break;
        ++assignment[i];
    }
    if (denominator == 0.0) {
        throw ZeroProbabilityEvidenceError("evidence has probability zero");
    }
    return numerator / denominator;
}

}  // namespace bnkit
