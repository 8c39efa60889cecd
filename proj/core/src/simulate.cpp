#include "bnkit/simulate.hpp"

#include <algorithm>
#include <chrono>
#include <unordered_map>

#include "bnkit/scoring.hpp"

namespace bnkit {

Database sample_cases(const Network& net, int m, std::uint64_t seed) {
    if (m < 1) throw Error("sample_cases needs m >= 1");
    const ValidationReport report = validate_network(net);
    if (!report.ok()) {
        throw InvalidNetworkError("cannot sample from an invalid network: " +
                                  report.violations.front());
    }

    const Structure& s = net.structure;
    const int n = s.num_nodes();
    const Ordering topo = topological_order(s);

    Database db;
    db.variables = s.variables;
    db.cases.assign(static_cast<size_t>(m), std::vector<int>(n, 0));

    RandomStream stream(seed);
    std::vector<int> pv, pa;
    for (int j = 0; j < m; ++j) {
        std::vector<int>& row = db.cases[static_cast<size_t>(j)];
        for (int node : topo.order) {
            pv.clear();
            pa.clear();
            for (int p : s.parents[node]) {
                pv.push_back(row[p]);
                pa.push_back(s.variables[p].arity());
            }
            const std::vector<double>& cpt_row = net.cpts[node][parent_row_index(pv, pa)];
            const double draw = stream.next_uniform();
            double cumulative = 0.0;
            int value = s.variables[node].arity() - 1;  // fallback if rounding leaves a gap
            for (int k = 0; k < s.variables[node].arity(); ++k) {
                cumulative += cpt_row[k];
                if (cumulative >= draw) {
                    value = k;
                    break;
                }
            }
            row[node] = value;
        }
    }
    return db;
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

Network fit_parameters(const Structure& s, const Database& db) {
    if (!same_variables(s.variables, db.variables)) {
        throw VariableMismatchError("structure and database variables differ");
    }
    if (db.num_cases() < 1) throw Error("fit_parameters needs at least one case");
    check_database(db);

    const int n = s.num_nodes();
    Network net;
    net.structure = s;
    net.cpts.resize(n);

    std::vector<int> pa;
    for (int i = 0; i < n; ++i) {
        const int r = s.variables[i].arity();
        const int rows = parent_row_count(s, i);
        pa.clear();
        for (int p : s.parents[i]) pa.push_back(s.variables[p].arity());

        // Counts per canonical row; rows never observed stay at zero and
        // fit to the uniform distribution.
        std::vector<std::vector<std::int64_t>> alpha(rows, std::vector<std::int64_t>(r, 0));
        std::vector<int> pv(s.parents[i].size());
        for (const auto& c : db.cases) {
            for (size_t k = 0; k < s.parents[i].size(); ++k) pv[k] = c[s.parents[i][k]];
            ++alpha[parent_row_index(pv, pa)][c[i]];
        }

        net.cpts[i].assign(rows, std::vector<double>(r, 0.0));
        for (int j = 0; j < rows; ++j) {
            std::int64_t total = 0;
            for (std::int64_t a : alpha[j]) total += a;
            for (int k = 0; k < r; ++k) {
                net.cpts[i][j][k] =
                    static_cast<double>(alpha[j][k] + 1) / static_cast<double>(total + r);
            }
        }
    }
    return net;
}

ArcDiff structural_diff(const Structure& reference, const Structure& learned) {
    if (!same_variables(reference.variables, learned.variables)) {
        throw VariableMismatchError("structures are over different variables");
    }
    ArcDiff diff;
    for (const auto& [p, c] : reference.arcs()) {
        if (learned.has_arc(p, c)) continue;
        if (learned.has_arc(c, p)) {
            ++diff.reversed;
        } else {
            ++diff.missing;
        }
    }
    for (const auto& [p, c] : learned.arcs()) {
        if (!reference.has_arc(p, c) && !reference.has_arc(c, p)) ++diff.extra;
    }
    return diff;
}

std::vector<ReconstructionRow> reconstruction_experiment(const Network& reference,
                                                         const std::vector<int>& m_schedule,
                                                         std::uint64_t seed,
                                                         const SearchConfig& cfg) {
    if (m_schedule.empty()) throw Error("reconstruction_experiment needs a nonempty schedule");
    const int n = reference.structure.num_nodes();
    if (!cfg.ordering.is_permutation_of(n)) {
        throw VariableMismatchError("ordering is not a permutation of the network's variables");
    }
    const std::vector<int> position = cfg.ordering.positions();
    for (const auto& [p, c] : reference.structure.arcs()) {
        if (position[p] >= position[c]) {
            throw Error("ordering is not consistent with the reference network's arcs");
        }
    }

    const int m_max = *std::max_element(m_schedule.begin(), m_schedule.end());
    const Database full = sample_cases(reference, m_max, seed);

    std::vector<ReconstructionRow> rows;
    rows.reserve(m_schedule.size());
    for (int m : m_schedule) {
        Database prefix;
        prefix.variables = full.variables;
        prefix.cases.assign(full.cases.begin(), full.cases.begin() + m);

        const auto start = std::chrono::steady_clock::now();
        SearchResult learned = k2(prefix, cfg);
        const auto stop = std::chrono::steady_clock::now();

        ReconstructionRow row;
        row.num_cases = m;
        row.diff = structural_diff(reference.structure, learned.structure);
        row.seconds = std::chrono::duration<double>(stop - start).count();
        row.learned = std::move(learned.structure);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace bnkit
