#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "bnkit/model.hpp"

namespace bnkit {

// Shortest decimal text that round-trips the exact double value.
std::string format_double(double value);

// --- Network files -------------------------------------------------------
//
// Versioned structured text. Canonical form, which write_network emits and
// round-trips byte-identically:
//
//   belief-network 1
//   variable x1 absent present
//   variable x2 absent present
//   arc x1 x2
//   cpt x1
//   0.4 0.6
//   cpt x2 | x1
//   0.2 0.8
//   0.7 0.3
//
// Variables appear in declared order; arcs are grouped by child with
// parents ascending; each cpt block has one row per parent instantiation
// in canonical row order (last parent varies fastest) with one
// probability per child value. Blank lines and '#' comment lines are
// accepted on input. A file may omit all cpt blocks, in which case it
// describes a bare structure.

// A parsed network file; cpts[i] is absent for structure-only files.
struct NetworkDocument {
    Structure structure;
    std::vector<std::optional<std::vector<std::vector<double>>>> cpts;

    bool has_all_cpts() const;
};

NetworkDocument read_network_document(std::istream& in);

// Requires every node to carry a CPT. Throws ParseError otherwise.
Network read_network(std::istream& in);
Network read_network_file(const std::string& path);

// Accepts both full network files and structure-only files.
Structure read_structure(std::istream& in);
Structure read_structure_file(const std::string& path);

void write_network(std::ostream& out, const Network& net);
void write_network_file(const std::string& path, const Network& net);
void write_structure(std::ostream& out, const Structure& s);
void write_structure_file(const std::string& path, const Structure& s);

// --- Case files -----------------------------------------------------------
//
// Comma-delimited text: a header row of variable names, then one row of
// value labels per case. Every cell must be nonempty (cases are
// complete).

// Standalone read: variables come from the header, and each variable's
// value list is the distinct labels seen in its column, sorted
// lexicographically.
Database read_cases(std::istream& in);
Database read_cases_file(const std::string& path);

// Read against known variables: columns may appear in any order but must
// cover exactly the given names, and every label must be in the
// variable's value list. The resulting Database uses `expected`'s
// variable order.
Database read_cases(std::istream& in, const std::vector<Variable>& expected);
Database read_cases_file(const std::string& path, const std::vector<Variable>& expected);

void write_cases(std::ostream& out, const Database& db);
void write_cases_file(const std::string& path, const Database& db);

// --- DOT export -----------------------------------------------------------

// Graphviz digraph with one node statement per variable and one edge per
// arc.
std::string to_dot(const Structure& s);

}  // namespace bnkit
