#include "bnkit/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace bnkit {

std::string format_double(double value) {
    char buffer[64];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
    return std::string(buffer, ptr);
}

namespace {

constexpr const char* kMagic = "belief-network";
constexpr int kFormatVersion = 1;

bool valid_token(const std::string& tok) {
    if (tok.empty()) return false;
    for (char c : tok) {
        if (c == ',' || c == '|' || c == '#' || c == '"' ||
            static_cast<unsigned char>(c) <= ' ') {
            return false;
        }
    }
    return true;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) tokens.push_back(tok);
    return tokens;
}

double parse_probability(const std::string& tok, int line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
        throw ParseError("not a number: '" + tok + "'", line_no);
    }
    return v;
}

// Reader that skips blank and comment lines and tracks line numbers.
class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    bool next(std::string& line) {
        while (std::getline(in_, line)) {
            ++line_no_;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            const auto first = line.find_first_not_of(" \t");
            if (first == std::string::npos) continue;
            if (line[first] == '#') continue;
            return true;
        }
        return false;
    }

    int line_no() const { return line_no_; }

private:
    std::istream& in_;
    int line_no_ = 0;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open '" + path + "' for reading");
    return in;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open '" + path + "' for writing");
    return out;
}

}  // namespace

bool NetworkDocument::has_all_cpts() const {
    return std::all_of(cpts.begin(), cpts.end(), [](const auto& c) { return c.has_value(); });
}

NetworkDocument read_network_document(std::istream& in) {
    LineReader reader(in);
    std::string line;

    if (!reader.next(line)) throw ParseError("empty network file");
    {
        const auto tokens = split_ws(line);
        if (tokens.size() != 2 || tokens[0] != kMagic) {
            throw ParseError("expected header '" + std::string(kMagic) + " <version>'",
                             reader.line_no());
        }
        if (tokens[1] != std::to_string(kFormatVersion)) {
            throw ParseError("unsupported format version '" + tokens[1] + "'", reader.line_no());
        }
    }

    NetworkDocument doc;
    std::vector<Variable>& vars = doc.structure.variables;
    std::map<std::string, int> var_index;
    std::vector<std::vector<int>> parents;

    bool pending = reader.next(line);
    // Variable section.
    while (pending) {
        const auto tokens = split_ws(line);
        if (tokens[0] != "variable") break;
        if (tokens.size() < 4) {
            throw ParseError("variable needs a name and at least 2 value labels",
                             reader.line_no());
        }
        const std::string& name = tokens[1];
        if (!valid_token(name)) throw ParseError("bad variable name '" + name + "'",
                                                 reader.line_no());
        if (var_index.count(name)) {
            throw ParseError("duplicate variable '" + name + "'", reader.line_no());
        }
        Variable v;
        v.name = name;
        for (size_t k = 2; k < tokens.size(); ++k) {
            if (!valid_token(tokens[k])) {
                throw ParseError("bad value label '" + tokens[k] + "'", reader.line_no());
            }
            if (std::find(v.values.begin(), v.values.end(), tokens[k]) != v.values.end()) {
                throw ParseError("variable '" + name + "' repeats label '" + tokens[k] + "'",
                                 reader.line_no());
            }
            v.values.push_back(tokens[k]);
        }
        var_index[name] = static_cast<int>(vars.size());
        vars.push_back(std::move(v));
        pending = reader.next(line);
    }
    if (vars.empty()) throw ParseError("network file declares no variables");
    parents.assign(vars.size(), {});

    auto lookup = [&](const std::string& name, int line_no) {
        auto it = var_index.find(name);
        if (it == var_index.end()) {
            throw ParseError("unknown variable '" + name + "'", line_no);
        }
        return it->second;
    };

    // Arc section.
    while (pending) {
        const auto tokens = split_ws(line);
        if (tokens[0] != "arc") break;
        if (tokens.size() != 3) throw ParseError("arc needs 'arc PARENT CHILD'", reader.line_no());
        const int p = lookup(tokens[1], reader.line_no());
        const int c = lookup(tokens[2], reader.line_no());
        if (p == c) throw ParseError("arc from '" + tokens[1] + "' to itself", reader.line_no());
        auto& ps = parents[c];
        if (std::find(ps.begin(), ps.end(), p) != ps.end()) {
            throw ParseError("duplicate arc " + tokens[1] + " -> " + tokens[2], reader.line_no());
        }
        ps.push_back(p);
        pending = reader.next(line);
    }
    for (auto& ps : parents) std::sort(ps.begin(), ps.end());
    doc.structure.parents = parents;
    doc.cpts.assign(vars.size(), std::nullopt);

    // CPT section.
    while (pending) {
        auto tokens = split_ws(line);
        if (tokens[0] != "cpt") {
            throw ParseError("unexpected line '" + line + "'", reader.line_no());
        }
        if (tokens.size() < 2) throw ParseError("cpt needs a variable name", reader.line_no());
        const int node = lookup(tokens[1], reader.line_no());
        if (doc.cpts[node]) {
            throw ParseError("duplicate cpt for '" + tokens[1] + "'", reader.line_no());
        }
        // Optional '| parent...' must match the arc-declared parents in
        // ascending declared order.
        std::vector<int> declared;
        if (tokens.size() > 2) {
            if (tokens[2] != "|") throw ParseError("expected '|' after cpt name", reader.line_no());
            for (size_t k = 3; k < tokens.size(); ++k) {
                declared.push_back(lookup(tokens[k], reader.line_no()));
            }
        }
        if (declared != parents[node]) {
            throw ParseError("cpt parent list for '" + tokens[1] +
                             "' does not match the declared arcs (parents in ascending "
                             "declaration order)",
                             reader.line_no());
        }

        int rows = 1;
        for (int p : parents[node]) rows *= vars[p].arity();
        const int r = vars[node].arity();
        std::vector<std::vector<double>> cpt;
        cpt.reserve(rows);
        for (int j = 0; j < rows; ++j) {
            if (!reader.next(line)) {
                throw ParseError("cpt for '" + tokens[1] + "' is missing rows (expected " +
                                 std::to_string(rows) + ")",
                                 reader.line_no());
            }
            const auto cells = split_ws(line);
            if (static_cast<int>(cells.size()) != r) {
                throw ParseError("cpt row for '" + tokens[1] + "' needs " + std::to_string(r) +
                                 " probabilities",
                                 reader.line_no());
            }
            std::vector<double> row;
            row.reserve(r);
            for (const auto& cell : cells) row.push_back(parse_probability(cell, reader.line_no()));
            cpt.push_back(std::move(row));
        }
        doc.cpts[node] = std::move(cpt);
        pending = reader.next(line);
    }
    return doc;
}

Network read_network(std::istream& in) {
    NetworkDocument doc = read_network_document(in);
    Network net;
    net.structure = std::move(doc.structure);
    net.cpts.reserve(doc.cpts.size());
    for (size_t i = 0; i < doc.cpts.size(); ++i) {
        if (!doc.cpts[i]) {
            throw ParseError("missing cpt for '" + net.structure.variables[i].name + "'");
        }
        net.cpts.push_back(std::move(*doc.cpts[i]));
    }
    return net;
}

Network read_network_file(const std::string& path) {
    auto in = open_input(path);
    return read_network(in);
}

Structure read_structure(std::istream& in) {
    return read_network_document(in).structure;
}

Structure read_structure_file(const std::string& path) {
    auto in = open_input(path);
    return read_structure(in);
}

namespace {

void write_preamble(std::ostream& out, const Structure& s) {
    out << kMagic << ' ' << kFormatVersion << '\n';
    for (const Variable& v : s.variables) {
        out << "variable " << v.name;
        for (const std::string& label : v.values) out << ' ' << label;
        out << '\n';
    }
    for (int i = 0; i < s.num_nodes(); ++i) {
        for (int p : s.parents[i]) {
            out << "arc " << s.variables[p].name << ' ' << s.variables[i].name << '\n';
        }
    }
}

}  // namespace

void write_structure(std::ostream& out, const Structure& s) { write_preamble(out, s); }

void write_network(std::ostream& out, const Network& net) {
    const Structure& s = net.structure;
    write_preamble(out, s);
    for (int i = 0; i < s.num_nodes(); ++i) {
        out << "cpt " << s.variables[i].name;
        if (!s.parents[i].empty()) {
            out << " |";
            for (int p : s.parents[i]) out << ' ' << s.variables[p].name;
        }
        out << '\n';
        for (const auto& row : net.cpts[i]) {
            for (size_t k = 0; k < row.size(); ++k) {
                if (k > 0) out << ' ';
                out << format_double(row[k]);
            }
            out << '\n';
        }
    }
}

void write_network_file(const std::string& path, const Network& net) {
    auto out = open_output(path);
    write_network(out, net);
}

void write_structure_file(const std::string& path, const Structure& s) {
    auto out = open_output(path);
    write_structure(out, s);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t");
        const auto last = cell.find_last_not_of(" \t");
        cells.push_back(first == std::string::npos ? std::string()
                                                   : cell.substr(first, last - first + 1));
    }
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

struct RawCases {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

RawCases read_raw_cases(std::istream& in) {
    RawCases raw;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        auto cells = split_csv(line);
        for (const auto& cell : cells) {
            if (cell.empty()) {
                throw ParseError(
                    "incomplete case: empty cell (cases must assign a value to every variable)",
                    line_no);
            }
        }
        if (raw.header.empty()) {
            raw.header = std::move(cells);
            std::set<std::string> seen(raw.header.begin(), raw.header.end());
            if (seen.size() != raw.header.size()) {
                throw ParseError("case file header repeats a variable name", line_no);
            }
        } else {
            if (cells.size() != raw.header.size()) {
                throw ParseError("case row has " + std::to_string(cells.size()) +
                                 " cells, header has " + std::to_string(raw.header.size()),
                                 line_no);
            }
            raw.rows.push_back(std::move(cells));
        }
    }
    if (raw.header.empty()) throw ParseError("case file has no header row");
    return raw;
}

}  // namespace

Database read_cases(std::istream& in) {
    RawCases raw = read_raw_cases(in);
    const size_t n = raw.header.size();

    // Value lists are the distinct labels per column, lexicographic, so
    // indices do not depend on case order.
    std::vector<std::set<std::string>> labels(n);
    for (const auto& row : raw.rows) {
        for (size_t i = 0; i < n; ++i) labels[i].insert(row[i]);
    }

    Database db;
    db.variables.reserve(n);
    for (size_t i = 0; i < n; ++i) {
        if (labels[i].size() < 2) {
            throw ParseError("variable '" + raw.header[i] +
                             "' has fewer than 2 distinct values in the data; supply a network "
                             "file to declare its value list");
        }
        Variable v;
        v.name = raw.header[i];
        v.values.assign(labels[i].begin(), labels[i].end());
        db.variables.push_back(std::move(v));
    }
    db.cases.reserve(raw.rows.size());
    for (const auto& row : raw.rows) {
        std::vector<int> indexed(n);
        for (size_t i = 0; i < n; ++i) {
            indexed[i] = *db.variables[i].value_index(row[i]);
        }
        db.cases.push_back(std::move(indexed));
    }
    return db;
}

Database read_cases(std::istream& in, const std::vector<Variable>& expected) {
    RawCases raw = read_raw_cases(in);

    std::map<std::string, int> expected_index;
    for (size_t i = 0; i < expected.size(); ++i) expected_index[expected[i].name] = static_cast<int>(i);
    if (raw.header.size() != expected.size()) {
        throw ParseError("case file has " + std::to_string(raw.header.size()) +
                         " columns, expected " + std::to_string(expected.size()));
    }
    std::vector<int> column_to_var(raw.header.size());
    for (size_t col = 0; col < raw.header.size(); ++col) {
        auto it = expected_index.find(raw.header[col]);
        if (it == expected_index.end()) {
            throw ParseError("case file column '" + raw.header[col] +
                             "' is not a variable of the network");
        }
        column_to_var[col] = it->second;
    }

    Database db;
    db.variables = expected;
    db.cases.reserve(raw.rows.size());
    for (size_t rix = 0; rix < raw.rows.size(); ++rix) {
        std::vector<int> indexed(expected.size());
        for (size_t col = 0; col < raw.header.size(); ++col) {
            const int var = column_to_var[col];
            const auto idx = expected[var].value_index(raw.rows[rix][col]);
            if (!idx) {
                throw ParseError("case " + std::to_string(rix + 1) + ": label '" +
                                 raw.rows[rix][col] + "' is not a value of variable '" +
                                 expected[var].name + "'");
            }
            indexed[var] = *idx;
        }
        db.cases.push_back(std::move(indexed));
    }
    return db;
}

Database read_cases_file(const std::string& path) {
    auto in = open_input(path);
    return read_cases(in);
}

Database read_cases_file(const std::string& path, const std::vector<Variable>& expected) {
    auto in = open_input(path);
    return read_cases(in, expected);
}

void write_cases(std::ostream& out, const Database& db) {
    for (int i = 0; i < db.num_variables(); ++i) {
        if (i > 0) out << ',';
        out << db.variables[i].name;
    }
    out << '\n';
    for (const auto& row : db.cases) {
        for (int i = 0; i < db.num_variables(); ++i) {
            if (i > 0) out << ',';
            out << db.variables[i].values[row[i]];
        }
        out << '\n';
    }
}

void write_cases_file(const std::string& path, const Database& db) {
    auto out = open_output(path);
    write_cases(out, db);
}

std::string to_dot(const Structure& s) {
    std::ostringstream out;
    out << "digraph bn {\n";
    for (const Variable& v : s.variables) {
        out << "  \"" << v.name << "\";\n";
    }
    for (const auto& [p, c] : s.arcs()) {
        out << "  \"" << s.variables[p].name << "\" -> \"" << s.variables[c].name << "\";\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace bnkit
