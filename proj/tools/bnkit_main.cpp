// bnkit: score, learn, and simulate discrete belief networks from case
// databases.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bnkit/io.hpp"
#include "bnkit/model.hpp"
#include "bnkit/scoring.hpp"
#include "bnkit/search.hpp"
#include "bnkit/simulate.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;       // unreadable or malformed input
constexpr int kExitValidation = 3;  // well-formed input that violates a semantic rule
constexpr int kExitGuard = 4;       // resource guard tripped

struct CliError : std::runtime_error {
    CliError(std::string message, int code) : std::runtime_error(std::move(message)), code(code) {}
    int code;
};

bnkit::PriorMode prior_from_name(const std::string& name, int n) {
    if (name == "none") return bnkit::PriorMode::none();
    if (name == "all-dags") return bnkit::PriorMode::uniform_all_dags(n);
    if (name == "ordered") return bnkit::PriorMode::uniform_ordered(n);
    throw CliError("unknown prior '" + name + "' (use none, all-dags, or ordered)", kExitInput);
}

void require_valid_network(const bnkit::Network& net) {
    const auto report = bnkit::validate_network(net);
    if (!report.ok()) {
        std::string msg = "invalid network:";
        for (const auto& v : report.violations) msg += "\n  " + v;
        throw CliError(msg, kExitValidation);
    }
}

void require_valid_structure(const bnkit::Structure& s) {
    const auto report = bnkit::validate_structure(s);
    if (!report.ok()) {
        std::string msg = "invalid structure:";
        for (const auto& v : report.violations) msg += "\n  " + v;
        throw CliError(msg, kExitValidation);
    }
}

std::vector<std::string> split_list(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream ss(text);
    while (std::getline(ss, item, sep)) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

bnkit::Ordering ordering_from_names(const std::string& csv, const std::vector<bnkit::Variable>& vars) {
    const auto names = split_list(csv, ',');
    if (names.size() != vars.size()) {
        throw CliError("--ordering must list all " + std::to_string(vars.size()) +
                       " variables exactly once",
                       kExitInput);
    }
    bnkit::Ordering ordering;
    std::vector<bool> seen(vars.size(), false);
    for (const auto& name : names) {
        int idx = -1;
        for (size_t i = 0; i < vars.size(); ++i) {
            if (vars[i].name == name) idx = static_cast<int>(i);
        }
        if (idx < 0) throw CliError("--ordering names unknown variable '" + name + "'", kExitInput);
        if (seen[idx]) throw CliError("--ordering repeats variable '" + name + "'", kExitInput);
        seen[idx] = true;
        ordering.order.push_back(idx);
    }
    return ordering;
}

bnkit::PartialAssignment assignments_from_flags(const std::vector<std::string>& flags,
                                                const bnkit::Structure& s) {
    bnkit::PartialAssignment out;
    for (const auto& flag : flags) {
        for (const auto& item : split_list(flag, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw CliError("expected VARIABLE=VALUE, got '" + item + "'", kExitInput);
            }
            const std::string var = item.substr(0, eq);
            const std::string val = item.substr(eq + 1);
            const auto vi = s.variable_index(var);
            if (!vi) throw CliError("unknown variable '" + var + "'", kExitInput);
            const auto ki = s.variables[*vi].value_index(val);
            if (!ki) {
                throw CliError("'" + val + "' is not a value of variable '" + var + "'", kExitInput);
            }
            out.emplace_back(*vi, *ki);
        }
    }
    return out;
}

std::string describe_assignment(const bnkit::PartialAssignment& a, const bnkit::Structure& s) {
    std::string out;
    for (size_t i = 0; i < a.size(); ++i) {
        if (i > 0) out += ", ";
        out += s.variables[a[i].first].name + "=" + s.variables[a[i].first].values[a[i].second];
    }
    return out;
}

std::string describe_arcs(const bnkit::Structure& s) {
    const auto arcs = s.arcs();
    if (arcs.empty()) return "(no arcs)";
    std::string out;
    for (size_t k = 0; k < arcs.size(); ++k) {
        if (k > 0) out += ' ';
        out += s.variables[arcs[k].first].name + "->" + s.variables[arcs[k].second].name;
    }
    return out;
}

void print_score(std::ostream& out, const bnkit::LogScore& score) {
    out << "log10 score: " << bnkit::format_double(score.log10_value()) << '\n';
    out << "ln score: " << bnkit::format_double(score.log_value) << '\n';
    const double linear = score.linear_value();
    if (linear >= 1e-300) {
        out << "score: " << bnkit::format_double(linear) << '\n';
    }
}

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("BNKIT_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw CliError("cannot open '" + path + "' for writing", kExitInput);
    return out;
}

// --- subcommand implementations -------------------------------------------

int run_score(const std::string& structure_path, const std::string& cases_path,
              const std::string& prior_name) {
    const bnkit::Structure s = bnkit::read_structure_file(structure_path);
    require_valid_structure(s);
    const bnkit::Database db = bnkit::read_cases_file(cases_path, s.variables);
    const auto prior = prior_from_name(prior_name, s.num_nodes());
    print_score(std::cout, bnkit::structure_log_score(s, db, prior));
    return kExitOk;
}

int run_learn(const std::string& cases_path, const std::string& ordering_csv, int max_parents,
              const std::string& prior_name, const std::string& dot_path, bool trace,
              int threads) {
    const bnkit::Database db = bnkit::read_cases_file(cases_path);
    const int n = db.num_variables();
    if (max_parents == bnkit::SearchConfig::kNoParentBound && n > 15) {
        throw CliError("--max-parents is required for more than 15 variables", kExitInput);
    }
    if (max_parents != bnkit::SearchConfig::kNoParentBound &&
        (max_parents < 1 || max_parents > n - 1)) {
        throw CliError("--max-parents must be between 1 and " + std::to_string(n - 1), kExitInput);
    }

    bnkit::SearchConfig cfg;
    cfg.ordering = ordering_from_names(ordering_csv, db.variables);
    cfg.max_parents = max_parents;
    cfg.prior = prior_from_name(prior_name, n);
    cfg.threads = resolve_threads(threads);

    const bnkit::SearchResult result = bnkit::k2(db, cfg);

    for (int i = 0; i < n; ++i) {
        std::cout << "node " << db.variables[i].name << ": parents {";
        const auto& ps = result.structure.parents[i];
        for (size_t k = 0; k < ps.size(); ++k) {
            if (k > 0) std::cout << ' ';
            std::cout << db.variables[ps[k]].name;
        }
        std::cout << "}\n";
    }
    print_score(std::cout, result.total);

    if (trace) {
        for (const auto& node_trace : result.trace) {
            for (const auto& step : node_trace.steps) {
                std::cout << "trace " << db.variables[node_trace.node].name << ": {";
                for (size_t k = 0; k < step.parents_tried.size(); ++k) {
                    if (k > 0) std::cout << ' ';
                    std::cout << db.variables[step.parents_tried[k]].name;
                }
                std::cout << "} ln g = " << bnkit::format_double(step.log_g)
                          << (step.accepted ? " accepted" : "") << '\n';
            }
        }
    }
    if (!dot_path.empty()) {
        auto out = open_out(dot_path);
        out << bnkit::to_dot(result.structure);
    }
    return kExitOk;
}

int run_posteriors(const std::string& cases_path, bool all_dags,
                   const std::vector<std::string>& structure_paths,
                   const std::string& prior_name) {
    if (all_dags == !structure_paths.empty()) {
        throw CliError("choose exactly one of --all-dags or --structures", kExitInput);
    }

    bnkit::Database db;
    std::vector<bnkit::Structure> structures;
    std::vector<std::string> names;

    if (all_dags) {
        db = bnkit::read_cases_file(cases_path);
        bnkit::enumerate_all_dags(db.num_variables(), [&](const std::vector<std::vector<int>>& parents) {
            structures.push_back(bnkit::Structure{db.variables, parents});
        });
        names.assign(structures.size(), "");
    } else {
        for (const auto& path : structure_paths) {
            structures.push_back(bnkit::read_structure_file(path));
            require_valid_structure(structures.back());
            names.push_back(path);
        }
        db = bnkit::read_cases_file(cases_path, structures.front().variables);
    }

    const auto prior = prior_from_name(prior_name, db.num_variables());
    const std::vector<double> posteriors = bnkit::normalized_posteriors(structures, db, prior);

    std::vector<size_t> order(posteriors.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](size_t a, size_t b) { return posteriors[a] > posteriors[b]; });
    for (size_t idx : order) {
        std::cout << bnkit::format_double(posteriors[idx]) << ' ';
        if (!names[idx].empty()) std::cout << names[idx] << ": ";
        std::cout << describe_arcs(structures[idx]) << '\n';
    }
    return kExitOk;
}

int run_sample(const std::string& network_path, int m, std::uint64_t seed, bool seed_given,
               const std::string& out_path) {
    if (!seed_given) throw CliError("--seed is required", kExitInput);
    if (m < 1) throw CliError("--m must be at least 1", kExitInput);
    const bnkit::Network net = bnkit::read_network_file(network_path);
    require_valid_network(net);
    const bnkit::Database db = bnkit::sample_cases(net, m, seed);
    if (out_path.empty()) {
        bnkit::write_cases(std::cout, db);
    } else {
        bnkit::write_cases_file(out_path, db);
    }
    return kExitOk;
}

int run_fit(const std::string& structure_path, const std::string& cases_path,
            const std::string& out_path) {
    const bnkit::Structure s = bnkit::read_structure_file(structure_path);
    require_valid_structure(s);
    const bnkit::Database db = bnkit::read_cases_file(cases_path, s.variables);
    const bnkit::Network net = bnkit::fit_parameters(s, db);
    if (out_path.empty()) {
        bnkit::write_network(std::cout, net);
    } else {
        bnkit::write_network_file(out_path, net);
    }
    return kExitOk;
}

int run_infer(const std::string& network_path, const std::vector<std::string>& target_flags,
              const std::vector<std::string>& given_flags) {
    const bnkit::Network net = bnkit::read_network_file(network_path);
    require_valid_network(net);
    const auto targets = assignments_from_flags(target_flags, net.structure);
    const auto evidence = assignments_from_flags(given_flags, net.structure);
    if (targets.empty()) throw CliError("--target is required", kExitInput);

    const double p = bnkit::query(net, targets, evidence);
    std::cout << "P(" << describe_assignment(targets, net.structure);
    if (!evidence.empty()) std::cout << " | " << describe_assignment(evidence, net.structure);
    std::cout << ") = " << bnkit::format_double(p) << '\n';
    return kExitOk;
}

int run_compare(const std::string& path1, const std::string& path2, const std::string& cases_path) {
    const bnkit::Structure s1 = bnkit::read_structure_file(path1);
    const bnkit::Structure s2 = bnkit::read_structure_file(path2);
    require_valid_structure(s1);
    require_valid_structure(s2);
    const bnkit::Database db = bnkit::read_cases_file(cases_path, s1.variables);
    const bnkit::Comparison c = bnkit::compare(s1, s2, db);
    std::cout << "ln ratio: " << bnkit::format_double(c.log_ratio) << '\n';
    std::cout << "ratio: " << bnkit::format_double(c.ratio) << '\n';
    return kExitOk;
}

int run_count(int n, const std::string& mode) {
    if (mode == "dags") {
        std::cout << bnkit::count_dags(n) << '\n';
    } else if (mode == "ordered") {
        std::cout << bnkit::count_ordered(n) << '\n';
    } else {
        throw CliError("count mode must be 'dags' or 'ordered'", kExitInput);
    }
    return kExitOk;
}

int dispatch(CLI::App& app, int argc, char** argv) {
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "bnkit: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete belief networks: scoring, structure search, sampling, and inference"};
    app.require_subcommand(1);

    // score
    std::string score_structure, score_cases, score_prior = "none";
    auto* score = app.add_subcommand("score", "Score a structure against a case file");
    score->add_option("structure", score_structure, "network or structure file")->required();
    score->add_option("cases", score_cases, "case file")->required();
    score->add_option("--prior", score_prior, "structure prior: none|all-dags|ordered");

    // learn
    std::string learn_cases, learn_ordering, learn_prior = "none", learn_dot;
    int learn_u = bnkit::SearchConfig::kNoParentBound;
    int learn_threads = 0;
    bool learn_trace = false;
    auto* learn = app.add_subcommand("learn", "Greedy structure search over a node ordering");
    learn->add_option("cases", learn_cases, "case file")->required();
    learn->add_option("--ordering", learn_ordering, "comma-separated variable names")->required();
    learn->add_option("--max-parents", learn_u, "parent-count bound per node");
    learn->add_option("--prior", learn_prior, "structure prior: none|all-dags|ordered");
    learn->add_option("--dot", learn_dot, "write the learned structure as a DOT digraph");
    learn->add_flag("--trace", learn_trace, "print every candidate parent set tried");
    learn->add_option("--threads", learn_threads,
                      "worker threads for candidate scoring (default 1; env BNKIT_THREADS)");

    // posteriors
    std::string post_cases, post_prior = "none";
    bool post_all = false;
    std::vector<std::string> post_structures;
    auto* post = app.add_subcommand("posteriors", "Normalized posterior probabilities of structures");
    post->add_option("cases", post_cases, "case file")->required();
    post->add_flag("--all-dags", post_all, "enumerate every DAG over the case variables");
    post->add_option("--structures", post_structures, "structure files to compare")
        ->expected(-1);
    post->add_option("--prior", post_prior, "structure prior: none|all-dags|ordered");

    // sample
    std::string sample_network, sample_out;
    int sample_m = 0;
    std::uint64_t sample_seed = 0;
    auto* sample = app.add_subcommand("sample", "Forward-sample cases from a network");
    sample->add_option("network", sample_network, "network file")->required();
    sample->add_option("--m", sample_m, "number of cases")->required();
    auto* seed_opt = sample->add_option("--seed", sample_seed, "64-bit RNG seed");
    sample->add_option("--out", sample_out, "output case file (default stdout)");

    // fit
    std::string fit_structure, fit_cases, fit_out;
    auto* fit = app.add_subcommand("fit", "Fit CPTs for a structure from a case file");
    fit->add_option("structure", fit_structure, "network or structure file")->required();
    fit->add_option("cases", fit_cases, "case file")->required();
    fit->add_option("--out", fit_out, "output network file (default stdout)");

    // infer
    std::string infer_network;
    std::vector<std::string> infer_targets, infer_givens;
    auto* infer = app.add_subcommand("infer", "Exact conditional probability by enumeration");
    infer->add_option("network", infer_network, "network file")->required();
    infer->add_option("--target", infer_targets, "target assignment VARIABLE=VALUE")->expected(-1);
    infer->add_option("--given", infer_givens, "evidence assignment VARIABLE=VALUE")->expected(-1);

    // compare
    std::string cmp_s1, cmp_s2, cmp_cases;
    auto* cmp = app.add_subcommand("compare", "Joint-probability ratio of two structures");
    cmp->add_option("structure1", cmp_s1, "first structure file")->required();
    cmp->add_option("structure2", cmp_s2, "second structure file")->required();
    cmp->add_option("cases", cmp_cases, "case file")->required();

    // count
    int count_n = 0;
    std::string count_mode;
    auto* count = app.add_subcommand("count", "Count structures on n nodes");
    count->add_option("n", count_n, "number of nodes")->required();
    count->add_option("mode", count_mode, "dags|ordered")->required();

    const int parse_rc = dispatch(app, argc, argv);
    if (parse_rc != kExitOk || app.get_subcommands().empty()) return parse_rc;

    try {
        if (score->parsed()) return run_score(score_structure, score_cases, score_prior);
        if (learn->parsed()) {
            return run_learn(learn_cases, learn_ordering, learn_u, learn_prior, learn_dot,
                             learn_trace, learn_threads);
        }
        if (post->parsed()) return run_posteriors(post_cases, post_all, post_structures, post_prior);
        if (sample->parsed()) {
            return run_sample(sample_network, sample_m, sample_seed, seed_opt->count() > 0,
                              sample_out);
        }
        if (fit->parsed()) return run_fit(fit_structure, fit_cases, fit_out);
        if (infer->parsed()) return run_infer(infer_network, infer_targets, infer_givens);
        if (cmp->parsed()) return run_compare(cmp_s1, cmp_s2, cmp_cases);
        if (count->parsed()) return run_count(count_n, count_mode);
    } catch (const CliError& e) {
        std::cerr << "bnkit: " << e.what() << '\n';
        return e.code;
    } catch (const bnkit::ParseError& e) {
        std::cerr << "bnkit: " << e.what() << '\n';
        return kExitInput;
    } catch (const bnkit::TooManyVariablesError& e) {
        std::cerr << "bnkit: " << e.what() << '\n';
        return kExitGuard;
    } catch (const bnkit::Error& e) {
        std::cerr << "bnkit: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "bnkit: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
