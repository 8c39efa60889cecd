#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "bnkit/scoring.hpp"
#include "bnkit/simulate.hpp"
#include "support/fixtures.hpp"

using namespace bnkit;

namespace {

// Reference draw: inverse CDF on a row, first cumulative >= u.
int pick(const std::vector<double>& row, double u) {
    double cumulative = 0.0;
    for (size_t k = 0; k < row.size(); ++k) {
        cumulative += row[k];
        if (cumulative >= u) return static_cast<int>(k);
    }
    return static_cast<int>(row.size()) - 1;
}

std::vector<std::vector<int>> all_assignments(const Structure& s) {
    std::vector<std::vector<int>> out;
    std::vector<int> a(s.num_nodes(), 0);
    while (true) {
        out.push_back(a);
        int i = s.num_nodes() - 1;
        while (i >= 0 && a[i] + 1 == s.variables[i].arity()) {
            a[i] = 0;
            --i;
        }
        if (i < 0) break;
        ++a[i];
    }
    return out;
}

}  // namespace

TEST_CASE("splitmix64 matches the reference outputs") {
    RandomStream zero(0);
    CHECK(zero.next_bits() == 16294208416658607535ULL);
    CHECK(zero.next_bits() == 7960286522194355700ULL);
    CHECK(zero.next_bits() == 487617019471545679ULL);

    RandomStream other(1234567);
    CHECK(other.next_bits() == 6457827717110365317ULL);
    CHECK(other.next_bits() == 3203168211198807973ULL);
    CHECK(other.next_bits() == 9817491932198370423ULL);
}

TEST_CASE("uniform draws stay in [0, 1)") {
    RandomStream rng(8675309);
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.next_uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("sample_cases is deterministic in the seed") {
    const Network net = fixtures::b1();
    const Database a = sample_cases(net, 200, 7);
    const Database b = sample_cases(net, 200, 7);
    CHECK(a.cases == b.cases);
    const Database c = sample_cases(net, 200, 8);
    CHECK(a.cases != c.cases);
}

TEST_CASE("sampling streams are prefix-stable") {
    const Network net = fixtures::b1();
    const Database small = sample_cases(net, 100, 99);
    const Database large = sample_cases(net, 250, 99);
    for (int j = 0; j < 100; ++j) {
        CHECK(small.cases[j] == large.cases[j]);
    }
}

TEST_CASE("sampling consumes one draw per node in topological order") {
    const Network net = fixtures::b1();
    const Database db = sample_cases(net, 50, 42);

    RandomStream replay(42);
    for (int j = 0; j < 50; ++j) {
        const int x1 = pick(net.cpts[0][0], replay.next_uniform());
        const int x2 = pick(net.cpts[1][static_cast<size_t>(x1)], replay.next_uniform());
        const int x3 = pick(net.cpts[2][static_cast<size_t>(x2)], replay.next_uniform());
        CHECK(db.cases[j] == std::vector<int>{x1, x2, x3});
    }
}

TEST_CASE("a deterministic network yields identical cases") {
    Network net = fixtures::b1();
    net.cpts = {{{0.0, 1.0}}, {{1.0, 0.0}, {0.0, 1.0}}, {{1.0, 0.0}, {0.0, 1.0}}};
    const Database db = sample_cases(net, 40, 5);
    for (const auto& row : db.cases) {
        CHECK(row == std::vector<int>{1, 1, 1});
    }
}

TEST_CASE("sample_cases rejects invalid inputs") {
    Network broken = fixtures::b1();
    broken.cpts[0][0] = {0.5, 0.6};
    CHECK_THROWS_AS(sample_cases(broken, 10, 1), InvalidNetworkError);
    CHECK_THROWS_AS(sample_cases(fixtures::b1(), 0, 1), Error);
}

TEST_CASE("x1 sample frequency sits in the binomial band") {
    const Database db = sample_cases(fixtures::b1(), 10000, 20250808);
    int present = 0;
    for (const auto& row : db.cases) present += row[0];
    const double freq = static_cast<double>(present) / 10000.0;
    CHECK(freq >= 0.585);
    CHECK(freq <= 0.615);
}

TEST_CASE("empirical joint matches enumeration within 0.01 per cell") {
    auto check_net = [](const Network& net, std::uint64_t seed) {
        const int m = 50000;
        const Database db = sample_cases(net, m, seed);
        for (const auto& cell : all_assignments(net.structure)) {
            int count = 0;
            for (const auto& row : db.cases) {
                if (row == cell) ++count;
            }
            const double expected = joint_probability(net, cell);
            const double observed = static_cast<double>(count) / m;
            CHECK(std::abs(observed - expected) <= 0.01);
        }
    };

    check_net(fixtures::b1(), 4242);

    // A four-variable network fitted from random data.
    RandomStream rng(606);
    const Database random_db = fixtures::random_database(rng, {2, 3, 2, 2}, 200);
    const Structure s = fixtures::random_structure(rng, random_db.variables, 2);
    check_net(fit_parameters(s, random_db), 4243);
}

TEST_CASE("fit_parameters reproduces the worked estimates") {
    const Network net = fit_parameters(fixtures::bs1(), fixtures::table1());
    // x2 | x1=present: counts (1 absent, 4 present) -> (4+1)/(5+2).
    CHECK(net.cpts[1][1][1] == doctest::Approx(5.0 / 7.0).epsilon(1e-15));
    // x1 has no parents: (5+1)/(10+2).
    CHECK(net.cpts[0][0][1] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("fit_parameters falls back to uniform rows") {
    Database db;
    db.variables = fixtures::xyz_variables();
    // x1 is always absent, so the x1=present rows of x2 are unobserved.
    db.cases = {{0, 0, 0}, {0, 1, 1}, {0, 0, 1}, {0, 1, 0}};
    const Network net = fit_parameters(fixtures::bs1(), db);
    CHECK(net.cpts[1][1] == std::vector<double>{0.5, 0.5});
}

TEST_CASE("fitted rows are normalized distributions") {
    RandomStream rng(9);
    for (int trial = 0; trial < 10; ++trial) {
        const Database db = fixtures::random_database(rng, {2, 3, 2, 3}, 25);
        const Structure s = fixtures::random_structure(rng, db.variables, 2);
        const Network net = fit_parameters(s, db);
        CHECK(validate_network(net).ok());
        for (const auto& cpt : net.cpts) {
            for (const auto& row : cpt) {
                double sum = 0.0;
                for (double p : row) {
                    CHECK(p > 0.0);
                    CHECK(p < 1.0);
                    sum += p;
                }
                CHECK(std::abs(sum - 1.0) <= 1e-12);
            }
        }
    }
}

TEST_CASE("fit_parameters rejects mismatched inputs") {
    Database db = fixtures::table1();
    db.variables[0].name = "y1";
    CHECK_THROWS_AS(fit_parameters(fixtures::bs1(), db), VariableMismatchError);
}

TEST_CASE("sampling then fitting recovers the generating probabilities") {
    const Network truth = fixtures::b1();
    const Database db = sample_cases(truth, 50000, 314159);
    const Network fitted = fit_parameters(fixtures::bs1(), db);
    for (size_t i = 0; i < truth.cpts.size(); ++i) {
        for (size_t j = 0; j < truth.cpts[i].size(); ++j) {
            for (size_t k = 0; k < truth.cpts[i][j].size(); ++k) {
                CHECK(std::abs(fitted.cpts[i][j][k] - truth.cpts[i][j][k]) <= 0.02);
            }
        }
    }
}

TEST_CASE("structural_diff counts missing, extra, and reversed arcs") {
    const Structure ref = fixtures::bs1();  // x1->x2, x2->x3

    CHECK(structural_diff(ref, ref).total() == 0);

    // x2->x1 reverses one arc; x2->x3 kept.
    const Structure reversed{ref.variables, {{1}, {}, {1}}};
    const ArcDiff d1 = structural_diff(ref, reversed);
    CHECK(d1.reversed == 1);
    CHECK(d1.missing == 0);
    CHECK(d1.extra == 0);

    // Empty structure misses both arcs.
    const Structure empty{ref.variables, {{}, {}, {}}};
    const ArcDiff d2 = structural_diff(ref, empty);
    CHECK(d2.missing == 2);
    CHECK(d2.total() == 2);

    // x1->x3 is neither an arc nor a reversal in the reference.
    const Structure extra{ref.variables, {{}, {0}, {0, 1}}};
    const ArcDiff d3 = structural_diff(ref, extra);
    CHECK(d3.extra == 1);
    CHECK(d3.missing == 0);
    CHECK(d3.reversed == 0);
}

TEST_CASE("reconstruction recovers the chain from ten thousand cases") {
    SearchConfig cfg;
    cfg.ordering.order = {0, 1, 2};
    cfg.max_parents = 2;
    const auto rows = reconstruction_experiment(fixtures::b1(), {10000}, 1, cfg);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].learned.parents == fixtures::bs1().parents);
    CHECK(rows[0].diff.total() == 0);
}

TEST_CASE("a repeated schedule entry reports identical results") {
    SearchConfig cfg;
    cfg.ordering.order = {0, 1, 2};
    cfg.max_parents = 2;
    const auto rows = reconstruction_experiment(fixtures::b1(), {400, 400}, 3, cfg);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].learned.parents == rows[1].learned.parents);
    CHECK(rows[0].diff.missing == rows[1].diff.missing);
    CHECK(rows[0].diff.extra == rows[1].diff.extra);
    CHECK(rows[0].diff.reversed == rows[1].diff.reversed);
}

TEST_CASE("reconstruction rejects an inconsistent ordering") {
    SearchConfig cfg;
    cfg.ordering.order = {2, 1, 0};  // child of every arc comes first
    cfg.max_parents = 2;
    CHECK_THROWS_AS(reconstruction_experiment(fixtures::b1(), {100}, 1, cfg), Error);
}
