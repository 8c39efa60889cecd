#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <doctest.h>

#include "bnkit/scoring.hpp"
#include "bnkit/search.hpp"
#include "bnkit/simulate.hpp"
#include "support/exact_oracle.hpp"
#include "support/fixtures.hpp"

using namespace bnkit;

namespace {

Database shuffled_cases(const Database& db, std::uint64_t seed) {
    Database out = db;
    RandomStream rng(seed);
    for (int i = out.num_cases() - 1; i > 0; --i) {
        const int j = static_cast<int>(rng.next_bits() % static_cast<std::uint64_t>(i + 1));
        std::swap(out.cases[i], out.cases[j]);
    }
    return out;
}

}  // namespace

TEST_CASE("tabulate_counts tallies the worked example") {
    const Database db = fixtures::table1();

    SUBCASE("x3 with parent x2") {
        const CountTable t = tabulate_counts(db, 2, std::vector<int>{1});
        REQUIRE(t.num_instantiations() == 2);
        // Case 1 has x2=absent, so that instantiation is listed first.
        CHECK(t.entries[0].instantiation == std::vector<int>{0});
        CHECK(t.entries[0].total == 5);
        CHECK(t.entries[0].value_counts == std::vector<std::int64_t>{4, 1});
        CHECK(t.entries[1].instantiation == std::vector<int>{1});
        CHECK(t.entries[1].total == 5);
        CHECK(t.entries[1].value_counts == std::vector<std::int64_t>{0, 5});
    }

    SUBCASE("x1 with no parents") {
        const CountTable t = tabulate_counts(db, 0, {});
        REQUIRE(t.num_instantiations() == 1);
        CHECK(t.entries[0].instantiation.empty());
        CHECK(t.entries[0].total == 10);
        CHECK(t.entries[0].value_counts == std::vector<std::int64_t>{5, 5});
    }
}

TEST_CASE("tabulate_counts invariants on random databases") {
    RandomStream rng(99);
    for (int trial = 0; trial < 20; ++trial) {
        const Database db = fixtures::random_database(rng, {2, 3, 2, 4}, 30);
        for (int node = 0; node < 4; ++node) {
            std::vector<int> parents;
            for (int p = 0; p < 4; ++p) {
                if (p != node && rng.next_bits() % 2 == 0) parents.push_back(p);
            }
            const CountTable t = tabulate_counts(db, node, parents);

            std::int64_t case_total = 0;
            int full_space = 1;
            for (int p : parents) full_space *= db.variables[p].arity();
            for (const auto& e : t.entries) {
                const auto sum = std::accumulate(e.value_counts.begin(), e.value_counts.end(),
                                                 std::int64_t{0});
                CHECK(sum == e.total);
                case_total += e.total;
            }
            CHECK(case_total == db.num_cases());
            CHECK(t.num_instantiations() <= std::min(db.num_cases(), full_space));
            if (parents.empty()) CHECK(t.num_instantiations() == 1);
        }
    }
}

TEST_CASE("log-factorial table values") {
    const LogFactorialTable lf(20);
    CHECK(lf(0) == 0.0);
    CHECK(lf(1) == 0.0);
    CHECK(std::abs(lf(5) - 4.787491742782046) <= 1e-12);
    CHECK(std::abs(lf(11) - 17.502307845873887) <= 1e-10);
    CHECK_THROWS_AS(lf(21), Error);
    CHECK_THROWS_AS(lf(-1), Error);
}

TEST_CASE("log-factorial table tracks lgamma within 1e-10 relative") {
    const LogFactorialTable lf(200000);
    for (std::int64_t k : {2, 10, 137, 5000, 81001, 200000}) {
        const double reference = std::lgamma(static_cast<double>(k) + 1.0);
        CHECK(std::abs(lf(k) - reference) <= 1e-10 * std::max(1.0, std::abs(reference)));
    }
}

TEST_CASE("g_log reproduces the exact per-node factors") {
    const Database db = fixtures::table1();
    CHECK(std::abs(g_log(db, 0, {}) - std::log(1.0 / 2772.0)) <= 1e-12);
    CHECK(std::abs(g_log(db, 1, std::vector<int>{0}) - std::log(1.0 / 900.0)) <= 1e-12);
    CHECK(std::abs(g_log(db, 2, std::vector<int>{1}) - std::log(1.0 / 180.0)) <= 1e-12);
    // Values for the greedy trace on x3.
    CHECK(std::abs(g_log(db, 2, {}) - std::log(1.0 / 2310.0)) <= 1e-12);
    CHECK(std::abs(g_log(db, 2, std::vector<int>{0}) - std::log(1.0 / 1800.0)) <= 1e-12);
    CHECK(std::abs(g_log(db, 2, std::vector<int>{0, 1}) - std::log(1.0 / 400.0)) <= 1e-12);
}

TEST_CASE("structure_log_score matches the worked joint probabilities") {
    const Database db = fixtures::table1();
    const PriorMode uniform = PriorMode::uniform_all_dags(3);

    const LogScore s1 = structure_log_score(fixtures::bs1(), db, uniform);
    // Exact value: (1/25) * 1/2772 * 1/900 * 1/180 = 1/11226600000.
    CHECK(std::abs(s1.linear_value() - 8.907416314823722e-11) / 8.907416314823722e-11 <= 1e-9);
    CHECK(std::abs(s1.linear_value() - 8.91e-11) / 8.91e-11 <= 0.005);

    const LogScore s2 = structure_log_score(fixtures::bs2(), db, uniform);
    CHECK(std::abs(s2.linear_value() - 8.907416314823722e-12) / 8.907416314823722e-12 <= 1e-9);
    CHECK(std::abs(s2.linear_value() - 8.91e-12) / 8.91e-12 <= 0.005);
}

TEST_CASE("structure_log_score without a prior is the marginal likelihood") {
    const LogScore s = structure_log_score(fixtures::bs1(), fixtures::table1(), PriorMode::none());
    CHECK(std::abs(s.linear_value() - 1.0 / 449064000.0) / (1.0 / 449064000.0) <= 1e-9);
}

TEST_CASE("prior modes shift the score by the expected constants") {
    const Database db = fixtures::table1();
    const double base = structure_log_score(fixtures::bs1(), db, PriorMode::none()).log_value;
    const double all_dags =
        structure_log_score(fixtures::bs1(), db, PriorMode::uniform_all_dags(3)).log_value;
    const double ordered =
        structure_log_score(fixtures::bs1(), db, PriorMode::uniform_ordered(3)).log_value;
    CHECK(std::abs((base - all_dags) - std::log(25.0)) <= 1e-12);
    CHECK(std::abs((base - ordered) - 3.0 * std::log(2.0)) <= 1e-12);
}

TEST_CASE("log10 and linear views of a LogScore") {
    const LogScore s{std::log(1e-10), PriorMode::none()};
    CHECK(std::abs(s.log10_value() - (-10.0)) <= 1e-12);
    CHECK(std::abs(s.linear_value() - 1e-10) / 1e-10 <= 1e-12);
}

TEST_CASE("structure_log_score rejects mismatched variables") {
    Database db = fixtures::table1();
    db.variables[2].values = {"no", "yes"};
    CHECK_THROWS_AS(structure_log_score(fixtures::bs1(), db, PriorMode::none()),
                    VariableMismatchError);

    Database empty;
    empty.variables = fixtures::xyz_variables();
    CHECK_THROWS_AS(structure_log_score(fixtures::bs1(), empty, PriorMode::none()), Error);
}

TEST_CASE("compare reproduces the ten-to-one ratio") {
    const Database db = fixtures::table1();
    const Comparison c = compare(fixtures::bs1(), fixtures::bs2(), db);
    CHECK(std::abs(c.ratio - 10.0) <= 1e-6);

    const Comparison self = compare(fixtures::bs1(), fixtures::bs1(), db);
    CHECK(self.ratio == 1.0);

    const Comparison reversed = compare(fixtures::bs2(), fixtures::bs1(), db);
    CHECK(std::abs(reversed.ratio - 0.1) <= 1e-8);
}

TEST_CASE("compare is transitive in the log domain") {
    RandomStream rng(7);
    const Database db = fixtures::random_database(rng, {2, 3, 2, 2}, 40);
    const Structure a = fixtures::random_structure(rng, db.variables, 2);
    const Structure b = fixtures::random_structure(rng, db.variables, 2);
    const Structure c = fixtures::random_structure(rng, db.variables, 2);
    const double lhs = compare(a, b, db).log_ratio + compare(b, c, db).log_ratio;
    const double rhs = compare(a, c, db).log_ratio;
    CHECK(std::abs(lhs - rhs) <= 1e-9 * std::max(1.0, std::abs(rhs)));
}

TEST_CASE("normalized posteriors over every three-node DAG") {
    const Database db = fixtures::table1();
    std::vector<Structure> structures;
    enumerate_all_dags(3, [&](const std::vector<std::vector<int>>& parents) {
        structures.push_back(Structure{db.variables, parents});
    });
    REQUIRE(structures.size() == 25);

    const auto posteriors = normalized_posteriors(structures, db, PriorMode::uniform_all_dags(3));

    double p_bs1 = 0.0, p_bs2 = 0.0, sum = 0.0;
    for (size_t i = 0; i < structures.size(); ++i) {
        sum += posteriors[i];
        if (structures[i].parents == fixtures::bs1().parents) p_bs1 = posteriors[i];
        if (structures[i].parents == fixtures::bs2().parents) p_bs2 = posteriors[i];
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
    CHECK(std::abs(p_bs1 - 0.109) <= 0.001);
    CHECK(std::abs(p_bs2 - 0.011) <= 0.001);
    CHECK(std::abs((1.0 - p_bs1 - p_bs2) - 0.880) <= 0.002);
    // Exact values from rational arithmetic.
    CHECK(std::abs(p_bs1 - 0.1085314725253282) <= 1e-12);
    CHECK(std::abs(p_bs2 - 0.0108531472525328) <= 1e-12);
}

TEST_CASE("normalized posteriors are invariant to a uniform prior") {
    const Database db = fixtures::table1();
    std::vector<Structure> structures{fixtures::bs1(), fixtures::bs2()};
    const auto none = normalized_posteriors(structures, db, PriorMode::none());
    const auto all_dags = normalized_posteriors(structures, db, PriorMode::uniform_all_dags(3));
    const auto ordered = normalized_posteriors(structures, db, PriorMode::uniform_ordered(3));
    for (size_t i = 0; i < structures.size(); ++i) {
        CHECK(std::abs(none[i] - all_dags[i]) <= 1e-12);
        CHECK(std::abs(none[i] - ordered[i]) <= 1e-12);
    }
    // The two-structure set renormalizes the 10:1 ratio.
    CHECK(std::abs(none[0] - 10.0 / 11.0) <= 1e-9);
    CHECK(std::abs(none[1] - 1.0 / 11.0) <= 1e-9);
}

TEST_CASE("normalized_posteriors of a single structure is 1") {
    const auto p =
        normalized_posteriors({fixtures::bs1()}, fixtures::table1(), PriorMode::none());
    REQUIRE(p.size() == 1);
    CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("normalized_posteriors rejects an empty list") {
    CHECK_THROWS_AS(normalized_posteriors({}, fixtures::table1(), PriorMode::none()), Error);
}

TEST_CASE("scores are bit-identical under case permutation") {
    RandomStream rng(123);
    for (int trial = 0; trial < 10; ++trial) {
        const Database db = fixtures::random_database(rng, {2, 3, 2, 2}, 60);
        const Structure s = fixtures::random_structure(rng, db.variables, 3);
        const double base = structure_log_score(s, db, PriorMode::none()).log_value;
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const Database shuffled = shuffled_cases(db, seed);
            CHECK(structure_log_score(s, shuffled, PriorMode::none()).log_value == base);
        }
    }
}

TEST_CASE("observed instantiations score the same as the full space") {
    // Iterating all parent instantiations adds only factors of exactly 1
    // for unobserved rows; the oracle iterates the full space.
    RandomStream rng(31);
    for (int trial = 0; trial < 15; ++trial) {
        const Database db = fixtures::random_database(rng, {2, 3, 3, 2}, 12);
        const Structure s = fixtures::random_structure(rng, db.variables, 3);
        for (int node = 0; node < s.num_nodes(); ++node) {
            const double observed = g_log(db, node, s.parents[node]);
            const double full =
                std::log(oracle::to_double(oracle::exact_node_factor(db, node, s.parents[node])));
            CHECK(std::abs(observed - full) <= 1e-12 * std::max(1.0, std::abs(full)));
        }
    }
}

TEST_CASE("the score decomposes into per-node terms") {
    RandomStream rng(55);
    const Database db = fixtures::random_database(rng, {2, 2, 3, 2}, 40);
    Structure s = fixtures::random_structure(rng, db.variables, 2);

    const LogFactorialTable lf = LogFactorialTable::for_database(db);
    std::vector<double> terms;
    for (int i = 0; i < s.num_nodes(); ++i) terms.push_back(g_log(db, i, s.parents[i], lf));
    const double total = structure_log_score(s, db, PriorMode::none()).log_value;
    CHECK(total == std::accumulate(terms.begin(), terms.end(), 0.0));

    // Changing one node's parents changes exactly that summand.
    Structure t = s;
    t.parents[2] = t.parents[2].empty() ? std::vector<int>{0} : std::vector<int>{};
    for (int i = 0; i < s.num_nodes(); ++i) {
        const double before = terms[i];
        const double after = g_log(db, i, t.parents[i], lf);
        if (i == 2) {
            CHECK(before != after);
        } else {
            CHECK(before == after);
        }
    }
}

TEST_CASE("exp(log score) matches exact rational scoring") {
    RandomStream rng(2718);
    for (int trial = 0; trial < 25; ++trial) {
        const int n = 2 + static_cast<int>(rng.next_bits() % 3);  // 2..4 variables
        std::vector<int> arities(n);
        for (int& a : arities) a = 2 + static_cast<int>(rng.next_bits() % 2);
        const int m = 1 + static_cast<int>(rng.next_bits() % 30);
        const Database db = fixtures::random_database(rng, arities, m);
        const Structure s = fixtures::random_structure(rng, db.variables, n - 1);

        const double got =
            std::exp(structure_log_score(s, db, PriorMode::none()).log_value);
        const double expected = oracle::to_double(oracle::exact_structure_score(s, db, 1));
        CHECK(std::abs(got - expected) / expected <= 1e-9);
    }
}

TEST_CASE("log_big agrees with log on representable integers") {
    CHECK(log_big(BigInt(1)) == 0.0);
    CHECK(std::abs(log_big(BigInt(25)) - std::log(25.0)) <= 1e-14);
    const BigInt huge = BigInt(1) << 400;
    CHECK(std::abs(log_big(huge) - 400.0 * std::log(2.0)) <= 1e-9);
    CHECK_THROWS_AS(log_big(BigInt(0)), Error);
}
