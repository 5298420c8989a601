#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "qfslab/covering.hpp"
#include "qfslab/logscale.hpp"

using namespace qfslab;

namespace {

// Calibration constants for |count/q^n - 1/n!| <= K/q, frozen at twice the
// observed q=8 deviation (times q). The q*deviation sequences approach their
// limits from one side, so the factor-2 margin holds for every larger q.
constexpr double kConvergence2 = 2.75;
constexpr double kConvergence3 = 3.28;
constexpr double kConvergence4 = 2.24;
constexpr double kConvergenceC3 = 3.02;

double conv_k(int n) {
    switch (n) {
        case 2: return kConvergence2;
        case 3: return kConvergence3;
        case 4: return kConvergence4;
    }
    throw std::logic_error("no frozen constant for this n");
}

// Independent oracle for n=2: the closed cube [j1,j1+1]x[j2,j2+1]/q meets
// {x1 >= x2} iff its upper-left corner clears the diagonal, i.e. j2 <= j1+1.
std::uint64_t oracle_count_2d(int q) {
    std::uint64_t c = 0;
    for (int j1 = 0; j1 < q; ++j1)
        for (int j2 = 0; j2 < q; ++j2)
            if (j2 <= j1 + 1) ++c;
    return c;
}

// Dense-sampling oracle: declare intersection if any point of a (s+1)^n grid
// inside the closed cube satisfies the descending chain. The grid contains the
// cube corners, which is where boundary contact happens, so this is exact.
bool cube_meets_cone_sampled(const std::vector<int>& idx, int q, int s) {
    int n = static_cast<int>(idx.size());
    std::vector<int> k(n, 0);
    for (;;) {
        bool ok = true;
        for (int i = 1; i < n && ok; ++i)
            if (idx[i - 1] * s + k[i - 1] < idx[i] * s + k[i]) ok = false;
        if (ok) return true;
        int d = n - 1;
        while (d >= 0 && k[d] == s) k[d--] = 0;
        if (d < 0) return false;
        ++k[d];
    }
}

}  // namespace

TEST_CASE("cube count in one dimension covers the interval", "[covering]") {
    CoveringEstimate e = cube_count(1, 2);
    CHECK(e.value == 2.0);
    CHECK(e.method == CoveringEstimate::Method::lattice);
    CHECK(e.parameter == 2.0);
    CHECK(e.std_error == 0.0);
}

TEST_CASE("cube count for the half plane at q=4", "[covering]") {
    CHECK(cube_count(2, 4).value == 13.0);
    CHECK(static_cast<std::uint64_t>(cube_count(2, 4).value) == oracle_count_2d(4));
}

TEST_CASE("cube count matches the independent oracles", "[covering]") {
    SECTION("closed-form corner test, n=2") {
        for (int q : {1, 2, 3, 5, 8, 13})
            CHECK(static_cast<std::uint64_t>(cube_count(2, q).value) == oracle_count_2d(q));
    }
    SECTION("dense corner-grid sampling, n=2 and n=3") {
        for (int n : {2, 3}) {
            int q = 5;
            std::vector<int> idx(n, 0);
            std::uint64_t sampled = 0;
            for (;;) {
                if (cube_meets_cone_sampled(idx, q, 4)) ++sampled;
                int d = n - 1;
                while (d >= 0 && idx[d] == q - 1) idx[d--] = 0;
                if (d < 0) break;
                ++idx[d];
            }
            CHECK(static_cast<std::uint64_t>(cube_count(n, q).value) == sampled);
        }
    }
}

TEST_CASE("cube count input validation", "[covering]") {
    CHECK_THROWS_AS(cube_count(0, 4), std::invalid_argument);
    CHECK_THROWS_AS(cube_count(2, 0), std::invalid_argument);
    CHECK_THROWS_WITH(cube_count(8, 100), Catch::Matchers::ContainsSubstring("mc_fundamental_volume"));
}

TEST_CASE("single-coset domain count equals the plain cone count", "[covering]") {
    for (int n : {2, 3}) {
        PermGroup Sn = PermGroup::named(NamedGroup::symmetric, n);
        CosetSystem cs = coset_representatives(Sn, Sn);
        REQUIRE(cs.count() == 1);
        CHECK(cube_count(Sn, cs, 6).value == cube_count(n, 6).value);
    }
}

TEST_CASE("cube counts converge to the domain volume", "[covering]") {
    for (int n : {2, 3, 4}) {
        double vol = 1.0;
        for (int i = 2; i <= n; ++i) vol /= i;
        for (int q : {8, 16, 32}) {
            double ratio = cube_count(n, q).value / std::pow(q, n);
            CHECK(std::fabs(ratio - vol) <= conv_k(n) / q);
        }
    }
    // Translated domain of C_3: two cone copies, volume 1/3.
    PermGroup C3 = PermGroup::named(NamedGroup::cyclic, 3);
    PermGroup S3 = PermGroup::named(NamedGroup::symmetric, 3);
    CosetSystem cs = coset_representatives(C3, S3);
    REQUIRE(cs.count() == 2);
    for (int q : {8, 16, 32}) {
        double ratio = cube_count(C3, cs, q).value / std::pow(q, 3);
        CHECK(std::fabs(ratio - 1.0 / 3.0) <= kConvergenceC3 / q);
    }
}

TEST_CASE("cube counts are monotone", "[covering]") {
    SECTION("count grows with the grid resolution") {
        double prev = 0.0;
        for (int q = 4; q <= 12; ++q) {
            double c = cube_count(3, q).value;
            CHECK(c > prev);
            CHECK(c <= std::pow(q, 3));
            prev = c;
        }
    }
    SECTION("the cone count never exceeds the count of a domain containing it") {
        PermGroup C3 = PermGroup::named(NamedGroup::cyclic, 3);
        PermGroup S3 = PermGroup::named(NamedGroup::symmetric, 3);
        CosetSystem cs = coset_representatives(C3, S3);
        for (int q : {4, 10, 20})
            CHECK(cube_count(3, q).value <= cube_count(C3, cs, q).value);
    }
}

TEST_CASE("monte carlo volume of the trivial group is exactly one", "[covering]") {
    PermGroup T = PermGroup::named(NamedGroup::trivial, 3);
    CoveringEstimate e = mc_fundamental_volume(T, 1000, 7);
    CHECK(e.value == 1.0);
    CHECK(e.std_error == 0.0);
    CHECK(e.method == CoveringEstimate::Method::monte_carlo);
    CHECK(e.parameter == 1000.0);
}

TEST_CASE("monte carlo volume estimates 1/|G| for free actions", "[covering]") {
    struct Case { PermGroup G; double vol; };
    std::vector<Case> cases;
    cases.push_back({PermGroup::named(NamedGroup::symmetric, 2), 1.0 / 2.0});
    cases.push_back({PermGroup::named(NamedGroup::symmetric, 3), 1.0 / 6.0});
    cases.push_back({PermGroup::named(NamedGroup::cyclic, 3), 1.0 / 3.0});
    for (const auto& c : cases) {
        CoveringEstimate e = mc_fundamental_volume(c.G, 100000, 42);
        CHECK(e.std_error > 0.0);
        CHECK(std::fabs(e.value - c.vol) <= 3.0 * e.std_error);
    }
}

TEST_CASE("monte carlo estimates are reproducible and block-invariant", "[covering]") {
    PermGroup C3 = PermGroup::named(NamedGroup::cyclic, 3);
    CoveringEstimate a = mc_fundamental_volume(C3, 100000, 42);
    CoveringEstimate b = mc_fundamental_volume(C3, 100000, 42);
    CHECK(a.value == b.value);
    CHECK(mc_fundamental_volume(C3, 100000, 43).value != a.value);
    // A sample count below one block still works, as does exactly one sample.
    CHECK_NOTHROW(mc_fundamental_volume(C3, 100, 1));
    CHECK_NOTHROW(mc_fundamental_volume(C3, 1, 1));
    CHECK_THROWS_AS(mc_fundamental_volume(C3, 0, 1), std::invalid_argument);
}

TEST_CASE("lattice and monte carlo estimates agree", "[covering]") {
    struct Case { const char* name; double lattice_ratio; PermGroup G; double k; };
    PermGroup S2 = PermGroup::named(NamedGroup::symmetric, 2);
    PermGroup S3 = PermGroup::named(NamedGroup::symmetric, 3);
    PermGroup C3 = PermGroup::named(NamedGroup::cyclic, 3);
    CosetSystem cs = coset_representatives(C3, S3);
    const int q = 50;

    std::vector<Case> cases;
    cases.push_back({"S2", cube_count(2, q).value / std::pow(q, 2), S2, kConvergence2});
    cases.push_back({"S3", cube_count(3, q).value / std::pow(q, 3), S3, kConvergence3});
    cases.push_back({"C3", cube_count(C3, cs, q).value / std::pow(q, 3), C3, kConvergenceC3});
    for (const auto& c : cases) {
        INFO(c.name);
        CoveringEstimate mc = mc_fundamental_volume(c.G, 100000, 42);
        CHECK(std::fabs(c.lattice_ratio - mc.value) <= 3.0 * mc.std_error + c.k / q);
    }
}

TEST_CASE("analytic covering bound evaluates the closed form", "[covering]") {
    SECTION("moderate parameters in linear space") {
        CoveringEstimate e = analytic_covering_bound(3, GroupOrder::from_count(6), 0.1);
        CHECK(e.value == Catch::Approx(1000.0 / 6.0).epsilon(1e-12));
        CHECK(e.method == CoveringEstimate::Method::analytic);
        CHECK(e.parameter == 0.1);
    }
    SECTION("the trivial group reduces to the plain cube covering") {
        CHECK(analytic_covering_bound(3, GroupOrder::from_count(1), 0.1).value ==
              Catch::Approx(1000.0).epsilon(1e-12));
        CHECK(analytic_covering_bound(5, GroupOrder::from_count(1), 0.5, 2.0).value ==
              Catch::Approx(64.0).epsilon(1e-12));
    }
    SECTION("log-space survives 100 dimensions") {
        double l10 = analytic_covering_bound_log10(100, GroupOrder::factorial(100), 0.5);
        CHECK(l10 == Catch::Approx(-157.970 + 100.0 * std::log10(2.0)).margin(5e-3));
        CHECK(l10 == Catch::Approx(-127.867).margin(5e-3));
    }
    SECTION("group order n! matches the explicit factorial") {
        for (int n : {2, 3, 4, 5}) {
            double fact = 1.0;
            for (int i = 2; i <= n; ++i) fact *= i;
            CHECK(analytic_covering_bound_log10(n, GroupOrder::factorial(n), 0.2) ==
                  Catch::Approx(analytic_covering_bound_log10(
                      n, GroupOrder::from_count(fact), 0.2)).epsilon(1e-12));
        }
    }
    SECTION("validation") {
        CHECK_THROWS_AS(analytic_covering_bound(0, GroupOrder::from_count(1), 0.1),
                        std::invalid_argument);
        CHECK_THROWS_AS(analytic_covering_bound(3, GroupOrder::from_count(6), 0.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(analytic_covering_bound(3, GroupOrder::from_count(6), 0.1, -1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("function-class log covering", "[covering]") {
    SECTION("direct arithmetic") {
        CHECK(function_class_log_covering(10.0, 1.0, 1.0, 0.5) ==
              Catch::Approx(10.0 * std::log(16.0)).epsilon(1e-14));
    }
    SECTION("empty cover degenerates to zero") {
        CHECK(function_class_log_covering(0.0, 1.0, 1.0, 0.5) == 0.0);
    }
    SECTION("chained with a lattice count") {
        double n_delta = cube_count(2, 4).value;
        REQUIRE(n_delta == 13.0);
        CHECK(function_class_log_covering(n_delta, 1.0, 1.0, 0.25) ==
              Catch::Approx(13.0 * std::log(32.0)).epsilon(1e-14));
        CHECK(function_class_log_covering(n_delta, 1.0, 1.0, 0.25) ==
              Catch::Approx(45.05).margin(5e-3));
    }
    SECTION("vacuous and invalid parameters") {
        CHECK_THROWS_AS(function_class_log_covering(10.0, 1.0, 0.1, 1.0), std::runtime_error);
        CHECK_THROWS_AS(function_class_log_covering(-1.0, 1.0, 1.0, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(function_class_log_covering(10.0, 0.0, 1.0, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(function_class_log_covering(10.0, 1.0, 1.0, 0.5, -1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("covering estimates serialize to JSON", "[covering]") {
    nlohmann::json j = cube_count(2, 4);
    CHECK(j.at("value") == 13.0);
    CHECK(j.at("method") == "lattice");
    CHECK(j.at("parameter") == 4.0);
    CHECK(j.at("std_error") == 0.0);

    nlohmann::json m = mc_fundamental_volume(PermGroup::named(NamedGroup::trivial, 2), 10, 1);
    CHECK(m.at("method") == "monte_carlo");
    CHECK(m.at("value") == 1.0);
}
