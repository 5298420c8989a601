#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <limits>
#include <vector>

#include "qfslab/qfs.hpp"
#include "qfslab/rng.hpp"

using namespace qfslab;

namespace {

Permutation perm(std::vector<int> images) { return Permutation(std::move(images)); }

Point random_point(int n, std::mt19937_64& eng) {
    Point x(n);
    for (double& v : x) v = uniform01(eng);
    return x;
}

// Reference canonical representative: explicit maximum over the materialized orbit.
Point orbit_max(const PermGroup& G, const Point& x) {
    std::vector<Point> orb = orbit(G, x);
    return orb.back();
}

}  // namespace

TEST_CASE("orbit enumerates distinct images", "[qfs]") {
    PermGroup S3 = PermGroup::named(NamedGroup::symmetric, 3);
    SECTION("distinct entries give a full orbit") {
        std::vector<Point> orb = orbit(S3, {1.0, 2.0, 3.0});
        CHECK(orb.size() == 6);
        CHECK(std::is_sorted(orb.begin(), orb.end()));
    }
    SECTION("ties collapse the orbit") {
        CHECK(orbit(S3, {1.0, 1.0, 2.0}).size() == 3);
        CHECK(orbit(S3, {5.0, 5.0, 5.0}).size() == 1);
    }
    SECTION("trivial group fixes everything") {
        PermGroup T = PermGroup::named(NamedGroup::trivial, 3);
        CHECK(orbit(T, {3.0, 1.0, 2.0}) == std::vector<Point>{{3.0, 1.0, 2.0}});
    }
    SECTION("input validation") {
        CHECK_THROWS_AS(orbit(S3, {1.0, 2.0}), std::invalid_argument);
        CHECK_THROWS_AS(orbit(S3, {1.0, 2.0, std::nan("")}), std::invalid_argument);
    }
}

TEST_CASE("canonical representative is the descending sort under S_n", "[qfs]") {
    PermGroup S4 = PermGroup::named(NamedGroup::symmetric, 4);
    OrbitRep rep = canonical_rep(S4, {0.25, 0.75, 0.5, 1.0});
    CHECK(rep.canonical == Point{1.0, 0.75, 0.5, 0.25});
    CHECK(rep.stabilized_by == 1);
}

TEST_CASE("stabilizer count reflects tied entries", "[qfs]") {
    PermGroup S3 = PermGroup::named(NamedGroup::symmetric, 3);
    PermGroup S4 = PermGroup::named(NamedGroup::symmetric, 4);
    CHECK(canonical_rep(S3, {1.0, 1.0, 2.0}).stabilized_by == 2);
    CHECK(canonical_rep(S3, {7.0, 7.0, 7.0}).stabilized_by == 6);
    CHECK(canonical_rep(S4, {1.0, 2.0, 1.0, 1.0}).stabilized_by == 6);
    CHECK(canonical_rep(S4, {1.0, 1.0, 2.0, 2.0}).stabilized_by == 4);
}

TEST_CASE("cyclic canonical representative rotates to the lex maximum", "[qfs]") {
    PermGroup C3 = PermGroup::named(NamedGroup::cyclic, 3);
    OrbitRep rep = canonical_rep(C3, {1.0, 3.0, 2.0});
    CHECK(rep.canonical == Point{3.0, 2.0, 1.0});
    CHECK(rep.stabilized_by == 1);
    // (2,1,2) has orbit {(2,1,2),(2,2,1),(1,2,2)}; the lex max keeps both 2s in front.
    CHECK(canonical_rep(C3, {2.0, 1.0, 2.0}).canonical == Point{2.0, 2.0, 1.0});
}

TEST_CASE("generic canonical path agrees with the explicit orbit maximum", "[qfs]") {
    std::vector<PermGroup> groups;
    groups.push_back(PermGroup::named(NamedGroup::cyclic, 4));
    groups.push_back(PermGroup::named(NamedGroup::cyclic, 7));
    groups.push_back(PermGroup::from_generators({perm({1, 0, 3, 2}), perm({2, 3, 0, 1})}));
    groups.push_back(PermGroup::from_generators({perm({0, 2, 1, 3})}));
    auto eng = make_engine(12, 0);
    for (const auto& G : groups) {
        for (int trial = 0; trial < 100; ++trial) {
            Point x = random_point(G.degree(), eng);
            if (trial % 4 == 0 && G.degree() >= 2) x[1] = x[0];  // exercise ties
            OrbitRep rep = canonical_rep(G, x);
            CHECK(rep.canonical == orbit_max(G, x));
            // Count of fixing elements, by definition.
            std::size_t stab = 0;
            for (const auto& g : G.elements())
                if (g.act(x) == x) ++stab;
            CHECK(rep.stabilized_by == stab);
        }
    }
}

TEST_CASE("canonicalization is idempotent and matches is_canonical", "[qfs]") {
    std::vector<PermGroup> groups;
    groups.push_back(PermGroup::named(NamedGroup::symmetric, 4));
    groups.push_back(PermGroup::named(NamedGroup::cyclic, 5));
    groups.push_back(PermGroup::from_generators({perm({1, 0, 3, 2}), perm({2, 3, 0, 1})}));
    auto eng = make_engine(13, 0);
    for (const auto& G : groups) {
        for (int trial = 0; trial < 200; ++trial) {
            Point x = random_point(G.degree(), eng);
            Point cx = canonical_rep(G, x).canonical;
            CHECK(canonical_rep(G, cx).canonical == cx);
            CHECK(is_canonical(G, cx));
            CHECK(is_canonical(G, x) == (cx == x));
        }
    }
}

TEST_CASE("quotient distance picks the best alignment", "[qfs]") {
    PermGroup S2 = PermGroup::named(NamedGroup::symmetric, 2);
    // Direct distance is sqrt(0.09 + 0.04); the swapped alignment achieves 0.1.
    CHECK(quotient_distance(S2, {0.0, 0.2}, {0.3, 0.0}) == Catch::Approx(0.1).epsilon(1e-14));

    PermGroup T = PermGroup::named(NamedGroup::trivial, 2);
    CHECK(quotient_distance(T, {0.0, 0.2}, {0.3, 0.0}) ==
          Catch::Approx(std::sqrt(0.13)).epsilon(1e-14));
}

TEST_CASE("quotient distance vanishes exactly on orbits", "[qfs]") {
    PermGroup C4 = PermGroup::named(NamedGroup::cyclic, 4);
    auto eng = make_engine(14, 0);
    for (int trial = 0; trial < 100; ++trial) {
        Point x = random_point(4, eng);
        for (const auto& g : C4.elements()) CHECK(quotient_distance(C4, x, g.act(x)) == 0.0);
    }
}

TEST_CASE("quotient distance satisfies the metric axioms", "[qfs]") {
    std::vector<PermGroup> groups;
    groups.push_back(PermGroup::named(NamedGroup::symmetric, 3));
    groups.push_back(PermGroup::named(NamedGroup::symmetric, 4));
    groups.push_back(PermGroup::named(NamedGroup::cyclic, 4));
    groups.push_back(PermGroup::from_generators({perm({1, 0, 3, 2}), perm({2, 3, 0, 1})}));
    auto eng = make_engine(15, 0);
    const double tol = 1e-12;
    for (const auto& G : groups) {
        int n = G.degree();
        for (int trial = 0; trial < 300; ++trial) {
            Point x = random_point(n, eng), y = random_point(n, eng), z = random_point(n, eng);
            double dxy = quotient_distance(G, x, y);
            double dyx = quotient_distance(G, y, x);
            double dxz = quotient_distance(G, x, z);
            double dyz = quotient_distance(G, y, z);
            CHECK(dxy >= 0.0);
            CHECK(std::fabs(dxy - dyx) <= tol);
            CHECK(dxz <= dxy + dyz + tol);
            CHECK(quotient_distance(G, x, x) == 0.0);
            // Invariance under the action on either argument.
            const Permutation& g = G.elements()[eng() % G.order()];
            CHECK(std::fabs(quotient_distance(G, g.act(x), y) - dxy) <= tol);
            CHECK(std::fabs(quotient_distance(G, x, g.act(y)) - dxy) <= tol);
        }
    }
}

TEST_CASE("descending cone membership is closed", "[qfs]") {
    CHECK(in_descending_domain({3.0, 2.0, 2.0, 1.0}));
    CHECK(in_descending_domain({2.0, 2.0}));
    CHECK(in_descending_domain({1.0}));
    CHECK_FALSE(in_descending_domain({1.0, 2.0}));
    CHECK_FALSE(in_descending_domain({3.0, 1.0, 2.0}));
    CHECK_THROWS_AS(in_descending_domain({1.0, std::numeric_limits<double>::infinity()}),
                    std::invalid_argument);
}

TEST_CASE("fundamental domain of S_n is the descending cone", "[qfs]") {
    PermGroup S3 = PermGroup::named(NamedGroup::symmetric, 3);
    CosetSystem cs = coset_representatives(S3, S3);
    REQUIRE(cs.count() == 1);
    auto eng = make_engine(16, 0);
    for (int trial = 0; trial < 200; ++trial) {
        Point x = random_point(3, eng);
        CHECK(in_fundamental_domain(S3, cs, x) == in_descending_domain(x));
    }
}

TEST_CASE("fundamental domain translates tile the cube", "[qfs]") {
    // For generic points, exactly one orbit element lands in the domain.
    std::vector<PermGroup> groups;
    groups.push_back(PermGroup::named(NamedGroup::cyclic, 3));
    groups.push_back(PermGroup::named(NamedGroup::cyclic, 4));
    groups.push_back(PermGroup::from_generators({perm({1, 0, 3, 2}), perm({2, 3, 0, 1})}));
    groups.push_back(PermGroup::from_generators({perm({0, 2, 1})}));
    auto eng = make_engine(17, 0);
    for (const auto& G : groups) {
        PermGroup Sn = PermGroup::named(NamedGroup::symmetric, G.degree());
        CosetSystem cs = coset_representatives(G, Sn);
        CHECK(cs.count() * G.order() == Sn.order());
        for (int trial = 0; trial < 200; ++trial) {
            Point x = random_point(G.degree(), eng);
            int inside = 0;
            for (const auto& g : G.elements())
                if (in_fundamental_domain(G, cs, g.act(x))) ++inside;
            CHECK(inside == 1);
        }
    }
}

TEST_CASE("fundamental domain membership validates its inputs", "[qfs]") {
    PermGroup C3 = PermGroup::named(NamedGroup::cyclic, 3);
    PermGroup S3 = PermGroup::named(NamedGroup::symmetric, 3);
    CosetSystem cs = coset_representatives(C3, S3);
    CHECK_THROWS_AS(in_fundamental_domain(C3, cs, {0.1, 0.2}), std::invalid_argument);
    // A coset system built for a different subgroup is rejected.
    CosetSystem wrong = coset_representatives(PermGroup::from_generators({perm({1, 0, 2})}), S3);
    CHECK_THROWS_AS(in_fundamental_domain(C3, wrong, {0.1, 0.2, 0.3}), std::invalid_argument);
    // An incomplete system (doctored count) is rejected.
    CosetSystem truncated = cs;
    truncated.representatives.pop_back();
    CHECK_THROWS_AS(in_fundamental_domain(C3, truncated, {0.1, 0.2, 0.3}), std::invalid_argument);
}

TEST_CASE("lifted functions are invariant to the bit", "[qfs]") {
    std::vector<PermGroup> groups;
    groups.push_back(PermGroup::named(NamedGroup::symmetric, 4));
    groups.push_back(PermGroup::named(NamedGroup::cyclic, 5));
    groups.push_back(PermGroup::from_generators({perm({1, 0, 3, 2}), perm({2, 3, 0, 1})}));
    auto eng = make_engine(18, 0);
    for (const auto& G : groups) {
        // Deliberately order-sensitive probe function.
        auto f = [](const Point& y) {
            double acc = 0.0;
            for (std::size_t i = 0; i < y.size(); ++i) acc = acc * 1.7 + y[i] * (i + 1.0);
            return acc;
        };
        auto lifted = lift_invariant(G, f);
        for (int trial = 0; trial < 100; ++trial) {
            Point x = random_point(G.degree(), eng);
            double base = lifted(x);
            CHECK(base == f(canonical_rep(G, x).canonical));
            for (const auto& g : G.elements()) CHECK(lifted(g.act(x)) == base);
        }
    }
}

TEST_CASE("lifting the first coordinate yields the maximum under S_n", "[qfs]") {
    PermGroup S4 = PermGroup::named(NamedGroup::symmetric, 4);
    auto lifted = lift_invariant(S4, [](const Point& y) { return y[0]; });
    CHECK(lifted({0.3, 0.9, 0.1, 0.5}) == 0.9);
    CHECK_THROWS_AS(lift_invariant(S4, nullptr), std::invalid_argument);
}

TEST_CASE("equivariant assembly reproduces the symmetric linear map", "[qfs]") {
    // part(y) = y_0 + 0.5*(y_1 + y_2) is Stab(0)-invariant; the assembly must
    // produce F(x)_i = x_i + 0.5 * (sum of the others).
    PermGroup S3 = PermGroup::named(NamedGroup::symmetric, 3);
    auto part = [](const Point& y) { return y[0] + 0.5 * (y[1] + y[2]); };
    CosetSystem taus = coset_representatives(stabilizer(S3, 0), S3);
    auto F = equivariant_from_invariants(S3, {part}, {taus});

    Point x{0.2, 0.7, 0.4};
    Point out = F(x);
    REQUIRE(out.size() == 3);
    CHECK(out[0] == Catch::Approx(0.2 + 0.5 * 1.1).epsilon(1e-15));
    CHECK(out[1] == Catch::Approx(0.7 + 0.5 * 0.6).epsilon(1e-15));
    CHECK(out[2] == Catch::Approx(0.4 + 0.5 * 0.9).epsilon(1e-15));

    auto eng = make_engine(19, 0);
    for (int trial = 0; trial < 100; ++trial) {
        Point p = random_point(3, eng);
        Point Fp = F(p);
        for (const auto& g : S3.elements()) {
            Point lhs = F(g.act(p));
            Point rhs = g.act(Fp);
            for (int i = 0; i < 3; ++i) CHECK(lhs[i] == Catch::Approx(rhs[i]).margin(1e-12));
        }
    }
}

TEST_CASE("equivariant assembly with a free action recovers pointwise maps", "[qfs]") {
    // Trivial stabilizers: component i evaluates the part at the translate
    // aligning coordinate i with the anchor, so part(y)=y_0 gives the identity.
    PermGroup C4 = PermGroup::named(NamedGroup::cyclic, 4);
    CosetSystem taus = coset_representatives(stabilizer(C4, 0), C4);
    REQUIRE(taus.count() == 4);

    auto ident = equivariant_from_invariants(C4, {[](const Point& y) { return y[0]; }}, {taus});
    auto square = equivariant_from_invariants(
        C4, {[](const Point& y) { return y[0] * y[0]; }}, {taus});

    auto eng = make_engine(20, 0);
    for (int trial = 0; trial < 100; ++trial) {
        Point x = random_point(4, eng);
        CHECK(ident(x) == x);
        Point sq = square(x);
        for (int i = 0; i < 4; ++i) CHECK(sq[i] == x[i] * x[i]);
        // Pointwise parts make equivariance exact.
        for (const auto& g : C4.elements()) CHECK(square(g.act(x)) == g.act(sq));
    }
}

TEST_CASE("equivariant assembly handles several orbits", "[qfs]") {
    // G = <swap(0,1)> on three coordinates: orbits {0,1} and {2}.
    PermGroup G = PermGroup::from_generators({perm({1, 0, 2})});
    REQUIRE(orbits(G).size() == 2);

    auto part01 = [](const Point& y) { return y[0] * 2.0; };          // Stab(0) is trivial
    auto part2 = [](const Point& y) { return y[2] + y[0] * y[1]; };   // Stab(2) = G, symmetric
    CosetSystem tau01 = coset_representatives(stabilizer(G, 0), G);
    CosetSystem tau2 = coset_representatives(stabilizer(G, 2), G);

    auto F = equivariant_from_invariants(G, {part01, part2}, {tau01, tau2});
    auto eng = make_engine(21, 0);
    for (int trial = 0; trial < 100; ++trial) {
        Point x = random_point(3, eng);
        Point out = F(x);
        CHECK(out[0] == x[0] * 2.0);
        CHECK(out[1] == x[1] * 2.0);
        CHECK(out[2] == x[2] + x[0] * x[1]);
        for (const auto& g : G.elements()) {
            Point lhs = F(g.act(x));
            Point rhs = g.act(out);
            for (int i = 0; i < 3; ++i) CHECK(lhs[i] == Catch::Approx(rhs[i]).margin(1e-12));
        }
    }
}

TEST_CASE("equivariant assembly rejects malformed wiring", "[qfs]") {
    PermGroup C3 = PermGroup::named(NamedGroup::cyclic, 3);
    CosetSystem taus = coset_representatives(stabilizer(C3, 0), C3);
    auto part = [](const Point& y) { return y[0]; };

    SECTION("part/orbit count mismatch") {
        CHECK_THROWS_AS(equivariant_from_invariants(C3, {part, part}, {taus, taus}),
                        std::invalid_argument);
        CHECK_THROWS_AS(equivariant_from_invariants(C3, {}, {}), std::invalid_argument);
    }
    SECTION("empty part") {
        CHECK_THROWS_AS(equivariant_from_invariants(C3, {nullptr}, {taus}),
                        std::invalid_argument);
    }
    SECTION("representative outside the group") {
        CosetSystem forged;
        forged.degree = 3;
        forged.subgroup_order = 1;
        forged.representatives = {Permutation::identity(3), perm({1, 0, 2}), perm({2, 1, 0})};
        CHECK_THROWS_AS(equivariant_from_invariants(C3, {part}, {forged}),
                        std::invalid_argument);
    }
    SECTION("two representatives aimed at one coordinate") {
        // S_3 with Stab(0) of order 2 needs three representatives; here both the
        // identity and the swap (1 2) leave the anchor at coordinate 0.
        CosetSystem forged;
        forged.degree = 3;
        forged.subgroup_order = 2;
        forged.representatives = {Permutation::identity(3), perm({0, 2, 1}), perm({1, 2, 0})};
        PermGroup S3 = PermGroup::named(NamedGroup::symmetric, 3);
        CHECK_THROWS_WITH(equivariant_from_invariants(S3, {part}, {forged}),
                          Catch::Matchers::ContainsSubstring("one coordinate"));
    }
    SECTION("wrong input dimension at call time") {
        auto F = equivariant_from_invariants(C3, {part}, {taus});
        CHECK_THROWS_AS(F({0.1, 0.2}), std::invalid_argument);
    }
}
