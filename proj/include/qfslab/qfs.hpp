#pragma once

// Geometry of the quotient of a box/vector space by a permutation group G:
// orbits of points, a canonical representative per orbit, the quotient metric,
// membership tests for the fundamental domains, and the two bridges between
// invariant and equivariant functions.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>
#include <vector>

#include "qfslab/permgroup.hpp"

namespace qfslab {

using Point = std::vector<double>;

namespace detail {
inline void require_finite(const Point& x, const char* who) {
    for (double v : x)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string(who) + ": non-finite entry");
}
inline void require_degree(const PermGroup& G, const Point& x, const char* who) {
    if (static_cast<int>(x.size()) != G.degree())
        throw std::invalid_argument(std::string(who) + ": point dimension != group degree");
    require_finite(x, who);
}

// Lexicographic compare of g.x against y without materializing g.x:
// (g.x)_i = x[ginv(i)]. Returns <0, 0, >0.
inline int lex_cmp_acted(const Permutation& ginv, const Point& x, const Point& y) {
    int n = static_cast<int>(x.size());
    for (int i = 0; i < n; ++i) {
        double a = x[ginv(i)];
        if (a < y[i]) return -1;
        if (a > y[i]) return 1;
    }
    return 0;
}
}  // namespace detail

// All distinct images of x under G, sorted lexicographically.
inline std::vector<Point> orbit(const PermGroup& G, const Point& x) {
    detail::require_degree(G, x, "orbit");
    std::set<Point> out;
    for (const auto& g : G.elements()) out.insert(g.act(x));
    return std::vector<Point>(out.begin(), out.end());
}

struct OrbitRep {
    Point canonical;              // lexicographic maximum of the orbit
    std::size_t stabilized_by;    // number of g in G with g.x == x
};

// Canonical representative: the lexicographic maximum over the orbit. For the
// full symmetric group this is the descending sort of x, taken as a fast path.
inline OrbitRep canonical_rep(const PermGroup& G, const Point& x) {
    detail::require_degree(G, x, "canonical_rep");
    if (G.is_full_symmetric()) {
        OrbitRep rep{x, 1};
        std::sort(rep.canonical.begin(), rep.canonical.end(), std::greater<double>());
        // |Stab(x)| = product of multiplicities of tied values.
        std::size_t stab = 1, run = 1;
        for (std::size_t i = 1; i < rep.canonical.size(); ++i) {
            if (rep.canonical[i] == rep.canonical[i - 1]) {
                ++run;
                stab *= run;
            } else {
                run = 1;
            }
        }
        rep.stabilized_by = stab;
        return rep;
    }
    const Permutation* best = nullptr;
    std::size_t stab = 0;
    for (const auto& g : G.elements()) {
        Permutation ginv = g.inverse();
        if (detail::lex_cmp_acted(ginv, x, x) == 0) ++stab;
        if (best == nullptr) {
            best = &g;
            continue;
        }
        // Compare g.x against best.x: evaluate both lazily per coordinate.
        Permutation binv = best->inverse();
        int n = static_cast<int>(x.size());
        for (int i = 0; i < n; ++i) {
            double a = x[ginv(i)], b = x[binv(i)];
            if (a > b) {
                best = &g;
                break;
            }
            if (a < b) break;
        }
    }
    return OrbitRep{best->act(x), stab};
}

// True iff no group element moves x to a lexicographically larger point, i.e.
// x is its own canonical representative. Cheaper than canonical_rep.
inline bool is_canonical(const PermGroup& G, const Point& x) {
    detail::require_degree(G, x, "is_canonical");
    if (G.is_full_symmetric()) {
        for (std::size_t i = 1; i < x.size(); ++i)
            if (x[i - 1] < x[i]) return false;
        return true;
    }
    for (const auto& g : G.elements()) {
        if (detail::lex_cmp_acted(g.inverse(), x, x) > 0) return false;
    }
    return true;
}

// Metric on the quotient: d_G(x, y) = min over g in G of |x - g.y|_2.
// Symmetric because |x - g.y| = |g^{-1}.x - y|.
inline double quotient_distance(const PermGroup& G, const Point& x, const Point& y) {
    detail::require_degree(G, x, "quotient_distance");
    detail::require_degree(G, y, "quotient_distance");
    double best = std::numeric_limits<double>::infinity();
    int n = G.degree();
    for (const auto& g : G.elements()) {
        Permutation ginv = g.inverse();
        double s = 0.0;
        for (int i = 0; i < n; ++i) {
            double d = x[i] - y[ginv(i)];
            s += d * d;
        }
        if (s < best) best = s;
    }
    return std::sqrt(best);
}

// Membership in the descending cone {x : x_1 >= x_2 >= ... >= x_n} (closed).
inline bool in_descending_domain(const Point& x) {
    detail::require_finite(x, "in_descending_domain");
    for (std::size_t i = 1; i < x.size(); ++i)
        if (x[i - 1] < x[i]) return false;
    return true;
}

namespace detail {
inline std::uint64_t factorial_u64(int n) {
    if (n > 20) throw std::invalid_argument("factorial_u64: n too large");
    std::uint64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= static_cast<std::uint64_t>(i);
    return f;
}
inline void require_coset_system(const PermGroup& G, const CosetSystem& cosets, const char* who) {
    if (cosets.degree != G.degree())
        throw std::invalid_argument(std::string(who) + ": coset system degree != group degree");
    if (cosets.subgroup_order != G.order())
        throw std::invalid_argument(std::string(who) + ": coset system was built for a subgroup "
                                                       "of a different order");
    if (cosets.count() * cosets.subgroup_order != factorial_u64(G.degree()))
        throw std::invalid_argument(std::string(who) +
                                    ": not a complete system of representatives of G\\S_n");
}
}  // namespace detail

// Membership in the union of the translates g_k.{descending cone} over a complete
// system of coset representatives for G\S_n. This union is a fundamental domain
// for the G-action on the box.
inline bool in_fundamental_domain(const PermGroup& G, const CosetSystem& cosets, const Point& x) {
    detail::require_degree(G, x, "in_fundamental_domain");
    detail::require_coset_system(G, cosets, "in_fundamental_domain");
    int n = G.degree();
    for (const auto& g : cosets.representatives) {
        // x in g.{cone} iff g^{-1}.x is non-increasing, i.e. x_{g(0)} >= x_{g(1)} >= ...
        bool ok = true;
        for (int i = 1; i < n && ok; ++i)
            if (x[g(i - 1)] < x[g(i)]) ok = false;
        if (ok) return true;
    }
    return false;
}

// Turn any function on canonical representatives into a G-invariant function on
// the whole space. Invariance is exact to the bit: the canonical representative
// is a reordering of x, selected without arithmetic on the entries.
inline std::function<double(const Point&)> lift_invariant(
    const PermGroup& G, std::function<double(const Point&)> f) {
    if (!f) throw std::invalid_argument("lift_invariant: empty function");
    return [G, f = std::move(f)](const Point& x) { return f(canonical_rep(G, x).canonical); };
}

// Assemble a G-equivariant map from per-orbit invariant pieces.
//
// For each orbit O_j of the index set, anchored at its smallest index a_j,
// parts[j] must be invariant under the stabilizer of a_j, and taus[j] must be a
// complete system of representatives for Stab(a_j)\G (e.g. from
// coset_representatives(stabilizer(G, a_j), G)). Each representative tau fixes
// the output coordinate i = tau^{-1}(a_j), and that component is
// F_i(x) = parts[j](tau.x). Then F(g.x) = g.F(x) for every g in G.
inline std::function<Point(const Point&)> equivariant_from_invariants(
    const PermGroup& G, const std::vector<std::function<double(const Point&)>>& parts,
    const std::vector<CosetSystem>& taus) {
    std::vector<std::vector<int>> orbs = orbits(G);
    if (parts.size() != orbs.size() || taus.size() != orbs.size())
        throw std::invalid_argument(
            "equivariant_from_invariants: need exactly one part and one coset system per orbit");

    int n = G.degree();
    // component_of[i] = (orbit index, representative) wired at construction time.
    std::vector<int> part_of(n, -1);
    std::vector<Permutation> tau_of(n, Permutation::identity(n));
    for (std::size_t j = 0; j < orbs.size(); ++j) {
        int anchor = orbs[j].front();
        PermGroup stab = stabilizer(G, anchor);
        if (taus[j].degree != n || taus[j].subgroup_order != stab.order() ||
            taus[j].count() * stab.order() != G.order())
            throw std::invalid_argument(
                "equivariant_from_invariants: taus[" + std::to_string(j) +
                "] is not a coset system for Stab(anchor)\\G");
        for (const auto& tau : taus[j].representatives) {
            if (!G.contains(tau))
                throw std::invalid_argument(
                    "equivariant_from_invariants: representative outside the group");
            int i = tau.inverse()(anchor);
            if (part_of[i] != -1)
                throw std::invalid_argument(
                    "equivariant_from_invariants: two representatives target one coordinate");
            part_of[i] = static_cast<int>(j);
            tau_of[i] = tau;
        }
        if (!parts[j]) throw std::invalid_argument("equivariant_from_invariants: empty part");
    }
    for (int i = 0; i < n; ++i)
        if (part_of[i] == -1)
            throw std::invalid_argument("equivariant_from_invariants: coordinate " +
                                        std::to_string(i) + " not covered by any representative");

    return [parts, part_of, tau_of](const Point& x) {
        if (x.size() != part_of.size())
            throw std::invalid_argument("equivariant map: wrong input dimension");
        detail::require_finite(x, "equivariant map");
        Point out(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            out[i] = parts[part_of[i]](tau_of[i].act(x));
        return out;
    };
}

}  // namespace qfslab
