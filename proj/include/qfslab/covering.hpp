#pragma once

// Volume and covering-number machinery for quotient fundamental domains:
// exact counting of grid cubes that touch the domain, Monte-Carlo volume
// estimation, and the closed-form covering bounds.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfslab/logscale.hpp"
#include "qfslab/permgroup.hpp"
#include "qfslab/qfs.hpp"
#include "qfslab/rng.hpp"

namespace qfslab {

struct CoveringEstimate {
    double value = 0.0;       // cube count, volume fraction, or formula value
    enum class Method { lattice, monte_carlo, analytic } method = Method::lattice;
    double parameter = 0.0;   // q (lattice), sample count (MC), or epsilon (analytic)
    double std_error = 0.0;   // binomial std error for MC, 0 otherwise
};

inline const char* to_string(CoveringEstimate::Method m) {
    switch (m) {
        case CoveringEstimate::Method::lattice: return "lattice";
        case CoveringEstimate::Method::monte_carlo: return "monte_carlo";
        case CoveringEstimate::Method::analytic: return "analytic";
    }
    return "?";
}

inline void to_json(nlohmann::json& j, const CoveringEstimate& e) {
    j = nlohmann::json{{"value", e.value},
                       {"method", to_string(e.method)},
                       {"parameter", e.parameter},
                       {"std_error", e.std_error}};
}

namespace detail {

// Does the closed cube with 0-based index vector idx (side 1/q) meet the cone
// x_{s(0)} >= x_{s(1)} >= ... >= x_{s(n-1)}?  Greedy in exact integer units of
// 1/q: put the leading coordinate at its upper face, each later one as high as
// the chain allows; feasible iff nobody is pushed below its lower face.
inline bool cube_meets_cone(const std::vector<int>& idx, const int* order, int n) {
    int v = idx[order[0]] + 1;
    for (int i = 1; i < n; ++i) {
        int up = idx[order[i]] + 1;
        if (up < v) v = up;
        if (v < idx[order[i]]) return false;
    }
    return true;
}

inline void check_cube_budget(int n, int q, double budget) {
    if (n < 1 || q < 1) throw std::invalid_argument("cube_count: need n >= 1 and q >= 1");
    double cells = std::pow(static_cast<double>(q), n);
    if (cells > budget)
        throw std::runtime_error("cube_count: q^n = " + std::to_string(cells) +
                                 " exceeds enumeration budget; use mc_fundamental_volume");
}

template <typename CubeTest>
std::uint64_t count_cubes(int n, int q, CubeTest&& test) {
    std::vector<int> idx(n, 0);
    std::uint64_t count = 0;
    for (;;) {
        if (test(idx)) ++count;
        int d = n - 1;
        while (d >= 0 && idx[d] == q - 1) idx[d--] = 0;
        if (d < 0) break;
        ++idx[d];
    }
    return count;
}

}  // namespace detail

// Number of closed side-(1/q) grid cubes of [0,1]^n meeting the descending cone
// {x_1 >= ... >= x_n}. count/q^n -> 1/n! as q grows.
inline CoveringEstimate cube_count(int n, int q, double budget = 1e8) {
    detail::check_cube_budget(n, q, budget);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::uint64_t c = detail::count_cubes(
        n, q, [&](const std::vector<int>& idx) { return detail::cube_meets_cone(idx, order.data(), n); });
    return CoveringEstimate{static_cast<double>(c), CoveringEstimate::Method::lattice,
                            static_cast<double>(q), 0.0};
}

// Same count for the translated fundamental domain of G: the union of g_k.cone
// over a complete system of coset representatives for G\S_n. A cube counts once
// if it meets any translate.
inline CoveringEstimate cube_count(const PermGroup& G, const CosetSystem& cosets, int q,
                                   double budget = 1e8) {
    detail::require_coset_system(G, cosets, "cube_count");
    int n = G.degree();
    detail::check_cube_budget(n, q, budget);
    // x in g.cone iff x_{g(0)} >= ... >= x_{g(n-1)}.
    std::vector<std::vector<int>> orders;
    for (const auto& g : cosets.representatives) orders.push_back(g.images());
    std::uint64_t c = detail::count_cubes(n, q, [&](const std::vector<int>& idx) {
        for (const auto& ord : orders)
            if (detail::cube_meets_cone(idx, ord.data(), n)) return true;
        return false;
    });
    return CoveringEstimate{static_cast<double>(c), CoveringEstimate::Method::lattice,
                            static_cast<double>(q), 0.0};
}

// Fraction of uniform draws from [0,1]^n that are their own canonical
// representative; estimates the fundamental-domain volume, which is 1/|G| for
// actions free almost everywhere. Samples are drawn in fixed-size blocks with
// per-block RNG streams, so the estimate depends only on (seed, samples).
inline CoveringEstimate mc_fundamental_volume(const PermGroup& G, std::uint64_t samples,
                                              std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("mc_fundamental_volume: samples >= 1 required");
    const std::uint64_t block = 65536;
    int n = G.degree();
    Point x(n);
    std::uint64_t hits = 0;
    for (std::uint64_t b = 0, done = 0; done < samples; ++b) {
        auto eng = make_engine(seed, b);
        std::uint64_t take = std::min(block, samples - done);
        for (std::uint64_t s = 0; s < take; ++s) {
            for (int i = 0; i < n; ++i) x[i] = uniform01(eng);
            if (is_canonical(G, x)) ++hits;
        }
        done += take;
    }
    double p = static_cast<double>(hits) / static_cast<double>(samples);
    double se = std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
    return CoveringEstimate{p, CoveringEstimate::Method::monte_carlo,
                            static_cast<double>(samples), se};
}

// log10 of the covering bound C / (|G| eps^n). With |G| = n! this is the
// covering bound for the sorted cone itself.
inline double analytic_covering_bound_log10(int n, const GroupOrder& group_order, double epsilon,
                                            double C = 1.0) {
    if (n < 1) throw std::invalid_argument("analytic_covering_bound: n >= 1 required");
    if (!(epsilon > 0.0) || !(C > 0.0))
        throw std::invalid_argument("analytic_covering_bound: epsilon and C must be positive");
    return std::log10(C) - group_order.log10_value() - n * std::log10(epsilon);
}

// Linear-space value; +inf/0 when outside double range.
inline CoveringEstimate analytic_covering_bound(int n, const GroupOrder& group_order,
                                                double epsilon, double C = 1.0) {
    double l10 = analytic_covering_bound_log10(n, group_order, epsilon, C);
    return CoveringEstimate{std::pow(10.0, l10), CoveringEstimate::Method::analytic, epsilon, 0.0};
}

// Right-hand side of the function-class covering bound: N_delta * ln(8 c^2 B / delta),
// in natural log. N_delta is a domain covering count at resolution delta; B bounds the
// function values; c is the universal constant. C_lip (the Lipschitz constant of the
// class) does not enter the value — it sets the radius 2*C_lip*delta at which the
// bound applies — but is validated here so reports can carry it.
inline double function_class_log_covering(double N_delta, double C_lip, double B, double delta,
                                          double c = 1.0) {
    if (N_delta < 0.0) throw std::invalid_argument("function_class_log_covering: N_delta < 0");
    if (!(C_lip > 0.0) || !(B > 0.0) || !(delta > 0.0) || !(c > 0.0))
        throw std::invalid_argument("function_class_log_covering: parameters must be positive");
    double ratio = 8.0 * c * c * B / delta;
    if (ratio <= 1.0)
        throw std::runtime_error(
            "function_class_log_covering: 8c^2B/delta <= 1, the bound is vacuous");
    if (N_delta == 0.0) return 0.0;
    return N_delta * std::log(ratio);
}

}  // namespace qfslab
