#pragma once

// Numeric evaluation of the generalization bounds, with term-by-term breakdown.
// All magnitudes are carried in log space (natural log internally, log10 in
// reports): the interesting regimes involve factors like 1/sqrt(100!) that no
// native float can hold.

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfslab/logscale.hpp"

namespace qfslab {

struct BoundReport {
    std::string kind;          // "invariant" | "equivariant" | "nontransitive"
    int n = 0;
    double m = 0.0;
    double epsilon = 0.0;
    double C = 1.0;
    // ln-scale orders: group order for the invariant bound, stabilizer order(s)
    // for the equivariant bounds.
    double group_order_log10 = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> stab_order_log10;

    double main_term_log10 = 0.0;
    double confidence_term_log10 = 0.0;
    double total_log10 = 0.0;
    double total = 0.0;        // linear-space sum; 0/inf outside double range
    double probability = 0.0;  // the bound holds with probability 1 - 2*epsilon
};

inline void to_json(nlohmann::json& j, const BoundReport& r) {
    j = nlohmann::json{{"kind", r.kind},
                       {"n", r.n},
                       {"m", r.m},
                       {"epsilon", r.epsilon},
                       {"C", r.C},
                       {"group_order_log10", r.group_order_log10},
                       {"stab_order_log10", r.stab_order_log10},
                       {"main_term_log10", r.main_term_log10},
                       {"confidence_term_log10", r.confidence_term_log10},
                       {"total_log10", r.total_log10},
                       {"total", r.total},
                       {"probability", r.probability}};
    if (std::isnan(r.group_order_log10)) j["group_order_log10"] = nullptr;
}

namespace detail {
inline void check_bound_inputs(int n, double m, double epsilon, double C, const char* who) {
    if (n < 1) throw std::invalid_argument(std::string(who) + ": n >= 1 required");
    if (!(m >= 1.0)) throw std::invalid_argument(std::string(who) + ": m >= 1 required");
    if (!(C > 0.0)) throw std::invalid_argument(std::string(who) + ": C > 0 required");
    if (!(epsilon > 0.0) || epsilon >= 0.5)
        throw std::invalid_argument(std::string(who) +
                                    ": epsilon must lie in (0, 1/2); log(1/2eps) <= 0 otherwise");
}
}  // namespace detail

// log10 of sqrt(10^log10_numerator / m^{2/n}). Shared by all three main terms so
// that their consistency identities hold bit-for-bit.
inline double half_log10_over_m_power(double log10_numerator, int n, double m) {
    return 0.5 * (log10_numerator - (2.0 / n) * std::log10(m));
}

// log10 of sqrt(2*ln(1/(2 eps))/m), the sample-confidence term shared by every
// bound; independent of the group.
inline double confidence_term_log10(double m, double epsilon) {
    return 0.5 * std::log10(2.0 * std::log(1.0 / (2.0 * epsilon)) / m);
}

namespace detail {
inline void finish_report(BoundReport& r) {
    r.total_log10 = log10_add(r.main_term_log10, r.confidence_term_log10);
    r.total = std::fabs(r.total_log10) < 300.0 ? std::pow(10.0, r.total_log10)
              : (r.total_log10 > 0 ? std::numeric_limits<double>::infinity() : 0.0);
    r.probability = 1.0 - 2.0 * r.epsilon;
}
}  // namespace detail

// Bound for G-invariant networks: sqrt(C/(|G| m^{2/n})) + sqrt(2 ln(1/2eps)/m).
inline BoundReport invariant_bound(int n, const GroupOrder& group_order, double m, double epsilon,
                                   double C = 1.0) {
    detail::check_bound_inputs(n, m, epsilon, C, "invariant_bound");
    BoundReport r;
    r.kind = "invariant";
    r.n = n;
    r.m = m;
    r.epsilon = epsilon;
    r.C = C;
    r.group_order_log10 = group_order.log10_value();
    r.main_term_log10 =
        half_log10_over_m_power(std::log10(C) - group_order.log10_value(), n, m);
    r.confidence_term_log10 = confidence_term_log10(m, epsilon);
    detail::finish_report(r);
    return r;
}

// Bound for equivariant networks under a transitive action, driven by the
// stabilizer order: sqrt(C~/(|St(G)| m^{2/n})) + confidence. The caller is
// responsible for the transitivity of G (see permgroup::is_transitive).
inline BoundReport equivariant_bound(int n, const GroupOrder& stab_order, double m, double epsilon,
                                     double C_tilde = 1.0) {
    detail::check_bound_inputs(n, m, epsilon, C_tilde, "equivariant_bound");
    BoundReport r;
    r.kind = "equivariant";
    r.n = n;
    r.m = m;
    r.epsilon = epsilon;
    r.C = C_tilde;
    r.stab_order_log10 = {stab_order.log10_value()};
    r.main_term_log10 =
        half_log10_over_m_power(std::log10(C_tilde) - stab_order.log10_value(), n, m);
    r.confidence_term_log10 = confidence_term_log10(m, epsilon);
    detail::finish_report(r);
    return r;
}

// Equivariant bound without the transitivity assumption: the main term sums
// c~/|Stab_G(j)| over one representative j per orbit. A single orbit reduces
// exactly (bitwise) to equivariant_bound.
inline BoundReport nontransitive_equivariant_bound(int n, const std::vector<GroupOrder>& stab_orders,
                                                   double m, double epsilon, double c_tilde = 1.0) {
    detail::check_bound_inputs(n, m, epsilon, c_tilde, "nontransitive_equivariant_bound");
    if (stab_orders.empty())
        throw std::invalid_argument("nontransitive_equivariant_bound: need at least one orbit");
    BoundReport r;
    r.kind = "nontransitive";
    r.n = n;
    r.m = m;
    r.epsilon = epsilon;
    r.C = c_tilde;
    std::vector<double> terms;
    for (const auto& st : stab_orders) {
        r.stab_order_log10.push_back(st.log10_value());
        terms.push_back(std::log10(c_tilde) - st.log10_value());
    }
    r.main_term_log10 = half_log10_over_m_power(log10_sum(terms), n, m);
    r.confidence_term_log10 = confidence_term_log10(m, epsilon);
    detail::finish_report(r);
    return r;
}

inline double ordinary_bound(double m) {
    if (!(m >= 1.0)) throw std::invalid_argument("ordinary_bound: m >= 1 required");
    return 1.0 / std::sqrt(m);
}

inline double ordinary_bound_log10(double m) {
    if (!(m >= 1.0)) throw std::invalid_argument("ordinary_bound: m >= 1 required");
    return -0.5 * std::log10(m);
}

// ---------------------------------------------------------------------------
// Dudley entropy integral.

struct DudleyOptions {
    int alpha_points = 256;   // grid for the outer minimization over alpha
    int quad_nodes = 1024;    // composite-trapezoid subintervals
    // Upper integration limit: the sup-norm radius scale of the function class
    // (B for classes bounded by B). The covering contribution lives below this
    // radius; a single ball covers the class above it.
    double delta_max = 1.0;
};

struct DudleyBreakdown {
    double alpha_star = 0.0;
    double entropy_term = 0.0;     // inf_alpha {4a + (12/sqrt m) Int sqrt(2(ln2+logN))}
    double confidence_term = 0.0;  // sqrt(2 ln(1/2eps)/m)
    double total = 0.0;
};

namespace detail {
inline double dudley_integrand(const std::function<double(double)>& log_covering, double delta) {
    double lc = log_covering(delta);
    if (!std::isfinite(lc))
        throw std::runtime_error("dudley_bound: non-finite log_covering at delta = " +
                                 std::to_string(delta));
    double radicand = 2.0 * (std::log(2.0) + lc);
    if (radicand < 0.0)
        throw std::runtime_error("dudley_bound: log_covering below -ln 2 at delta = " +
                                 std::to_string(delta) + " (a covering count is >= 1)");
    return std::sqrt(radicand);
}
}  // namespace detail

inline DudleyBreakdown dudley_detail(const std::function<double(double)>& log_covering, double m,
                                     double epsilon, DudleyOptions opt = {}) {
    if (!(m >= 1.0)) throw std::invalid_argument("dudley_bound: m >= 1 required");
    if (!(epsilon > 0.0) || epsilon >= 0.5)
        throw std::invalid_argument("dudley_bound: epsilon must lie in (0, 1/2)");
    if (opt.alpha_points < 2 || opt.quad_nodes < 2)
        throw std::invalid_argument("dudley_bound: grid resolutions too small");
    double dmax = std::min(opt.delta_max, std::sqrt(m));
    if (!(dmax > 0.0)) throw std::invalid_argument("dudley_bound: delta_max must be positive");

    // The covering function must be non-increasing; spot-check on a coarse grid.
    {
        double prev = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 64; ++i) {
            double d = dmax * std::pow(1e-6, 1.0 - i / 64.0);
            double lc = log_covering(d);
            if (!std::isfinite(lc))
                throw std::runtime_error("dudley_bound: non-finite log_covering at delta = " +
                                         std::to_string(d));
            if (lc > prev + 1e-9 * (1.0 + std::fabs(prev)))
                throw std::invalid_argument("dudley_bound: log_covering increases in delta");
            prev = lc;
        }
    }

    // Alpha grid: 0 plus log-spaced points up to dmax.
    std::vector<double> alphas{0.0};
    for (int i = 0; i < opt.alpha_points - 1; ++i) {
        double t = static_cast<double>(i) / (opt.alpha_points - 2);
        alphas.push_back(dmax * std::pow(1e-4, 1.0 - t));
    }

    const double scale = 12.0 / std::sqrt(m);
    DudleyBreakdown out;
    out.entropy_term = std::numeric_limits<double>::infinity();
    for (double a : alphas) {
        double integral = 0.0;
        if (a < dmax) {
            double h = (dmax - a) / opt.quad_nodes;
            // At alpha = 0 a divergent integrand means this alpha is simply not
            // the infimum; it is not an input error.
            double f_lo;
            if (a == 0.0) {
                double lc0 = log_covering(0.0);
                if (!std::isfinite(lc0)) continue;
                f_lo = std::sqrt(2.0 * (std::log(2.0) + lc0));
                if (!std::isfinite(f_lo)) continue;
            } else {
                f_lo = detail::dudley_integrand(log_covering, a);
            }
            double acc = 0.5 * (f_lo + detail::dudley_integrand(log_covering, dmax));
            for (int i = 1; i < opt.quad_nodes; ++i)
                acc += detail::dudley_integrand(log_covering, a + h * i);
            integral = acc * h;
        }
        double value = 4.0 * a + scale * integral;
        if (value < out.entropy_term) {
            out.entropy_term = value;
            out.alpha_star = a;
        }
    }
    out.confidence_term = std::sqrt(2.0 * std::log(1.0 / (2.0 * epsilon)) / m);
    out.total = out.entropy_term + out.confidence_term;
    return out;
}

inline double dudley_bound(const std::function<double(double)>& log_covering, double m,
                           double epsilon, DudleyOptions opt = {}) {
    return dudley_detail(log_covering, m, epsilon, opt).total;
}

// Covering chain used to compare the Dudley route against the closed-form main
// term: domain cube count C/(|G| delta^n) (at least one cube), fed through the
// function-class covering factor ln(8c^2 B/delta), clamped at 0 where the
// formula goes vacuous (a covering count never drops below 1).
inline std::function<double(double)> chained_log_covering(int n, const GroupOrder& group_order,
                                                          double C = 1.0, double B = 1.0,
                                                          double c = 1.0) {
    if (n < 1) throw std::invalid_argument("chained_log_covering: n >= 1 required");
    if (!(C > 0.0) || !(B > 0.0) || !(c > 0.0))
        throw std::invalid_argument("chained_log_covering: constants must be positive");
    double ln_C = std::log(C);
    double ln_order = group_order.log_value();
    double log_8ccB = std::log(8.0 * c * c * B);
    return [=](double delta) -> double {
        if (delta <= 0.0) return std::numeric_limits<double>::infinity();
        double ln_count = ln_C - ln_order - n * std::log(delta);
        double count = ln_count > 0.0 ? std::exp(ln_count) : 1.0;
        double factor = log_8ccB - std::log(delta);
        double v = count * factor;
        return v > 0.0 ? v : 0.0;
    };
}

// ---------------------------------------------------------------------------
// Curve tables for the figures.

struct CurveRow {
    int n = 0;
    double m = 0.0;
    double group_order_log10 = std::numeric_limits<double>::quiet_NaN();
    double stab_order_log10 = std::numeric_limits<double>::quiet_NaN();
    double main_log10 = 0.0;
    double conf_log10 = 0.0;
    double total_log10 = 0.0;
    double ordinary_log10 = 0.0;
};

// One row per (n, m) over a log-spaced m grid, using the invariant bound with
// the given group order per n. group_orders must parallel n_list.
inline std::vector<CurveRow> theory_curves(const std::vector<int>& n_list,
                                           const std::vector<GroupOrder>& group_orders,
                                           double m_min, double m_max, int points, double C = 1.0,
                                           double epsilon = 0.05) {
    if (n_list.size() != group_orders.size())
        throw std::invalid_argument("theory_curves: n_list and group_orders must align");
    if (!(m_min >= 1.0) || !(m_max >= m_min) || points < 1)
        throw std::invalid_argument("theory_curves: bad m grid");
    std::vector<CurveRow> rows;
    for (std::size_t k = 0; k < n_list.size(); ++k) {
        for (int i = 0; i < points; ++i) {
            double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
            double m = m_min * std::pow(m_max / m_min, t);
            BoundReport r = invariant_bound(n_list[k], group_orders[k], m, epsilon, C);
            CurveRow row;
            row.n = n_list[k];
            row.m = m;
            row.group_order_log10 = group_orders[k].log10_value();
            row.main_log10 = r.main_term_log10;
            row.conf_log10 = r.confidence_term_log10;
            row.total_log10 = r.total_log10;
            row.ordinary_log10 = ordinary_bound_log10(m);
            rows.push_back(row);
        }
    }
    return rows;
}

inline const char* bounds_csv_header() {
    return "n,m,group_order,stab_order,main_log10,conf_log10,total_log10,ordinary_log10";
}

inline std::string to_csv_row(const CurveRow& r) {
    char buf[320];
    std::string go = std::isnan(r.group_order_log10) ? "" : format_pow10(r.group_order_log10);
    std::string so = std::isnan(r.stab_order_log10) ? "" : format_pow10(r.stab_order_log10);
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%s,%s,%.17g,%.17g,%.17g,%.17g", r.n, r.m, go.c_str(),
                  so.c_str(), r.main_log10, r.conf_log10, r.total_log10, r.ordinary_log10);
    return buf;
}

inline std::string to_csv(const std::vector<CurveRow>& rows) {
    std::string out = bounds_csv_header();
    out += '\n';
    for (const auto& r : rows) {
        out += to_csv_row(r);
        out += '\n';
    }
    return out;
}

inline CurveRow to_curve_row(const BoundReport& r) {
    CurveRow row;
    row.n = r.n;
    row.m = r.m;
    row.group_order_log10 = r.group_order_log10;
    if (!r.stab_order_log10.empty()) row.stab_order_log10 = r.stab_order_log10.front();
    row.main_log10 = r.main_term_log10;
    row.conf_log10 = r.confidence_term_log10;
    row.total_log10 = r.total_log10;
    row.ordinary_log10 = ordinary_bound_log10(r.m);
    return row;
}

}  // namespace qfslab
