// Command-line front end for the library. One binary, five subcommands:
//
//   bounds      generalization-bound reports and bound-vs-m curves
//   covering    covering/volume estimates: lattice counts, Monte Carlo, formula
//   qfs         quotient-space utilities: distance, canonical form, orbit
//   sortnet     exact ReLU sorting networks: build, verify, export
//   experiment  the invariance-vs-gap training study and its plot data
//
// Results go to stdout as JSON (or CSV where noted); diagnostics to stderr.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qfslab/bounds.hpp"
#include "qfslab/covering.hpp"
#include "qfslab/experiment.hpp"
#include "qfslab/logscale.hpp"
#include "qfslab/permgroup.hpp"
#include "qfslab/qfs.hpp"
#include "qfslab/relunet.hpp"
#include "qfslab/rng.hpp"

using namespace qfslab;

namespace {

// Accepts "720", "1e12", or "N!" (e.g. "6!" for 720). The factorial form stays
// exact in log scale far beyond the range of doubles.
GroupOrder parse_order(const std::string& text) {
    if (text.empty()) throw CLI::ValidationError("group order", "empty order");
    if (text.back() == '!') {
        int n = 0;
        try {
            std::size_t used = 0;
            n = std::stoi(text.substr(0, text.size() - 1), &used);
            if (used != text.size() - 1) throw std::invalid_argument(text);
        } catch (const std::exception&) {
            throw CLI::ValidationError("group order", "cannot parse '" + text + "' as N!");
        }
        return GroupOrder::factorial(n);
    }
    try {
        std::size_t used = 0;
        double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return GroupOrder::from_count(v);
    } catch (const std::exception&) {
        throw CLI::ValidationError("group order", "cannot parse '" + text + "'");
    }
}

// Group specs: "sn" and "cn" use the degree from --n; "gens@file" loads a JSON
// group description (degree + one-based generator images).
PermGroup make_group(const std::string& kind, int n) {
    if (kind == "sn") return PermGroup::named(NamedGroup::symmetric, n);
    if (kind == "cn") return PermGroup::named(NamedGroup::cyclic, n);
    if (kind == "trivial") return PermGroup::named(NamedGroup::trivial, n);
    if (kind.rfind("gens@", 0) == 0) {
        std::string path = kind.substr(5);
        std::ifstream in(path);
        if (!in) throw std::runtime_error("cannot open group file " + path);
        nlohmann::json j;
        in >> j;
        PermGroup G = group_from_json(j);
        if (G.degree() != n)
            throw std::runtime_error("group file degree " + std::to_string(G.degree()) +
                                     " does not match --n " + std::to_string(n));
        return G;
    }
    throw std::runtime_error("unknown group kind '" + kind + "' (want sn, cn, trivial, gens@file)");
}

// Order of the named group without enumerating it, so the analytic
// formulas work at degrees where S_n is far too large to build.
GroupOrder order_of_kind(const std::string& kind, int n) {
    if (kind == "sn") return GroupOrder::factorial(n);
    if (kind == "cn") return GroupOrder::from_count(static_cast<double>(n));
    if (kind == "trivial") return GroupOrder::from_count(1.0);
    return GroupOrder::from_count(static_cast<double>(make_group(kind, n).order()));
}

nlohmann::json point_json(const Point& x) { return nlohmann::json(x); }

void print_json(const nlohmann::json& j) { std::cout << j.dump(2) << "\n"; }

// --- bounds ------------------------------------------------------------------

struct BoundsArgs {
    int n = 0;
    std::string group_order;
    bool equivariant = false;
    std::vector<std::string> stabs;
    double m = 0.0;
    double eps = 0.05;
    double C = 1.0;
    bool csv = false;
    std::vector<double> curves;  // m_min m_max
    int points = 61;
};

void run_bounds(const BoundsArgs& a) {
    if (!a.curves.empty()) {
        if (a.group_order.empty())
            throw std::runtime_error("--curves needs --group-order for the invariant curve");
        auto rows = theory_curves({a.n}, {parse_order(a.group_order)}, a.curves[0], a.curves[1],
                                  a.points, a.C, a.eps);
        std::cout << to_csv(rows);
        return;
    }
    BoundReport r;
    if (a.equivariant) {
        if (a.stabs.empty())
            throw std::runtime_error("--equivariant needs at least one --stab order");
        std::vector<GroupOrder> stabs;
        for (const auto& s : a.stabs) stabs.push_back(parse_order(s));
        r = stabs.size() == 1 ? equivariant_bound(a.n, stabs[0], a.m, a.eps, a.C)
                              : nontransitive_equivariant_bound(a.n, stabs, a.m, a.eps, a.C);
    } else {
        if (a.group_order.empty())
            throw std::runtime_error("need --group-order (or --equivariant with --stab)");
        r = invariant_bound(a.n, parse_order(a.group_order), a.m, a.eps, a.C);
    }
    if (a.csv) {
        std::cout << bounds_csv_header() << "\n" << to_csv_row(to_curve_row(r)) << "\n";
    } else {
        print_json(r);
    }
}

// --- covering ----------------------------------------------------------------

struct CoveringArgs {
    std::string mode;
    std::string group = "sn";
    int n = 0;
    int q = 0;
    std::uint64_t samples = 0;
    std::uint64_t seed = 42;
    double eps = 0.0;
    double C = 1.0;
};

void run_covering(const CoveringArgs& a) {
    nlohmann::json out;
    out["mode"] = a.mode;
    out["group"] = a.group;
    out["n"] = a.n;
    if (a.mode == "lattice") {
        if (a.q < 1) throw std::runtime_error("lattice mode needs --q >= 1");
        CoveringEstimate est;
        GroupOrder order = order_of_kind(a.group, a.n);
        if (a.group == "sn") {
            est = cube_count(a.n, a.q);
        } else {
            PermGroup G = make_group(a.group, a.n);
            PermGroup Sn = PermGroup::named(NamedGroup::symmetric, a.n);
            est = cube_count(G, coset_representatives(G, Sn), a.q);
        }
        out["estimate"] = est;
        out["ratio"] = est.value / std::pow(a.q, a.n);
        out["expected_ratio"] = std::pow(10.0, -order.log10_value());
    } else if (a.mode == "mc") {
        if (a.samples < 1) throw std::runtime_error("mc mode needs --samples >= 1");
        PermGroup G = make_group(a.group, a.n);
        CoveringEstimate est = mc_fundamental_volume(G, a.samples, a.seed);
        out["estimate"] = est;
        out["seed"] = a.seed;
        out["expected_ratio"] = 1.0 / static_cast<double>(G.order());
    } else if (a.mode == "analytic") {
        if (!(a.eps > 0.0)) throw std::runtime_error("analytic mode needs --eps > 0");
        GroupOrder order = order_of_kind(a.group, a.n);
        out["estimate"] = analytic_covering_bound(a.n, order, a.eps, a.C);
        out["log10_value"] = analytic_covering_bound_log10(a.n, order, a.eps, a.C);
    } else {
        throw std::runtime_error("unknown mode '" + a.mode + "' (want lattice, mc, analytic)");
    }
    print_json(out);
}

// --- qfs ---------------------------------------------------------------------

struct QfsArgs {
    std::string group = "sn";
    int n = 0;
    std::vector<double> x;
    std::vector<double> y;
};

void run_qfs(const std::string& action, const QfsArgs& a) {
    PermGroup G = make_group(a.group, a.n);
    if (static_cast<int>(a.x.size()) != a.n)
        throw std::runtime_error("--x must list exactly n coordinates");
    nlohmann::json out;
    out["group"] = a.group;
    out["n"] = a.n;
    if (action == "dist") {
        if (static_cast<int>(a.y.size()) != a.n)
            throw std::runtime_error("dist needs --y with exactly n coordinates");
        out["distance"] = quotient_distance(G, a.x, a.y);
    } else if (action == "canon") {
        OrbitRep rep = canonical_rep(G, a.x);
        out["canonical"] = point_json(rep.canonical);
        out["stabilized_by"] = rep.stabilized_by;
        out["is_canonical"] = is_canonical(G, a.x);
    } else {  // orbit
        nlohmann::json pts = nlohmann::json::array();
        for (const auto& p : orbit(G, a.x)) pts.push_back(point_json(p));
        out["orbit"] = pts;
        out["orbit_size"] = pts.size();
    }
    print_json(out);
}

// --- sortnet -----------------------------------------------------------------

struct SortnetArgs {
    int n = 0;
    std::string check;  // "", "exhaustive", "random"
    int trials = 1000;
    std::uint64_t seed = 42;
    std::string emit;
};

void run_sortnet(const SortnetArgs& a) {
    ReluNetwork net = sort_network(a.n);
    nlohmann::json out;
    out["n"] = a.n;
    out["depth"] = net.depth();
    out["predicted_depth"] = sort_depth_prediction(a.n);
    out["widths"] = net.widths();
    out["nonzero_params"] = net.nonzero_params();

    if (!a.check.empty()) {
        long long mismatches = 0, cases = 0;
        if (a.check == "exhaustive") {
            if (a.n > 8)
                throw std::runtime_error("exhaustive check limited to n <= 8 (n! evaluations); "
                                         "use --check random");
            Point x(a.n);
            for (int i = 0; i < a.n; ++i) x[i] = (i - a.n / 2) * 0.125;
            Point want = x;
            std::sort(want.begin(), want.end(), std::greater<>());
            std::sort(x.begin(), x.end());
            do {
                ++cases;
                if (evaluate(net, x) != want) ++mismatches;
            } while (std::next_permutation(x.begin(), x.end()));
        } else if (a.check == "random") {
            auto eng = make_engine(a.seed, 0);
            for (int t = 0; t < a.trials; ++t) {
                ++cases;
                Point x(a.n);
                for (double& v : x) {
                    // 1/1024-grid values, half drawn from a five-value set to force ties
                    if (eng() % 2)
                        v = static_cast<double>(static_cast<long long>(eng() % 5) - 2) * 0.25;
                    else
                        v = static_cast<double>(static_cast<long long>(eng() % 2049) - 1024) /
                            1024.0;
                }
                Point want = x;
                std::sort(want.begin(), want.end(), std::greater<>());
                if (evaluate(net, x) != want) ++mismatches;
            }
        } else {
            throw std::runtime_error("unknown check '" + a.check + "' (want exhaustive, random)");
        }
        out["check"] = a.check;
        out["cases"] = cases;
        out["mismatches"] = mismatches;
        if (mismatches != 0) {
            print_json(out);
            throw std::runtime_error("sort network mismatched the oracle");
        }
    }

    if (!a.emit.empty()) {
        std::ofstream file(a.emit);
        if (!file) throw std::runtime_error("cannot write " + a.emit);
        file << to_json(net).dump(2) << "\n";
        out["emitted"] = a.emit;
    }
    print_json(out);
}

// --- experiment --------------------------------------------------------------

ExperimentConfig load_config(const std::string& path) {
    if (path.empty()) return ExperimentConfig{};
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path);
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

nlohmann::json summary_json(const std::vector<SummaryRow>& summary, double slope) {
    nlohmann::json rows = nlohmann::json::array();
    std::vector<double> ns, means;
    for (const auto& s : summary) {
        rows.push_back({{"n", s.n},
                        {"mean_log10_gap", s.mean_log10_gap},
                        {"std_log10_gap", s.std_log10_gap},
                        {"theory_log10", s.theory_log10}});
        ns.push_back(s.n);
        means.push_back(s.mean_log10_gap);
    }
    nlohmann::json out;
    out["summary"] = rows;
    out["slope_vs_theory"] = slope;
    try {
        out["spearman_n_vs_gap"] = spearman_rho(ns, means);
    } catch (const std::invalid_argument&) {
        out["spearman_n_vs_gap"] = nullptr;  // fewer than two n values, or constant
    }
    return out;
}

void run_experiment_cmd(const std::string& config_path, const std::string& out_dir) {
    ExperimentConfig cfg = load_config(config_path);
    std::cerr << "running " << cfg.n_list.size() * cfg.seeds.size() << " cells ("
              << cfg.epochs << " epochs each)...\n";
    auto t0 = std::chrono::steady_clock::now();
    ExperimentResult res = run_experiment(cfg);
    double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    emit_plot_data(res, out_dir);
    {
        std::ofstream cfg_out(std::filesystem::path(out_dir) / "config.json");
        nlohmann::json j = cfg;
        cfg_out << j.dump(2) << "\n";
    }
    nlohmann::json out = summary_json(res.summary, res.slope_vs_theory);
    out["out_dir"] = out_dir;
    out["seconds"] = dt;
    print_json(out);
}

void run_plotdata(std::string config_path, const std::string& out_dir, std::string gaps_path) {
    // A run drops its resolved config next to gaps.csv; prefer that over the
    // built-in defaults when the caller does not name a config.
    if (config_path.empty()) {
        auto dropped = std::filesystem::path(out_dir) / "config.json";
        if (std::filesystem::exists(dropped)) config_path = dropped.string();
    }
    ExperimentConfig cfg = load_config(config_path);
    if (gaps_path.empty()) gaps_path = (std::filesystem::path(out_dir) / "gaps.csv").string();
    ExperimentResult res;
    res.config = cfg;
    res.records = read_gaps_csv(gaps_path);

    // n values present in the data, ascending; the config only supplies m_train
    // for the theory overlay.
    std::vector<int> n_list;
    for (const auto& r : res.records)
        if (std::find(n_list.begin(), n_list.end(), r.n) == n_list.end()) n_list.push_back(r.n);
    std::sort(n_list.begin(), n_list.end());

    res.summary = summarize_gaps(res.records, n_list, cfg.m_train);
    std::vector<GroupOrder> orders;
    for (int n : n_list) orders.push_back(GroupOrder::factorial(n));
    res.curves = theory_curves(n_list, orders, 10.0, 1e6, 61, 1.0, 0.05);
    res.slope_vs_theory = theory_slope(res.summary);

    emit_plot_data(res, out_dir);
    nlohmann::json out = summary_json(res.summary, res.slope_vs_theory);
    out["out_dir"] = out_dir;
    out["gaps"] = gaps_path;
    print_json(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quotient-space generalization-bound toolkit"};
    app.require_subcommand(1);

    BoundsArgs ba;
    CLI::App* bounds = app.add_subcommand("bounds", "generalization-bound reports and curves");
    bounds->add_option("--n", ba.n, "input dimension / token count")->required();
    bounds->add_option("--group-order", ba.group_order, "invariance group order (e.g. 720 or 6!)");
    bounds->add_flag("--equivariant", ba.equivariant, "use the stabilizer-based bound");
    bounds->add_option("--stab", ba.stabs,
                       "stabilizer order(s); several values give the per-orbit bound");
    bounds->add_option("--m", ba.m, "sample count");
    bounds->add_option("--eps", ba.eps, "confidence parameter (bound holds w.p. 1-2eps)")->capture_default_str();
    bounds->add_option("--C", ba.C, "covering constant")->capture_default_str();
    bounds->add_flag("--csv", ba.csv, "emit one CSV row instead of JSON");
    bounds->add_option("--curves", ba.curves, "emit a bound-vs-m CSV over [m_min, m_max]")
        ->expected(2);
    bounds->add_option("--points", ba.points, "points in the --curves grid")->capture_default_str();

    CoveringArgs ca;
    CLI::App* covering = app.add_subcommand("covering", "covering/volume estimates");
    covering->add_option("--mode", ca.mode, "lattice, mc, or analytic")->required();
    covering->add_option("--group", ca.group, "sn, cn, trivial, or gens@file.json")->capture_default_str();
    covering->add_option("--n", ca.n, "degree")->required();
    covering->add_option("--q", ca.q, "lattice resolution (cubes per axis)");
    covering->add_option("--samples", ca.samples, "Monte Carlo sample count");
    covering->add_option("--seed", ca.seed, "Monte Carlo seed")->capture_default_str();
    covering->add_option("--eps", ca.eps, "ball radius for the analytic formula");
    covering->add_option("--C", ca.C, "covering constant for the analytic formula")->capture_default_str();

    QfsArgs qa;
    CLI::App* qfs = app.add_subcommand("qfs", "quotient-space utilities");
    qfs->require_subcommand(1);
    std::vector<CLI::App*> qfs_actions;
    for (const char* name : {"dist", "canon", "orbit"}) {
        CLI::App* sub = qfs->add_subcommand(
            name, std::string(name) == "dist"    ? "distance between orbits"
                  : std::string(name) == "canon" ? "canonical orbit representative"
                                                 : "enumerate an orbit");
        sub->add_option("--group", qa.group, "sn, cn, trivial, or gens@file.json")->capture_default_str();
        sub->add_option("--n", qa.n, "degree")->required();
        sub->add_option("--x", qa.x, "point, comma-separated")->required()->delimiter(',');
        if (std::string(name) == "dist")
            sub->add_option("--y", qa.y, "second point, comma-separated")
                ->required()
                ->delimiter(',');
        qfs_actions.push_back(sub);
    }

    SortnetArgs sa;
    CLI::App* sortnet = app.add_subcommand("sortnet", "exact ReLU sorting networks");
    sortnet->add_option("--n", sa.n, "vector length")->required();
    sortnet->add_option("--check", sa.check, "verify against std::sort: exhaustive or random");
    sortnet->add_option("--trials", sa.trials, "vectors for --check random")->capture_default_str();
    sortnet->add_option("--seed", sa.seed, "seed for --check random")->capture_default_str();
    sortnet->add_option("--emit", sa.emit, "write the network as JSON to this file");

    CLI::App* experiment = app.add_subcommand("experiment", "invariance-vs-gap training study");
    experiment->require_subcommand(1);
    std::string exp_config, exp_out, exp_gaps;
    CLI::App* exp_run = experiment->add_subcommand("run", "train the full grid and emit CSVs");
    exp_run->add_option("--config", exp_config, "JSON config (missing keys keep defaults)");
    exp_run->add_option("--out", exp_out, "output directory")->required();
    CLI::App* exp_plot =
        experiment->add_subcommand("plotdata", "rebuild summary/curves from an existing gaps.csv");
    exp_plot->add_option("--config", exp_config, "JSON config (supplies m_train)");
    exp_plot->add_option("--out", exp_out, "output directory")->required();
    exp_plot->add_option("--gaps", exp_gaps, "gaps.csv to read (default: <out>/gaps.csv)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bounds->parsed()) run_bounds(ba);
        if (covering->parsed()) run_covering(ca);
        if (qfs->parsed())
            for (std::size_t i = 0; i < qfs_actions.size(); ++i)
                if (qfs_actions[i]->parsed())
                    run_qfs(std::array{"dist", "canon", "orbit"}[i], qa);
        if (sortnet->parsed()) run_sortnet(sa);
        if (experiment->parsed()) {
            if (exp_run->parsed()) run_experiment_cmd(exp_config, exp_out);
            if (exp_plot->parsed()) run_plotdata(exp_config, exp_out, exp_gaps);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
