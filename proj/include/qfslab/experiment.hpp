#pragma once

// The synthetic generalization-gap experiment end to end: draw Gaussian token
// sets whose target is the exact sum of all entries, train one DeepSets model
// per (n, seed) cell, and emit the gap tables plus the theory curves for
// plotting. Everything is seeded and single-pass so two runs with the same
// config produce byte-identical CSV files.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfslab/bounds.hpp"
#include "qfslab/logscale.hpp"
#include "qfslab/nets.hpp"
#include "qfslab/rng.hpp"

namespace qfslab {

struct ExperimentConfig {
    int N_total = 48;
    std::vector<int> n_list{2, 4, 6, 8};
    int m_train = 60;
    int m_test = 10000;
    int epochs = 500;
    int batch = 4;
    double lr = 0.001;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
    std::vector<int> eq_widths{128, 64, 32};
    std::vector<int> head_widths{32, 1};
};

inline void validate(const ExperimentConfig& c) {
    if (c.N_total < 1) throw std::invalid_argument("config: N_total >= 1 required");
    if (c.n_list.empty() || c.seeds.empty())
        throw std::invalid_argument("config: n_list and seeds must be nonempty");
    for (int n : c.n_list) {
        if (n < 1 || c.N_total % n != 0)
            throw std::invalid_argument("config: N_total must be divisible by every n (got n = " +
                                        std::to_string(n) + ")");
    }
    if (c.m_train < 1 || c.m_test < 1) throw std::invalid_argument("config: sample counts >= 1");
    if (c.batch < 1 || c.batch > c.m_train)
        throw std::invalid_argument("config: need 1 <= batch <= m_train");
    if (c.epochs < 0) throw std::invalid_argument("config: epochs must be nonnegative");
    if (!(c.lr > 0.0)) throw std::invalid_argument("config: lr must be positive");
    if (c.eq_widths.empty() || c.head_widths.empty() || c.head_widths.back() != 1)
        throw std::invalid_argument("config: widths must be nonempty and end in 1");
}

inline void to_json(nlohmann::json& j, const ExperimentConfig& c) {
    j = nlohmann::json{{"N_total", c.N_total},   {"n_list", c.n_list},
                       {"m_train", c.m_train},   {"m_test", c.m_test},
                       {"epochs", c.epochs},     {"batch", c.batch},
                       {"lr", c.lr},             {"seeds", c.seeds},
                       {"eq_widths", c.eq_widths}, {"head_widths", c.head_widths}};
}

// Missing keys keep their defaults, so config files may be partial.
inline ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    if (j.contains("N_total")) c.N_total = j.at("N_total").get<int>();
    if (j.contains("n_list")) c.n_list = j.at("n_list").get<std::vector<int>>();
    if (j.contains("m_train")) c.m_train = j.at("m_train").get<int>();
    if (j.contains("m_test")) c.m_test = j.at("m_test").get<int>();
    if (j.contains("epochs")) c.epochs = j.at("epochs").get<int>();
    if (j.contains("batch")) c.batch = j.at("batch").get<int>();
    if (j.contains("lr")) c.lr = j.at("lr").get<double>();
    if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("eq_widths")) c.eq_widths = j.at("eq_widths").get<std::vector<int>>();
    if (j.contains("head_widths")) c.head_widths = j.at("head_widths").get<std::vector<int>>();
    validate(c);
    return c;
}

// m samples of n tokens with d channels, entries standard normal, target the
// exact sum of all entries (summed row-major, the order tests recompute).
inline std::vector<Sample> generate_dataset(int n, int d, int m, std::uint64_t seed) {
    if (n < 1 || d < 1) throw std::invalid_argument("generate_dataset: n, d >= 1 required");
    if (m < 1) throw std::invalid_argument("generate_dataset: m >= 1 required");
    GaussianStream gauss(make_engine(seed, 0));
    std::vector<Sample> out;
    out.reserve(m);
    for (int s = 0; s < m; ++s) {
        Sample smp;
        smp.X = Mat(n, d);
        for (double& v : smp.X.a) v = gauss.next();
        double y = 0.0;
        for (double v : smp.X.a) y += v;
        smp.y = y;
        out.push_back(std::move(smp));
    }
    return out;
}

struct GapRecord {
    int n = 0;
    std::uint64_t seed = 0;
    double train_mse = 0.0;
    double test_mse = 0.0;
    double gap = 0.0;
    double log10_gap = 0.0;
};

struct SummaryRow {
    int n = 0;
    double mean_log10_gap = 0.0;
    double std_log10_gap = 0.0;
    double theory_log10 = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<GapRecord> records;   // sorted by (n, seed)
    std::vector<SummaryRow> summary;  // one row per n
    std::vector<CurveRow> curves;     // invariant-bound curves for the overlay
    double slope_vs_theory = 0.0;     // LS slope of mean gap vs theory (log10)
};

// Spearman rank correlation with average ranks on ties.
inline double spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("spearman_rho: need two equal-length samples, size >= 2");
    auto ranks = [](const std::vector<double>& v) {
        std::size_t k = v.size();
        std::vector<std::size_t> order(k);
        for (std::size_t i = 0; i < k; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
        std::vector<double> r(k);
        std::size_t i = 0;
        while (i < k) {
            std::size_t j = i;
            while (j + 1 < k && v[order[j + 1]] == v[order[i]]) ++j;
            double avg = 0.5 * (i + j) + 1.0;
            for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
            i = j + 1;
        }
        return r;
    };
    std::vector<double> rx = ranks(xs), ry = ranks(ys);
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= rx.size();
    my /= ry.size();
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("spearman_rho: a sample is constant");
    return sxy / std::sqrt(sxx * syy);
}

// Per-n mean and sample standard deviation of the log10 gaps, with the theory
// overlay log10 of 1/sqrt(n! * m^{2/n}) (all constants at 1).
inline std::vector<SummaryRow> summarize_gaps(const std::vector<GapRecord>& records,
                                              const std::vector<int>& n_list, int m_train) {
    std::vector<SummaryRow> out;
    for (int n : n_list) {
        std::vector<double> logs;
        for (const auto& r : records)
            if (r.n == n) logs.push_back(r.log10_gap);
        if (logs.empty()) throw std::invalid_argument("summarize_gaps: no records for n = " +
                                                      std::to_string(n));
        double mean = 0.0;
        for (double v : logs) mean += v;
        mean /= logs.size();
        double var = 0.0;
        for (double v : logs) var += (v - mean) * (v - mean);
        double sd = logs.size() > 1 ? std::sqrt(var / (logs.size() - 1)) : 0.0;
        SummaryRow row;
        row.n = n;
        row.mean_log10_gap = mean;
        row.std_log10_gap = sd;
        row.theory_log10 = -0.5 * (log10_factorial(n) +
                                   (2.0 / n) * std::log10(static_cast<double>(m_train)));
        out.push_back(row);
    }
    return out;
}

// Least-squares slope of the measured means against the theory points; only
// its sign is a claim (constants are not calibrated).
inline double theory_slope(const std::vector<SummaryRow>& summary) {
    if (summary.empty()) throw std::invalid_argument("theory_slope: empty summary");
    double mx = 0.0, my = 0.0;
    for (const auto& s : summary) {
        mx += s.theory_log10;
        my += s.mean_log10_gap;
    }
    mx /= summary.size();
    my /= summary.size();
    double sxy = 0.0, sxx = 0.0;
    for (const auto& s : summary) {
        sxy += (s.theory_log10 - mx) * (s.mean_log10_gap - my);
        sxx += (s.theory_log10 - mx) * (s.theory_log10 - mx);
    }
    return sxx > 0.0 ? sxy / sxx : 0.0;
}

namespace detail {

inline GapRecord run_cell(const ExperimentConfig& cfg, int n, std::uint64_t seed) {
    int d = cfg.N_total / n;
    // Independent streams per purpose so changing one stage cannot shift another.
    std::vector<Sample> train_set =
        generate_dataset(n, d, cfg.m_train, mix_seed(seed, 1000 + static_cast<std::uint64_t>(n)));
    std::vector<Sample> test_set =
        generate_dataset(n, d, cfg.m_test, mix_seed(seed, 2000 + static_cast<std::uint64_t>(n)));
    DeepSetsModel model = make_deepsets_model(d, cfg.eq_widths, cfg.head_widths,
                                              mix_seed(seed, 3000 + static_cast<std::uint64_t>(n)));
    train(model, train_set, cfg.epochs, cfg.batch,
          mix_seed(seed, 4000 + static_cast<std::uint64_t>(n)), cfg.lr);
    GapRecord rec;
    rec.n = n;
    rec.seed = seed;
    rec.train_mse = mean_squared_error(model, train_set);
    rec.test_mse = mean_squared_error(model, test_set);
    rec.gap = std::fabs(rec.test_mse - rec.train_mse);
    rec.log10_gap = std::log10(rec.gap);
    return rec;
}

inline int worker_pool_size(std::size_t cells) {
    unsigned hw = std::thread::hardware_concurrency();
    int threads = hw == 0 ? 1 : static_cast<int>(hw);
    if (const char* env = std::getenv("QFSLAB_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) threads = static_cast<int>(v);
    }
    if (threads > static_cast<int>(cells)) threads = static_cast<int>(cells);
    return threads < 1 ? 1 : threads;
}

}  // namespace detail

inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    validate(cfg);
    ExperimentResult result;
    result.config = cfg;

    std::vector<std::pair<int, std::uint64_t>> cells;
    for (int n : cfg.n_list)
        for (std::uint64_t seed : cfg.seeds) cells.emplace_back(n, seed);
    result.records.resize(cells.size());

    int threads = detail::worker_pool_size(cells.size());
    if (threads <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i)
            result.records[i] = detail::run_cell(cfg, cells[i].first, cells[i].second);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::exception_ptr> errors(threads);
        std::vector<std::thread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back([&, t] {
                try {
                    for (std::size_t i = next.fetch_add(1); i < cells.size(); i = next.fetch_add(1))
                        result.records[i] = detail::run_cell(cfg, cells[i].first, cells[i].second);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        for (auto& th : pool) th.join();
        for (auto& e : errors)
            if (e) std::rethrow_exception(e);
    }

    result.summary = summarize_gaps(result.records, cfg.n_list, cfg.m_train);

    std::vector<GroupOrder> orders;
    for (int n : cfg.n_list) orders.push_back(GroupOrder::factorial(n));
    result.curves = theory_curves(cfg.n_list, orders, 10.0, 1e6, 61, 1.0, 0.05);

    result.slope_vs_theory = theory_slope(result.summary);
    return result;
}

// ---------------------------------------------------------------------------
// CSV emission; all floats at 17 significant digits for byte reproducibility.

inline void emit_plot_data(const ExperimentResult& result, const std::string& dir) {
    if (result.records.empty()) throw std::invalid_argument("emit_plot_data: no records");
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    auto open = [&](const std::string& name) {
        std::ofstream out(fs::path(dir) / name);
        if (!out) throw std::runtime_error("emit_plot_data: cannot write " + name + " under " + dir);
        return out;
    };
    char buf[256];
    {
        auto out = open("gaps.csv");
        out << "n,seed,train_mse,test_mse,gap,log10_gap\n";
        for (const auto& r : result.records) {
            std::snprintf(buf, sizeof(buf), "%d,%llu,%.17g,%.17g,%.17g,%.17g\n", r.n,
                          static_cast<unsigned long long>(r.seed), r.train_mse, r.test_mse, r.gap,
                          r.log10_gap);
            out << buf;
        }
    }
    {
        auto out = open("summary.csv");
        out << "n,mean_log10_gap,std_log10_gap,theory_log10\n";
        for (const auto& s : result.summary) {
            std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", s.n, s.mean_log10_gap,
                          s.std_log10_gap, s.theory_log10);
            out << buf;
        }
    }
    {
        auto out = open("curves.csv");
        out << to_csv(result.curves);
    }
}

inline std::vector<GapRecord> read_gaps_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_gaps_csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line) || line != "n,seed,train_mse,test_mse,gap,log10_gap")
        throw std::runtime_error("read_gaps_csv: unexpected header in " + path);
    std::vector<GapRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        GapRecord r;
        unsigned long long seed = 0;
        if (std::sscanf(line.c_str(), "%d,%llu,%lg,%lg,%lg,%lg", &r.n, &seed, &r.train_mse,
                        &r.test_mse, &r.gap, &r.log10_gap) != 6)
            throw std::runtime_error("read_gaps_csv: malformed row '" + line + "'");
        r.seed = seed;
        out.push_back(r);
    }
    return out;
}

}  // namespace qfslab
