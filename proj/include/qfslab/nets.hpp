#pragma once

// Trainable DeepSets-style invariant models: permutation-equivariant layers
// Y = ReLU(X Lambda + 1 (s^T Gamma) + 1 b^T) with s the column sums of X,
// followed by a pooling step and a dense head. Gradients are derived by hand
// (reverse mode over the cached forward pass) and exposed as a flat vector
// aligned with the flat parameter view, so the optimizer and the
// finite-difference checks share one indexing scheme.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "qfslab/permgroup.hpp"
#include "qfslab/rng.hpp"

namespace qfslab {

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;  // row-major

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {
        if (r < 0 || c < 0) throw std::invalid_argument("Mat: negative dimension");
    }
    double& operator()(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }
};

namespace detail {

inline void require_shape(const Mat& m, int r, int c, const char* who) {
    if (m.rows != r || m.cols != c)
        throw std::invalid_argument(std::string(who) + ": expected " + std::to_string(r) + "x" +
                                    std::to_string(c) + ", got " + std::to_string(m.rows) + "x" +
                                    std::to_string(m.cols));
}

// out (n x c) = X (n x k) * M (k x c); accumulates k-major for cache locality.
inline Mat mat_mul(const Mat& X, const Mat& M) {
    if (X.cols != M.rows) throw std::invalid_argument("mat_mul: inner dimensions disagree");
    Mat out(X.rows, M.cols);
    for (int i = 0; i < X.rows; ++i)
        for (int k = 0; k < X.cols; ++k) {
            double xv = X(i, k);
            if (xv == 0.0) continue;
            const double* mrow = &M.a[static_cast<std::size_t>(k) * M.cols];
            double* orow = &out.a[static_cast<std::size_t>(i) * out.cols];
            for (int j = 0; j < M.cols; ++j) orow[j] += xv * mrow[j];
        }
    return out;
}

// out (c) = v (k) * M (k x c).
inline std::vector<double> vec_mat(const std::vector<double>& v, const Mat& M) {
    if (static_cast<int>(v.size()) != M.rows)
        throw std::invalid_argument("vec_mat: dimensions disagree");
    std::vector<double> out(M.cols, 0.0);
    for (int k = 0; k < M.rows; ++k) {
        double xv = v[k];
        if (xv == 0.0) continue;
        const double* mrow = &M.a[static_cast<std::size_t>(k) * M.cols];
        for (int j = 0; j < M.cols; ++j) out[j] += xv * mrow[j];
    }
    return out;
}

inline std::vector<double> col_sums(const Mat& X) {
    std::vector<double> s(X.cols, 0.0);
    for (int i = 0; i < X.rows; ++i)
        for (int j = 0; j < X.cols; ++j) s[j] += X(i, j);
    return s;
}

}  // namespace detail

struct EquivariantLayer {
    Mat Lambda;  // c_in x c_out, the per-token mixing
    Mat Gamma;   // c_in x c_out, applied to the token sum
    std::vector<double> bias;  // c_out

    int in_channels() const { return Lambda.rows; }
    int out_channels() const { return Lambda.cols; }
};

struct DenseLayer {
    Mat W;  // c_in x c_out
    std::vector<double> bias;
    bool relu = true;
};

enum class Pool { sum, mean };

// Pre-activation X*Lambda + 1 (s^T Gamma) + 1 b^T.
inline Mat equivariant_preactivation(const EquivariantLayer& layer, const Mat& X) {
    if (X.cols != layer.in_channels())
        throw std::invalid_argument("equivariant layer: channel mismatch");
    if (layer.Gamma.rows != layer.Lambda.rows || layer.Gamma.cols != layer.Lambda.cols ||
        static_cast<int>(layer.bias.size()) != layer.out_channels())
        throw std::invalid_argument("equivariant layer: parameter shapes disagree");
    Mat A = detail::mat_mul(X, layer.Lambda);
    std::vector<double> shared = detail::vec_mat(detail::col_sums(X), layer.Gamma);
    for (int j = 0; j < A.cols; ++j) shared[j] += layer.bias[j];
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) A(i, j) += shared[j];
    return A;
}

inline Mat equivariant_forward(const EquivariantLayer& layer, const Mat& X) {
    Mat A = equivariant_preactivation(layer, X);
    for (double& v : A.a) v = v > 0.0 ? v : 0.0;
    return A;
}

struct DeepSetsModel {
    int token_dim = 0;  // channels of each input token
    std::vector<EquivariantLayer> eq_layers;
    Pool pool = Pool::sum;
    std::vector<DenseLayer> head;  // ReLU on all but the last, identity output
};

// Uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)) weights, zero biases; one RNG
// stream per parameter matrix so layer counts don't shift each other's draws.
inline DeepSetsModel make_deepsets_model(int token_dim, const std::vector<int>& eq_widths,
                                         const std::vector<int>& head_widths, std::uint64_t seed) {
    if (token_dim < 1) throw std::invalid_argument("make_deepsets_model: token_dim >= 1 required");
    if (eq_widths.empty() || head_widths.empty())
        throw std::invalid_argument("make_deepsets_model: need at least one layer on each side");
    if (head_widths.back() != 1)
        throw std::invalid_argument("make_deepsets_model: final head width must be 1");
    DeepSetsModel model;
    model.token_dim = token_dim;
    std::uint64_t stream = 0;
    auto fill = [&](Mat& M, int fan_in) {
        auto eng = make_engine(seed, stream++);
        double bound = std::sqrt(1.0 / fan_in);
        for (double& v : M.a) v = (2.0 * uniform01(eng) - 1.0) * bound;
    };
    int c = token_dim;
    for (int w : eq_widths) {
        if (w < 1) throw std::invalid_argument("make_deepsets_model: widths must be positive");
        EquivariantLayer l;
        l.Lambda = Mat(c, w);
        l.Gamma = Mat(c, w);
        l.bias.assign(w, 0.0);
        fill(l.Lambda, c);
        fill(l.Gamma, c);
        model.eq_layers.push_back(std::move(l));
        c = w;
    }
    for (std::size_t k = 0; k < head_widths.size(); ++k) {
        int w = head_widths[k];
        if (w < 1) throw std::invalid_argument("make_deepsets_model: widths must be positive");
        DenseLayer l;
        l.W = Mat(c, w);
        l.bias.assign(w, 0.0);
        l.relu = k + 1 < head_widths.size();
        fill(l.W, c);
        model.head.push_back(std::move(l));
        c = w;
    }
    return model;
}

// ---------------------------------------------------------------------------
// Flat parameter view. Order: per equivariant layer Lambda, Gamma, bias
// (row-major), then per head layer W, bias.

struct ParamSlice {
    std::string name;
    std::size_t offset = 0;
    int rows = 0;
    int cols = 0;  // cols = 0 marks a bias vector of length rows
};

inline std::vector<ParamSlice> parameter_layout(const DeepSetsModel& model) {
    std::vector<ParamSlice> out;
    std::size_t off = 0;
    auto push = [&](const std::string& name, int r, int c) {
        out.push_back({name, off, r, c});
        off += static_cast<std::size_t>(r) * (c == 0 ? 1 : c);
    };
    for (std::size_t i = 0; i < model.eq_layers.size(); ++i) {
        const auto& l = model.eq_layers[i];
        std::string p = "eq" + std::to_string(i);
        push(p + ".Lambda", l.Lambda.rows, l.Lambda.cols);
        push(p + ".Gamma", l.Gamma.rows, l.Gamma.cols);
        push(p + ".bias", static_cast<int>(l.bias.size()), 0);
    }
    for (std::size_t i = 0; i < model.head.size(); ++i) {
        const auto& l = model.head[i];
        std::string p = "head" + std::to_string(i);
        push(p + ".W", l.W.rows, l.W.cols);
        push(p + ".bias", static_cast<int>(l.bias.size()), 0);
    }
    return out;
}

inline std::size_t parameter_count(const DeepSetsModel& model) {
    std::size_t n = 0;
    for (const auto& l : model.eq_layers)
        n += l.Lambda.a.size() + l.Gamma.a.size() + l.bias.size();
    for (const auto& l : model.head) n += l.W.a.size() + l.bias.size();
    return n;
}

inline std::vector<double> get_parameters(const DeepSetsModel& model) {
    std::vector<double> out;
    out.reserve(parameter_count(model));
    for (const auto& l : model.eq_layers) {
        out.insert(out.end(), l.Lambda.a.begin(), l.Lambda.a.end());
        out.insert(out.end(), l.Gamma.a.begin(), l.Gamma.a.end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
    for (const auto& l : model.head) {
        out.insert(out.end(), l.W.a.begin(), l.W.a.end());
        out.insert(out.end(), l.bias.begin(), l.bias.end());
    }
    return out;
}

inline void set_parameters(DeepSetsModel& model, const std::vector<double>& flat) {
    if (flat.size() != parameter_count(model))
        throw std::invalid_argument("set_parameters: length mismatch");
    std::size_t off = 0;
    auto take = [&](std::vector<double>& dst) {
        std::copy(flat.begin() + off, flat.begin() + off + dst.size(), dst.begin());
        off += dst.size();
    };
    for (auto& l : model.eq_layers) {
        take(l.Lambda.a);
        take(l.Gamma.a);
        take(l.bias);
    }
    for (auto& l : model.head) {
        take(l.W.a);
        take(l.bias);
    }
}

// ---------------------------------------------------------------------------
// Forward / backward.

struct ForwardCache {
    std::vector<Mat> eq_in;    // input of each equivariant layer
    std::vector<Mat> eq_pre;   // its pre-activation
    Mat eq_out;                // output of the last equivariant layer
    std::vector<std::vector<double>> head_in;
    std::vector<std::vector<double>> head_pre;
    double output = 0.0;
};

inline double model_forward(const DeepSetsModel& model, const Mat& X, ForwardCache* cache = nullptr) {
    if (X.cols != model.token_dim || X.rows < 1)
        throw std::invalid_argument("model_forward: input must be n x token_dim with n >= 1");
    if (cache) {
        cache->eq_in.clear();
        cache->eq_pre.clear();
        cache->head_in.clear();
        cache->head_pre.clear();
    }
    Mat cur = X;
    for (const auto& l : model.eq_layers) {
        Mat A = equivariant_preactivation(l, cur);
        if (cache) {
            cache->eq_in.push_back(cur);
            cache->eq_pre.push_back(A);
        }
        for (double& v : A.a) v = v > 0.0 ? v : 0.0;
        cur = std::move(A);
    }
    if (cache) cache->eq_out = cur;
    std::vector<double> h = detail::col_sums(cur);
    if (model.pool == Pool::mean)
        for (double& v : h) v /= cur.rows;
    for (const auto& l : model.head) {
        if (static_cast<int>(h.size()) != l.W.rows)
            throw std::invalid_argument("model_forward: head width mismatch");
        std::vector<double> z = detail::vec_mat(h, l.W);
        for (std::size_t j = 0; j < z.size(); ++j) z[j] += l.bias[j];
        if (cache) {
            cache->head_in.push_back(h);
            cache->head_pre.push_back(z);
        }
        if (l.relu)
            for (double& v : z) v = v > 0.0 ? v : 0.0;
        h = std::move(z);
    }
    if (h.size() != 1) throw std::invalid_argument("model_forward: head must end in width 1");
    if (cache) cache->output = h[0];
    return h[0];
}

// Gradient of the per-sample objective 0.5*(f(X) - y)^2 with respect to every
// parameter, flattened in parameter_layout order. ReLU subgradient at 0 is 0.
// Returns (f(X), gradient).
inline std::pair<double, std::vector<double>> backward(const DeepSetsModel& model, const Mat& X,
                                                       double y) {
    ForwardCache c;
    double f = model_forward(model, X, &c);
    double e = f - y;

    std::size_t L = model.eq_layers.size();
    std::size_t K = model.head.size();
    std::vector<Mat> gLambda(L), gGamma(L);
    std::vector<std::vector<double>> gEqBias(L);
    std::vector<Mat> gW(K);
    std::vector<std::vector<double>> gHeadBias(K);

    // Head, from the scalar output back to the pooled vector.
    std::vector<double> g{e};
    for (std::size_t k = K; k-- > 0;) {
        const DenseLayer& l = model.head[k];
        std::vector<double> gz = g;
        if (l.relu)
            for (std::size_t j = 0; j < gz.size(); ++j)
                if (!(c.head_pre[k][j] > 0.0)) gz[j] = 0.0;
        const std::vector<double>& hin = c.head_in[k];
        gW[k] = Mat(l.W.rows, l.W.cols);
        for (int r = 0; r < l.W.rows; ++r)
            for (int col = 0; col < l.W.cols; ++col) gW[k](r, col) = hin[r] * gz[col];
        gHeadBias[k] = gz;
        std::vector<double> gh(l.W.rows, 0.0);
        for (int r = 0; r < l.W.rows; ++r) {
            double acc = 0.0;
            for (int col = 0; col < l.W.cols; ++col) acc += l.W(r, col) * gz[col];
            gh[r] = acc;
        }
        g = std::move(gh);
    }

    // Pooling broadcast.
    Mat gX(c.eq_out.rows, c.eq_out.cols);
    double pool_scale = model.pool == Pool::mean ? 1.0 / c.eq_out.rows : 1.0;
    for (int i = 0; i < gX.rows; ++i)
        for (int j = 0; j < gX.cols; ++j) gX(i, j) = g[j] * pool_scale;

    // Equivariant layers in reverse.
    for (std::size_t l = L; l-- > 0;) {
        const EquivariantLayer& layer = model.eq_layers[l];
        const Mat& A = c.eq_pre[l];
        const Mat& Xin = c.eq_in[l];
        Mat gA = gX;
        for (std::size_t i = 0; i < gA.a.size(); ++i)
            if (!(A.a[i] > 0.0)) gA.a[i] = 0.0;
        std::vector<double> cs = detail::col_sums(gA);
        std::vector<double> s = detail::col_sums(Xin);
        gLambda[l] = Mat(layer.Lambda.rows, layer.Lambda.cols);
        for (int i = 0; i < Xin.rows; ++i)
            for (int r = 0; r < Xin.cols; ++r) {
                double xv = Xin(i, r);
                if (xv == 0.0) continue;
                for (int col = 0; col < gA.cols; ++col) gLambda[l](r, col) += xv * gA(i, col);
            }
        gGamma[l] = Mat(layer.Gamma.rows, layer.Gamma.cols);
        for (int r = 0; r < layer.Gamma.rows; ++r)
            for (int col = 0; col < layer.Gamma.cols; ++col) gGamma[l](r, col) = s[r] * cs[col];
        gEqBias[l] = cs;
        // gX_in = gA Lambda^T + 1 (cs Gamma^T)
        std::vector<double> shared(layer.Gamma.rows, 0.0);
        for (int r = 0; r < layer.Gamma.rows; ++r) {
            double acc = 0.0;
            for (int col = 0; col < layer.Gamma.cols; ++col) acc += layer.Gamma(r, col) * cs[col];
            shared[r] = acc;
        }
        Mat gXin(Xin.rows, Xin.cols);
        for (int i = 0; i < Xin.rows; ++i)
            for (int r = 0; r < Xin.cols; ++r) {
                double acc = shared[r];
                for (int col = 0; col < gA.cols; ++col)
                    acc += gA(i, col) * layer.Lambda(r, col);
                gXin(i, r) = acc;
            }
        gX = std::move(gXin);
    }

    std::vector<double> flat;
    flat.reserve(parameter_count(model));
    for (std::size_t l = 0; l < L; ++l) {
        flat.insert(flat.end(), gLambda[l].a.begin(), gLambda[l].a.end());
        flat.insert(flat.end(), gGamma[l].a.begin(), gGamma[l].a.end());
        flat.insert(flat.end(), gEqBias[l].begin(), gEqBias[l].end());
    }
    for (std::size_t k = 0; k < K; ++k) {
        flat.insert(flat.end(), gW[k].a.begin(), gW[k].a.end());
        flat.insert(flat.end(), gHeadBias[k].begin(), gHeadBias[k].end());
    }
    return {f, std::move(flat)};
}

// ---------------------------------------------------------------------------
// Adam.

struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    long long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double lr = 0.001;
    double eps_num = 1e-8;

    explicit AdamState(std::size_t n_params = 0, double learning_rate = 0.001)
        : first_moment(n_params, 0.0), second_moment(n_params, 0.0), lr(learning_rate) {}
};

inline void adam_step(AdamState& state, std::vector<double>& params,
                      const std::vector<double>& grads) {
    if (params.size() != grads.size() || params.size() != state.first_moment.size())
        throw std::invalid_argument("adam_step: shape mismatch");
    ++state.step;
    double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        double g = grads[i];
        state.first_moment[i] = state.beta1 * state.first_moment[i] + (1.0 - state.beta1) * g;
        state.second_moment[i] =
            state.beta2 * state.second_moment[i] + (1.0 - state.beta2) * g * g;
        double mhat = state.first_moment[i] / bc1;
        double vhat = state.second_moment[i] / bc2;
        params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps_num);
    }
}

// ---------------------------------------------------------------------------
// Training.

struct Sample {
    Mat X;
    double y = 0.0;
};

inline double mean_squared_error(const DeepSetsModel& model, const std::vector<Sample>& data) {
    if (data.empty()) throw std::invalid_argument("mean_squared_error: empty dataset");
    double acc = 0.0;
    for (const auto& s : data) {
        double e = model_forward(model, s.X) - s.y;
        acc += e * e;
    }
    return acc / data.size();
}

namespace detail {
// Fisher-Yates with rejection sampling; independent of library distribution
// internals so shuffles reproduce bit-for-bit everywhere.
inline void shuffle_indices(std::vector<int>& idx, std::mt19937_64& eng) {
    for (std::size_t i = idx.size(); i > 1; --i) {
        std::uint64_t bound = i;
        std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
        std::uint64_t r;
        do {
            r = eng();
        } while (r >= limit);
        std::swap(idx[i - 1], idx[r % bound]);
    }
}
}  // namespace detail

// Shuffled mini-batch Adam on the mean of 0.5*(f - y)^2 per batch. Returns the
// per-epoch mean squared error over the samples as visited (without the 1/2).
// Deterministic: one RNG stream per epoch derived from the seed.
inline std::vector<double> train(DeepSetsModel& model, const std::vector<Sample>& data, int epochs,
                                 int batch_size, std::uint64_t seed, double lr = 0.001) {
    if (data.empty()) throw std::invalid_argument("train: empty dataset");
    if (batch_size < 1 || batch_size > static_cast<int>(data.size()))
        throw std::invalid_argument("train: need 1 <= batch_size <= dataset size");
    if (epochs < 0) throw std::invalid_argument("train: epochs must be nonnegative");
    std::vector<double> params = get_parameters(model);
    AdamState state(params.size(), lr);
    std::vector<double> history;
    history.reserve(epochs);
    std::vector<int> idx(data.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
    std::vector<double> batch_grad(params.size());
    for (int epoch = 0; epoch < epochs; ++epoch) {
        auto eng = make_engine(seed, static_cast<std::uint64_t>(epoch));
        detail::shuffle_indices(idx, eng);
        double epoch_sq = 0.0;
        for (std::size_t start = 0; start < idx.size(); start += batch_size) {
            std::size_t stop = std::min(idx.size(), start + batch_size);
            std::fill(batch_grad.begin(), batch_grad.end(), 0.0);
            for (std::size_t i = start; i < stop; ++i) {
                const Sample& s = data[idx[i]];
                auto [f, g] = backward(model, s.X, s.y);
                double e = f - s.y;
                epoch_sq += e * e;
                for (std::size_t p = 0; p < g.size(); ++p) batch_grad[p] += g[p];
            }
            double inv = 1.0 / static_cast<double>(stop - start);
            for (double& g : batch_grad) g *= inv;
            adam_step(state, params, batch_grad);
            set_parameters(model, params);
        }
        history.push_back(epoch_sq / data.size());
    }
    return history;
}

inline void write_loss_history(const std::string& path, const std::vector<double>& history) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_loss_history: cannot open " + path);
    out << "epoch,train_mse\n";
    char buf[64];
    for (std::size_t i = 0; i < history.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i + 1, history[i]);
        out << buf;
    }
}

// ---------------------------------------------------------------------------
// Token permutation (rows of X) and the invariance check.

inline Mat permute_tokens(const Permutation& g, const Mat& X) {
    if (g.degree() != X.rows) throw std::invalid_argument("permute_tokens: degree mismatch");
    Mat out(X.rows, X.cols);
    for (int i = 0; i < X.rows; ++i) {
        int target = g(i);
        for (int j = 0; j < X.cols; ++j) out(target, j) = X(i, j);
    }
    return out;
}

// ---------------------------------------------------------------------------
// JSON checkpoints.

inline nlohmann::json mat_to_json(const Mat& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (int r = 0; r < M.rows; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < M.cols; ++c) row.push_back(M(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Mat mat_from_json(const nlohmann::json& j) {
    auto rows = j.get<std::vector<std::vector<double>>>();
    Mat M(static_cast<int>(rows.size()), rows.empty() ? 0 : static_cast<int>(rows[0].size()));
    for (int r = 0; r < M.rows; ++r) {
        if (static_cast<int>(rows[r].size()) != M.cols)
            throw std::invalid_argument("model JSON: ragged matrix");
        for (int c = 0; c < M.cols; ++c) M(r, c) = rows[r][c];
    }
    return M;
}

inline nlohmann::json to_json(const DeepSetsModel& model) {
    nlohmann::json j;
    j["token_dim"] = model.token_dim;
    j["pool"] = model.pool == Pool::sum ? "sum" : "mean";
    j["equivariant_layers"] = nlohmann::json::array();
    for (const auto& l : model.eq_layers)
        j["equivariant_layers"].push_back({{"Lambda", mat_to_json(l.Lambda)},
                                           {"Gamma", mat_to_json(l.Gamma)},
                                           {"bias", l.bias}});
    j["head"] = nlohmann::json::array();
    for (const auto& l : model.head)
        j["head"].push_back(
            {{"W", mat_to_json(l.W)}, {"b", l.bias}, {"act", l.relu ? "relu" : "id"}});
    return j;
}

inline DeepSetsModel model_from_json(const nlohmann::json& j) {
    DeepSetsModel model;
    model.token_dim = j.at("token_dim").get<int>();
    std::string pool = j.at("pool").get<std::string>();
    if (pool == "sum")
        model.pool = Pool::sum;
    else if (pool == "mean")
        model.pool = Pool::mean;
    else
        throw std::invalid_argument("model JSON: unknown pool '" + pool + "'");
    for (const auto& jl : j.at("equivariant_layers")) {
        EquivariantLayer l;
        l.Lambda = mat_from_json(jl.at("Lambda"));
        l.Gamma = mat_from_json(jl.at("Gamma"));
        l.bias = jl.at("bias").get<std::vector<double>>();
        model.eq_layers.push_back(std::move(l));
    }
    for (const auto& jl : j.at("head")) {
        DenseLayer l;
        l.W = mat_from_json(jl.at("W"));
        l.bias = jl.at("b").get<std::vector<double>>();
        std::string act = jl.at("act").get<std::string>();
        if (act == "relu")
            l.relu = true;
        else if (act == "id")
            l.relu = false;
        else
            throw std::invalid_argument("model JSON: unknown activation '" + act + "'");
        model.head.push_back(std::move(l));
    }
    return model;
}

}  // namespace qfslab
