#pragma once

// Explicit ReLU networks that compute max/min, the k-th largest element, and
// descending sort exactly, plus composition of an arbitrary head network with
// the sort front end. Networks are stored row-sparse: the sort construction
// produces hundreds of thousands of units at n = 12 and dense matrices would
// not fit in memory. Dense form exists only in the JSON export.
//
// The building blocks are the two comparator identities
//     max(a, b) = ReLU(a - b) + b,      min(a, b) = a - ReLU(a - b),
// with b (resp. a) carried across the layer as the pair (ReLU(b), ReLU(-b)),
// so every hidden layer is purely ReLU and the linear carry is recombined by
// the next layer's weights. The k-th largest value is built by the
// leave-one-out recursion
//     max_k(S) = min { max_{k-1}(S \ {l}) : l in S },
// memoized over subsets so shared subproblems are built once. All values of a
// class (k, |S|) are scheduled at the same depth
//     D(1, 1) = 0,   D(k, s) = D(k-1, s-1) + ceil(log2 s),
// so comparator inputs always live in the same layer; odd tournament entrants
// advance a round through a carry pair. This recursion is deliberately the
// costly one (roughly n(n-1)2^{n-2} comparators for a full sort) rather than a
// Batcher-style sorting network; it is the construction whose layer accounting
// the rest of the toolkit quotes.

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace qfslab {

using Point = std::vector<double>;

enum class Act { relu, identity };

struct NetLayer {
    // rows[r] lists (input index, coefficient) in fixed evaluation order.
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<double> bias;
    Act act = Act::relu;
    int in_dim = 0;

    int out_dim() const { return static_cast<int>(rows.size()); }
};

class ReluNetwork {
public:
    explicit ReluNetwork(int input_dim) : input_dim_(input_dim) {
        if (input_dim < 1) throw std::invalid_argument("ReluNetwork: input_dim >= 1 required");
    }

    int input_dim() const { return input_dim_; }
    int output_dim() const { return layers_.empty() ? input_dim_ : layers_.back().out_dim(); }
    int depth() const { return static_cast<int>(layers_.size()); }
    const std::vector<NetLayer>& layers() const { return layers_; }

    // d_1 .. d_{H+1}: input width followed by every layer's output width.
    std::vector<int> widths() const {
        std::vector<int> w{input_dim_};
        for (const auto& l : layers_) w.push_back(l.out_dim());
        return w;
    }

    std::size_t nonzero_params() const {
        std::size_t count = 0;
        for (const auto& l : layers_) {
            for (const auto& row : l.rows)
                for (const auto& [c, v] : row)
                    if (v != 0.0) ++count;
            for (double b : l.bias)
                if (b != 0.0) ++count;
        }
        return count;
    }

    void append_layer(NetLayer layer) {
        int expect = output_dim();
        if (layer.in_dim != expect)
            throw std::invalid_argument("ReluNetwork: layer input dim " +
                                        std::to_string(layer.in_dim) + " does not chain onto " +
                                        std::to_string(expect));
        for (const auto& row : layer.rows)
            for (const auto& [c, v] : row) {
                (void)v;
                if (c < 0 || c >= expect)
                    throw std::invalid_argument("ReluNetwork: row references column out of range");
            }
        if (layer.bias.size() != layer.rows.size())
            throw std::invalid_argument("ReluNetwork: bias length must match row count");
        layers_.push_back(std::move(layer));
    }

private:
    int input_dim_;
    std::vector<NetLayer> layers_;
};

inline Point evaluate(const ReluNetwork& net, const Point& x) {
    if (static_cast<int>(x.size()) != net.input_dim())
        throw std::invalid_argument("evaluate: expected " + std::to_string(net.input_dim()) +
                                    " inputs, got " + std::to_string(x.size()));
    for (double v : x)
        if (std::isnan(v)) throw std::invalid_argument("evaluate: NaN input rejected");
    Point cur = x;
    Point next;
    for (const auto& layer : net.layers()) {
        next.assign(layer.rows.size(), 0.0);
        for (std::size_t r = 0; r < layer.rows.size(); ++r) {
            double acc = 0.0;  // fixed left-to-right order for reproducibility
            for (const auto& [c, w] : layer.rows[r]) acc += w * cur[c];
            acc += layer.bias[r];
            if (layer.act == Act::relu) acc = acc > 0.0 ? acc : 0.0;
            next[r] = acc;
        }
        cur.swap(next);
    }
    return cur;
}

inline std::vector<Point> evaluate_batch(const ReluNetwork& net, const std::vector<Point>& xs) {
    std::vector<Point> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(evaluate(net, x));
    return out;
}

// ---------------------------------------------------------------------------
// Construction machinery.

namespace detail {

// A value expressible as constant + sum of coefficients over units of one
// specific depth (0 = the network inputs).
struct LinForm {
    int depth = 0;
    double constant = 0.0;
    std::vector<std::pair<int, double>> terms;
};

class MaxNetBuilder {
public:
    explicit MaxNetBuilder(int n) : n_(n) {
        if (n < 1 || n > 31) throw std::invalid_argument("network builder: need 1 <= n <= 31");
    }

    // k-th largest over the index set `mask`; drives the whole construction.
    LinForm value(int k, std::uint32_t mask) {
        int s = popcount(mask);
        if (k < 1 || k > s) throw std::invalid_argument("network builder: rank out of range");
        if (k == 1) return max_over(mask);
        std::uint64_t key = (static_cast<std::uint64_t>(k) << 32) | mask;
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        std::vector<std::uint32_t> members = bits(mask);
        std::vector<LinForm> leaves;
        leaves.reserve(members.size());
        for (std::uint32_t l : members) leaves.push_back(value(k - 1, mask & ~(1u << l)));
        LinForm out = reduce(leaves, /*take_max=*/false,
                             [&](std::size_t i) { return carry_key(k - 1, mask & ~(1u << members[i])); });
        memo_.emplace(key, out);
        return out;
    }

    // Advance a finished value to `depth` through carry pairs, memoized per
    // originating (k, mask) node so shared byes are built once.
    LinForm at_depth(int k, std::uint32_t mask, int depth) {
        LinForm base = value(k, mask);
        if (depth == base.depth) return base;
        if (depth < base.depth) throw std::logic_error("network builder: cannot rewind a value");
        auto& chain = carries_[carry_key(k, mask)];
        while (static_cast<int>(chain.size()) < depth - base.depth) {
            const LinForm& prev = chain.empty() ? base : chain.back();
            chain.push_back(carry_once(prev));
        }
        return chain[depth - base.depth - 1];
    }

    // Close the construction: emit the affine readout computing `outputs`
    // (all at the same depth, which must be the deepest layer built).
    ReluNetwork finish(const std::vector<LinForm>& outputs) {
        int final_depth = static_cast<int>(layers_.size());
        for (const auto& o : outputs)
            if (o.depth != final_depth)
                throw std::logic_error("network builder: output not at final depth");
        ReluNetwork net(n_);
        for (int t = 0; t < final_depth; ++t) {
            layers_[t].in_dim = net.output_dim();
            layers_[t].act = Act::relu;
            net.append_layer(std::move(layers_[t]));
        }
        NetLayer readout;
        readout.act = Act::identity;
        readout.in_dim = net.output_dim();
        for (const auto& o : outputs) {
            readout.rows.push_back(o.terms);
            readout.bias.push_back(o.constant);
        }
        net.append_layer(std::move(readout));
        return net;
    }

    // Comparator budget guard: subsets visited times tournament work. A full
    // sort needs about n(n+1)2^{n-2} comparators, so this caps n at 14.
    static void check_budget(int n, int k) {
        double work = 0.0, binom = 1.0;  // binom = C(n, i)
        for (int i = 0; i < k; ++i) {
            work += binom * (n - i) * (n - i);
            binom = binom * (n - i) / (i + 1);
        }
        if (work > 1e6)
            throw std::invalid_argument(
                "network construction exceeds the comparator budget (about " +
                std::to_string(static_cast<long long>(work)) +
                " comparator slots); the leave-one-out recursion grows as n^2 * 2^n");
    }

private:
    int n_;
    std::vector<NetLayer> layers_;
    std::unordered_map<std::uint64_t, LinForm> memo_;                  // (k, mask) -> value
    std::unordered_map<std::uint64_t, std::vector<LinForm>> carries_;  // (k, mask) -> later depths

    static std::uint64_t carry_key(int k, std::uint32_t mask) {
        return (static_cast<std::uint64_t>(k) << 32) | mask;
    }

    static int popcount(std::uint32_t m) {
        int c = 0;
        while (m) {
            m &= m - 1;
            ++c;
        }
        return c;
    }

    static std::vector<std::uint32_t> bits(std::uint32_t mask) {
        std::vector<std::uint32_t> out;
        for (std::uint32_t i = 0; i < 32; ++i)
            if (mask & (1u << i)) out.push_back(i);
        return out;
    }

    static int ceil_log2(int s) {
        int d = 0;
        while ((1 << d) < s) ++d;
        return d;
    }

    // Append one unit at `depth` (>= 1) and return its index within that layer.
    int add_unit(int depth, std::vector<std::pair<int, double>> row, double bias) {
        if (static_cast<int>(layers_.size()) < depth) layers_.resize(depth);
        NetLayer& l = layers_[depth - 1];
        l.rows.push_back(std::move(row));
        l.bias.push_back(bias);
        return l.out_dim() - 1;
    }

    // ReLU(sign * form) one layer up.
    int relu_unit(const LinForm& f, double sign) {
        std::vector<std::pair<int, double>> row;
        row.reserve(f.terms.size());
        for (const auto& [c, w] : f.terms) row.emplace_back(c, sign * w);
        return add_unit(f.depth + 1, std::move(row), sign * f.constant);
    }

    // ReLU(a - b) one layer up; a's terms first so the evaluation order matches
    // the exactness analysis of the comparator identities.
    int diff_unit(const LinForm& a, const LinForm& b) {
        if (a.depth != b.depth) throw std::logic_error("network builder: comparator depth skew");
        std::vector<std::pair<int, double>> row;
        row.reserve(a.terms.size() + b.terms.size());
        for (const auto& [c, w] : a.terms) row.emplace_back(c, w);
        for (const auto& [c, w] : b.terms) row.emplace_back(c, -w);
        return add_unit(a.depth + 1, std::move(row), a.constant - b.constant);
    }

    LinForm carry_once(const LinForm& f) {
        int p = relu_unit(f, 1.0);
        int q = relu_unit(f, -1.0);
        return LinForm{f.depth + 1, 0.0, {{p, 1.0}, {q, -1.0}}};
    }

    // max(a, b) = ReLU(a-b) + ReLU(b) - ReLU(-b): carried-b recombination.
    LinForm max2(const LinForm& a, const LinForm& b) {
        int u = diff_unit(a, b);
        int p = relu_unit(b, 1.0);
        int q = relu_unit(b, -1.0);
        return LinForm{a.depth + 1, 0.0, {{u, 1.0}, {p, 1.0}, {q, -1.0}}};
    }

    // min(a, b) = ReLU(a) - ReLU(-a) - ReLU(a-b): carried-a minus the hinge.
    LinForm min2(const LinForm& a, const LinForm& b) {
        int u = diff_unit(a, b);
        int p = relu_unit(a, 1.0);
        int q = relu_unit(a, -1.0);
        return LinForm{a.depth + 1, 0.0, {{p, 1.0}, {q, -1.0}, {u, -1.0}}};
    }

    // Balanced tournament over leaves (all at one depth). leaf_key(i) returns
    // the carry-memo key for leaf i, or 0 for none. Splitting at half the
    // padded size keeps the left branch exactly one round short of the merge.
    LinForm reduce(const std::vector<LinForm>& leaves, bool take_max,
                   const std::function<std::uint64_t(std::size_t)>& leaf_key) {
        return reduce_range(leaves, 0, leaves.size(), take_max, leaf_key);
    }

    LinForm reduce_range(const std::vector<LinForm>& leaves, std::size_t lo, std::size_t hi,
                         bool take_max, const std::function<std::uint64_t(std::size_t)>& leaf_key) {
        std::size_t s = hi - lo;
        if (s == 1) return leaves[lo];
        int rounds = ceil_log2(static_cast<int>(s));
        std::size_t h = static_cast<std::size_t>(1) << (rounds - 1);
        LinForm left = reduce_range(leaves, lo, lo + h, take_max, leaf_key);
        LinForm right = reduce_range(leaves, lo + h, hi, take_max, leaf_key);
        int join = left.depth;  // = leaves depth + rounds - 1
        if (right.depth < join) {
            std::uint64_t key = hi - lo - h == 1 ? leaf_key(lo + h) : 0;
            if (key != 0) {
                right = at_depth_key(key, right, join);
            } else {
                while (right.depth < join) right = carry_once(right);
            }
        }
        return take_max ? max2(left, right) : min2(left, right);
    }

    LinForm at_depth_key(std::uint64_t key, const LinForm& base, int depth) {
        auto& chain = carries_[key];
        while (static_cast<int>(chain.size()) < depth - base.depth) {
            const LinForm& prev = chain.empty() ? base : chain.back();
            chain.push_back(carry_once(prev));
        }
        return chain[depth - base.depth - 1];
    }

    // Tournament max over an index set; every intermediate is itself the max
    // over a sub-mask, so it is memoized as the rank-1 value of that mask.
    LinForm max_over(std::uint32_t mask) {
        int s = popcount(mask);
        std::uint64_t key = (static_cast<std::uint64_t>(1) << 32) | mask;
        auto it = memo_.find(key);
        if (it != memo_.end()) return it->second;
        LinForm out;
        if (s == 1) {
            std::uint32_t i = bits(mask)[0];
            out = LinForm{0, 0.0, {{static_cast<int>(i), 1.0}}};
        } else {
            int rounds = ceil_log2(s);
            std::vector<std::uint32_t> members = bits(mask);
            std::size_t h = static_cast<std::size_t>(1) << (rounds - 1);
            std::uint32_t left_mask = 0, right_mask = 0;
            for (std::size_t i = 0; i < members.size(); ++i)
                (i < h ? left_mask : right_mask) |= 1u << members[i];
            LinForm left = max_over(left_mask);
            LinForm right = at_depth(1, right_mask, rounds - 1);
            out = max2(left, right);
        }
        memo_.emplace(key, out);
        return out;
    }
};

}  // namespace detail

// ---------------------------------------------------------------------------
// Depth predictions (closed forms the constructors are tested against).

// ReLU rounds to finish rank k of N: sum_{t=0}^{k-1} ceil(log2(N - t)); one
// affine readout on top.
inline int max_k_depth_prediction(int N, int k) {
    if (k < 1 || k > N) throw std::invalid_argument("max_k_depth_prediction: need 1 <= k <= N");
    int d = 0;
    for (int t = 0; t < k; ++t) {
        int s = N - t, r = 0;
        while ((1 << r) < s) ++r;
        d += r;
    }
    return d + 1;
}

inline int sort_depth_prediction(int n) { return max_k_depth_prediction(n, n); }

// ---------------------------------------------------------------------------
// Constructors.

inline ReluNetwork max_k_network(int N, int k) {
    if (N < 1) throw std::invalid_argument("max_k_network: N >= 1 required");
    if (k < 1 || k > N) throw std::invalid_argument("max_k_network: need 1 <= k <= N");
    detail::MaxNetBuilder::check_budget(N, k);
    detail::MaxNetBuilder b(N);
    std::uint32_t full = N == 31 ? 0x7fffffffu : ((1u << N) - 1);
    detail::LinForm out = b.value(k, full);
    return b.finish({out});
}

inline ReluNetwork sort_network(int n) {
    if (n < 1) throw std::invalid_argument("sort_network: n >= 1 required");
    detail::MaxNetBuilder::check_budget(n, n);
    detail::MaxNetBuilder b(n);
    std::uint32_t full = (1u << n) - 1;
    int final_depth = 0;
    std::vector<detail::LinForm> outs;
    for (int j = 1; j <= n; ++j) {
        detail::LinForm f = b.value(j, full);
        final_depth = std::max(final_depth, f.depth);
        outs.push_back(f);
    }
    for (int j = 1; j <= n; ++j) outs[j - 1] = b.at_depth(j, full, final_depth);
    return b.finish(outs);
}

inline ReluNetwork max2_gadget() { return max_k_network(2, 1); }
inline ReluNetwork min2_gadget() { return max_k_network(2, 2); }

// Stack a head network on top of the sort front end. The sort's affine readout
// stays as an interior identity-activation layer; fusing it into the head's
// first layer would compute the same function but break the advertised
// depth-and-parameter accounting (depth = sum, nonzeros = sum).
inline ReluNetwork compose_invariant(const ReluNetwork& f_net, const ReluNetwork& sort) {
    if (f_net.input_dim() != sort.output_dim())
        throw std::invalid_argument("compose_invariant: head expects " +
                                    std::to_string(f_net.input_dim()) + " inputs but sort yields " +
                                    std::to_string(sort.output_dim()));
    ReluNetwork out(sort.input_dim());
    for (const auto& l : sort.layers()) out.append_layer(l);
    for (const auto& l : f_net.layers()) out.append_layer(l);
    return out;
}

// ---------------------------------------------------------------------------
// JSON: dense layer-major schema
//   {widths: [...], layers: [{W: [[...]], b: [...], act: "relu"|"id"}]}.

inline nlohmann::json to_json(const ReluNetwork& net) {
    std::size_t dense_elems = 0;
    for (const auto& l : net.layers())
        dense_elems += static_cast<std::size_t>(l.out_dim()) * l.in_dim;
    if (dense_elems > 50'000'000)
        throw std::runtime_error("network too large for dense JSON export (" +
                                 std::to_string(dense_elems) + " matrix entries)");
    nlohmann::json j;
    j["widths"] = net.widths();
    j["layers"] = nlohmann::json::array();
    for (const auto& l : net.layers()) {
        nlohmann::json jl;
        std::vector<std::vector<double>> W(l.rows.size(), std::vector<double>(l.in_dim, 0.0));
        for (std::size_t r = 0; r < l.rows.size(); ++r)
            for (const auto& [c, w] : l.rows[r]) W[r][c] += w;
        jl["W"] = W;
        jl["b"] = l.bias;
        jl["act"] = l.act == Act::relu ? "relu" : "id";
        j["layers"].push_back(std::move(jl));
    }
    return j;
}

inline ReluNetwork network_from_json(const nlohmann::json& j) {
    std::vector<int> widths = j.at("widths").get<std::vector<int>>();
    if (widths.empty()) throw std::invalid_argument("network JSON: widths missing");
    ReluNetwork net(widths.front());
    for (const auto& jl : j.at("layers")) {
        NetLayer l;
        auto W = jl.at("W").get<std::vector<std::vector<double>>>();
        l.bias = jl.at("b").get<std::vector<double>>();
        std::string act = jl.at("act").get<std::string>();
        if (act == "relu")
            l.act = Act::relu;
        else if (act == "id")
            l.act = Act::identity;
        else
            throw std::invalid_argument("network JSON: unknown activation '" + act + "'");
        l.in_dim = net.output_dim();
        for (const auto& wrow : W) {
            if (static_cast<int>(wrow.size()) != l.in_dim)
                throw std::invalid_argument("network JSON: ragged weight matrix");
            std::vector<std::pair<int, double>> row;
            for (int c = 0; c < l.in_dim; ++c)
                if (wrow[c] != 0.0) row.emplace_back(c, wrow[c]);
            l.rows.push_back(std::move(row));
        }
        net.append_layer(std::move(l));
    }
    std::vector<int> got = net.widths();
    if (got != widths) throw std::invalid_argument("network JSON: widths do not match layers");
    return net;
}

}  // namespace qfslab
