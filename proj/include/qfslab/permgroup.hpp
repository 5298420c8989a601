#pragma once

// Permutations of {0..n-1}, small permutation groups by explicit enumeration, and
// coset-representative systems.
//
// Conventions, used consistently everywhere:
//   * indices are 0-based in the C++ API; the JSON interchange format is 1-based
//     (a permutation serializes as its image array, e.g. [2,1,3]);
//   * composition (g*h)(i) = g(h(i));
//   * the action on a vector places coordinate i at position g(i):
//     (g.x)_{g(i)} = x_i, equivalently (g.x)_i = x_{g^{-1}(i)},
//     which makes (g*h).x == g.(h.x) a left action.

#include <algorithm>
#include <cstdint>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qfslab {

class Permutation {
  public:
    // images[i] = image of i; must be a bijection on {0..n-1}.
    explicit Permutation(std::vector<int> images) : img_(std::move(images)) {
        std::vector<char> seen(img_.size(), 0);
        for (int v : img_) {
            if (v < 0 || v >= static_cast<int>(img_.size()) || seen[v])
                throw std::invalid_argument("Permutation: images are not a bijection");
            seen[v] = 1;
        }
    }

    static Permutation identity(int n) {
        std::vector<int> img(n);
        for (int i = 0; i < n; ++i) img[i] = i;
        return Permutation(std::move(img));
    }

    int degree() const { return static_cast<int>(img_.size()); }
    int operator()(int i) const { return img_[i]; }
    const std::vector<int>& images() const { return img_; }

    bool is_identity() const {
        for (int i = 0; i < degree(); ++i)
            if (img_[i] != i) return false;
        return true;
    }

    // (this * other)(i) = this(other(i)).
    Permutation compose(const Permutation& other) const {
        if (degree() != other.degree())
            throw std::invalid_argument("Permutation::compose: degree mismatch");
        std::vector<int> img(img_.size());
        for (int i = 0; i < degree(); ++i) img[i] = img_[other.img_[i]];
        return Permutation(std::move(img));
    }

    Permutation inverse() const {
        std::vector<int> img(img_.size());
        for (int i = 0; i < degree(); ++i) img[img_[i]] = i;
        return Permutation(std::move(img));
    }

    // y with y[g(i)] = x[i].
    template <typename T>
    std::vector<T> act(const std::vector<T>& x) const {
        if (static_cast<int>(x.size()) != degree())
            throw std::invalid_argument("Permutation::act: dimension mismatch");
        std::vector<T> y(x.size());
        for (int i = 0; i < degree(); ++i) y[img_[i]] = x[i];
        return y;
    }

    friend bool operator==(const Permutation& a, const Permutation& b) { return a.img_ == b.img_; }
    friend bool operator!=(const Permutation& a, const Permutation& b) { return a.img_ != b.img_; }
    // Lexicographic order on image arrays; the canonical total order used for
    // element lists and coset-representative selection.
    friend bool operator<(const Permutation& a, const Permutation& b) { return a.img_ < b.img_; }

  private:
    std::vector<int> img_;
};

inline void to_json(nlohmann::json& j, const Permutation& p) {
    std::vector<int> one_based(p.images());
    for (int& v : one_based) ++v;
    j = one_based;
}

inline Permutation perm_from_json(const nlohmann::json& j) {
    std::vector<int> img = j.get<std::vector<int>>();
    for (int& v : img) --v;
    return Permutation(std::move(img));
}

inline void from_json(const nlohmann::json& j, Permutation& p) { p = perm_from_json(j); }

inline Permutation perm_compose(const Permutation& g, const Permutation& h) { return g.compose(h); }
inline Permutation perm_inverse(const Permutation& g) { return g.inverse(); }

template <typename T>
std::vector<T> perm_apply(const Permutation& g, const std::vector<T>& x) {
    return g.act(x);
}

enum class NamedGroup { symmetric, cyclic, trivial };

// A finite permutation group held as its full, lexicographically sorted element list.
class PermGroup {
  public:
    // Breadth-first closure of the generating set. Throws if the closure exceeds
    // max_order (default 8! = 40320) or the generators have mixed degrees.
    static PermGroup from_generators(const std::vector<Permutation>& generators,
                                     std::size_t max_order = 40320) {
        if (generators.empty())
            throw std::invalid_argument("PermGroup::from_generators: empty generator list");
        int n = generators.front().degree();
        for (const auto& g : generators)
            if (g.degree() != n)
                throw std::invalid_argument("PermGroup::from_generators: degree mismatch");

        std::set<std::vector<int>> seen;
        std::queue<Permutation> todo;
        Permutation e = Permutation::identity(n);
        seen.insert(e.images());
        todo.push(e);
        while (!todo.empty()) {
            Permutation cur = todo.front();
            todo.pop();
            for (const auto& g : generators) {
                Permutation next = cur.compose(g);
                if (seen.insert(next.images()).second) {
                    if (seen.size() > max_order)
                        throw std::runtime_error(
                            "PermGroup::from_generators: closure exceeds max_order (" +
                            std::to_string(max_order) + ")");
                    todo.push(next);
                }
            }
        }
        std::vector<Permutation> elems;
        elems.reserve(seen.size());
        for (const auto& img : seen) elems.emplace_back(img);
        return PermGroup(n, std::move(elems), generators);
    }

    static PermGroup named(NamedGroup kind, int n, std::size_t max_order = 10000000) {
        if (n < 1) throw std::invalid_argument("PermGroup::named: degree must be >= 1");
        switch (kind) {
            case NamedGroup::trivial:
                return PermGroup(n, {Permutation::identity(n)}, {});
            case NamedGroup::cyclic: {
                if (n == 1) return named(NamedGroup::trivial, 1);
                Permutation c = n_cycle(n);
                std::vector<Permutation> elems;
                Permutation cur = Permutation::identity(n);
                for (int k = 0; k < n; ++k) {
                    elems.push_back(cur);
                    cur = cur.compose(c);
                }
                std::sort(elems.begin(), elems.end());
                return PermGroup(n, std::move(elems), {c});
            }
            case NamedGroup::symmetric: {
                double fact = 1.0;
                for (int i = 2; i <= n; ++i) fact *= i;
                if (fact > static_cast<double>(max_order))
                    throw std::runtime_error("PermGroup::named: n! exceeds max_order");
                std::vector<int> img(n);
                for (int i = 0; i < n; ++i) img[i] = i;
                std::vector<Permutation> elems;
                elems.reserve(static_cast<std::size_t>(fact));
                do {
                    elems.emplace_back(img);
                } while (std::next_permutation(img.begin(), img.end()));
                std::vector<Permutation> gens;
                if (n >= 2) {
                    std::vector<int> t(n);
                    for (int i = 0; i < n; ++i) t[i] = i;
                    std::swap(t[0], t[1]);
                    gens.emplace_back(std::move(t));
                }
                if (n >= 3) gens.push_back(n_cycle(n));
                return PermGroup(n, std::move(elems), std::move(gens));
            }
        }
        throw std::invalid_argument("PermGroup::named: unknown kind");
    }

    int degree() const { return degree_; }
    std::size_t order() const { return elements_.size(); }
    // Sorted lexicographically; elements().front() is the identity.
    const std::vector<Permutation>& elements() const { return elements_; }
    const std::vector<Permutation>& generators() const { return generators_; }

    bool contains(const Permutation& p) const {
        if (p.degree() != degree_) return false;
        return std::binary_search(elements_.begin(), elements_.end(), p);
    }

    bool is_subgroup_of(const PermGroup& big) const {
        if (degree_ != big.degree_ || order() > big.order()) return false;
        for (const auto& h : elements_)
            if (!big.contains(h)) return false;
        return true;
    }

    // True iff this is the full symmetric group on its degree.
    bool is_full_symmetric() const {
        double fact = 1.0;
        for (int i = 2; i <= degree_; ++i) {
            fact *= i;
            if (fact > 1e18) return false;
        }
        return static_cast<double>(order()) == fact;
    }

    friend bool operator==(const PermGroup& a, const PermGroup& b) {
        return a.degree_ == b.degree_ && a.elements_ == b.elements_;
    }

    // Subgroup fixing index i (0-based).
    friend PermGroup stabilizer(const PermGroup& G, int i) {
        if (i < 0 || i >= G.degree()) throw std::invalid_argument("stabilizer: index out of range");
        std::vector<Permutation> elems;
        for (const auto& g : G.elements_)
            if (g(i) == i) elems.push_back(g);
        return PermGroup(G.degree_, std::move(elems), {});
    }

    // Orbits of the index set, each sorted, listed by smallest member.
    friend std::vector<std::vector<int>> orbits(const PermGroup& G) {
        std::vector<char> done(G.degree(), 0);
        std::vector<std::vector<int>> out;
        for (int i = 0; i < G.degree(); ++i) {
            if (done[i]) continue;
            std::set<int> orb;
            for (const auto& g : G.elements_) orb.insert(g(i));
            out.emplace_back(orb.begin(), orb.end());
            for (int v : out.back()) done[v] = 1;
        }
        return out;
    }

    friend bool is_transitive(const PermGroup& G) { return orbits(G).size() == 1; }

    // Used internally by operations that already hold a closed element set.
    static PermGroup from_elements(int degree, std::vector<Permutation> elements,
                                   std::vector<Permutation> generators = {}) {
        return PermGroup(degree, std::move(elements), std::move(generators));
    }

  private:
    PermGroup(int degree, std::vector<Permutation> elements, std::vector<Permutation> generators)
        : degree_(degree), elements_(std::move(elements)), generators_(std::move(generators)) {
        if (elements_.empty()) throw std::invalid_argument("PermGroup: empty element list");
        std::sort(elements_.begin(), elements_.end());
    }

    static Permutation n_cycle(int n) {
        std::vector<int> img(n);
        for (int i = 0; i < n; ++i) img[i] = (i + 1) % n;
        return Permutation(std::move(img));
    }

    int degree_;
    std::vector<Permutation> elements_;
    std::vector<Permutation> generators_;
};

// Groups serialize as degree plus generator list (1-based image arrays).
inline void to_json(nlohmann::json& j, const PermGroup& G) {
    nlohmann::json gens = nlohmann::json::array();
    if (G.generators().empty() && G.order() > 1) {
        // Fall back to the full element list when no generating set was recorded.
        for (const auto& g : G.elements()) gens.push_back(g);
    } else {
        for (const auto& g : G.generators()) gens.push_back(g);
    }
    j = nlohmann::json{{"degree", G.degree()}, {"generators", gens}};
}

inline PermGroup group_from_json(const nlohmann::json& j, std::size_t max_order = 40320) {
    int degree = j.at("degree").get<int>();
    std::vector<Permutation> gens;
    for (const auto& item : j.at("generators")) gens.push_back(perm_from_json(item));
    if (gens.empty()) return PermGroup::named(NamedGroup::trivial, degree);
    for (const auto& g : gens)
        if (g.degree() != degree)
            throw std::invalid_argument("group_from_json: generator degree != declared degree");
    return PermGroup::from_generators(gens, max_order);
}

// Complete system of representatives {g_k} for the right cosets H\G, so that
// G is the disjoint union of the H*g_k. Each representative is the
// lexicographically smallest member of its coset.
struct CosetSystem {
    int degree = 0;
    std::size_t subgroup_order = 0;
    std::vector<Permutation> representatives;

    std::size_t count() const { return representatives.size(); }
};

inline CosetSystem coset_representatives(const PermGroup& H, const PermGroup& G) {
    if (!H.is_subgroup_of(G))
        throw std::invalid_argument("coset_representatives: H is not a subgroup of G");
    std::set<std::vector<int>> covered;
    CosetSystem out;
    out.degree = G.degree();
    out.subgroup_order = H.order();
    for (const auto& g : G.elements()) {
        if (covered.count(g.images())) continue;
        out.representatives.push_back(g);
        for (const auto& h : H.elements()) covered.insert(h.compose(g).images());
    }
    if (out.count() * H.order() != G.order())
        throw std::runtime_error("coset_representatives: cosets do not partition G");
    return out;
}

}  // namespace qfslab
