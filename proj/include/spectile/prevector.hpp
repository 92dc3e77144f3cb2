#pragma once

#include <map>

#include "spectile/tiling.hpp"

namespace spectile {

// Finitely supported integer function on tiling vertices.
struct Prevector {
    std::map<Vertex, int> entries;

    void add(const Vertex& v, int val) {
        if (val == 0) return;
        auto it = entries.find(v);
        if (it == entries.end()) {
            entries.emplace(v, val);
        } else {
            it->second += val;
            if (it->second == 0) entries.erase(it);
        }
    }
    int at(const Vertex& v) const {
        auto it = entries.find(v);
        return it == entries.end() ? 0 : it->second;
    }
    int l1() const {
        int s = 0;
        for (const auto& [v, c] : entries) s += std::abs(c);
        return s;
    }
    bool empty() const { return entries.empty(); }
    SignedConfig config() const { return SignedConfig(entries.begin(), entries.end()); }

    friend Prevector operator+(const Prevector& a, const Prevector& b) {
        Prevector r = a;
        for (const auto& [v, c] : b.entries) r.add(v, c);
        return r;
    }
    friend Prevector operator-(const Prevector& a) {
        Prevector r;
        for (const auto& [v, c] : a.entries) r.entries.emplace(v, -c);
        return r;
    }
    friend bool operator==(const Prevector& a, const Prevector& b) { return a.entries == b.entries; }
};

inline Prevector graph_laplacian(const TilingSpec& t, const Prevector& eta) {
    Prevector out;
    for (const auto& [v, c] : eta.entries) {
        out.add(v, c * t.degree[static_cast<size_t>(v.orbit)]);
        for (const Vertex& w : t.neighbors_of(v)) out.add(w, -c);
    }
    return out;
}

// Highest rho in {0,1,2} the prevector satisfies: sum zero for C^1 and
// vanishing stopped first moment for C^2.  For the builtin tilings the
// stopped expectation of a vertex equals its embedded position, so the moment
// is the exact rational position sum.
inline int class_of(const TilingSpec& t, const Prevector& nu) {
    int64_t total = 0;
    for (const auto& [v, c] : nu.entries) total += c;
    if (total != 0) return 0;
    std::array<Rational, kMaxDim> moment{};
    for (const auto& [v, c] : nu.entries) {
        auto p = t.position(v);
        for (int i = 0; i < t.dim; ++i) moment[static_cast<size_t>(i)] += Rational(c) * p[static_cast<size_t>(i)];
    }
    for (int i = 0; i < t.dim; ++i)
        if (!moment[static_cast<size_t>(i)].is_zero()) return 1;
    return 2;
}

enum class Boundary { Periodic, Open };

inline int required_class(const TilingSpec& t, Boundary, int dimension) {
    (void)t;
    if (dimension < 2) throw Error("required_class: dimension must be >= 2");
    if (dimension == 2) return 2;
    if (dimension <= 4) return 1;
    return 0;
}

// Unique anti-symmetric extension of nu under the reflections in the k = 0
// planes of the chosen families.  The input support must be strictly on one
// side of each plane.
inline Prevector antisymmetrize(const TilingSpec& t, const Prevector& nu, const std::vector<int>& families) {
    Prevector cur = nu;
    for (int fam : families) {
        if (fam < 0 || fam >= static_cast<int>(t.reflections.size())) throw Error("antisymmetrize: unknown family");
        const auto& f = t.reflections[static_cast<size_t>(fam)];
        Prevector next;
        for (const auto& [v, c] : cur.entries) {
            if (f.level(v).is_zero()) throw Error("antisymmetrize: support touches a mirror plane");
            next.add(v, c);
            next.add(f.reflect(v, 0), -c);
        }
        cur = std::move(next);
    }
    return cur;
}

inline bool is_antisymmetric(const TilingSpec& t, const Prevector& nu, const std::vector<int>& families) {
    for (int fam : families) {
        const auto& f = t.reflections[static_cast<size_t>(fam)];
        for (const auto& [v, c] : nu.entries) {
            if (nu.at(f.reflect(v, 0)) != -c) return false;
        }
    }
    return true;
}

// Partition of supp nu into 2-path connected components, ordered by the
// canonical form of each part.
inline std::vector<std::vector<Vertex>> components(const TilingSpec& t, const Prevector& nu) {
    std::vector<Vertex> supp;
    for (const auto& [v, c] : nu.entries) supp.push_back(v);
    size_t n = supp.size();
    std::vector<size_t> parent(n);
    for (size_t i = 0; i < n; ++i) parent[i] = i;
    std::function<size_t(size_t)> find = [&](size_t i) { return parent[i] == i ? i : parent[i] = find(parent[i]); };
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            if (graph_distance(t, supp[i], supp[j], 2) != kDistanceExceedsCap) parent[find(i)] = find(j);
    std::map<size_t, std::vector<Vertex>> groups;
    for (size_t i = 0; i < n; ++i) groups[find(i)].push_back(supp[i]);
    std::vector<std::vector<Vertex>> out;
    for (auto& [root, verts] : groups) {
        std::sort(verts.begin(), verts.end());
        out.push_back(verts);
    }
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) {
        SignedConfig ca, cb;
        for (const Vertex& v : a) ca.push_back({v, 1});
        for (const Vertex& v : b) cb.push_back({v, 1});
        std::string ka = config_key(canonicalize(t, ca)), kb = config_key(canonicalize(t, cb));
        if (ka != kb) return ka < kb;
        return a < b;
    });
    return out;
}

}  // namespace spectile
