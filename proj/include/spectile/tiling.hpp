#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <queue>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "spectile/common.hpp"
#include "spectile/rational.hpp"

namespace spectile {

struct NeighborOffset {
    int target_orbit = 0;
    Coord disp = zero_coord();
};

// Integer matrix acting on lattice coordinates.
struct IntMat {
    int dim = 0;
    std::array<std::array<int, kMaxDim>, kMaxDim> m{};

    static IntMat identity(int d) {
        IntMat r;
        r.dim = d;
        for (int i = 0; i < d; ++i) r.m[i][i] = 1;
        return r;
    }
    Coord apply(const Coord& n) const {
        Coord out = zero_coord();
        for (int i = 0; i < dim; ++i) {
            int s = 0;
            for (int j = 0; j < dim; ++j) s += m[i][j] * n[j];
            out[i] = static_cast<int16_t>(s);
        }
        return out;
    }
    friend IntMat operator*(const IntMat& a, const IntMat& b) {
        IntMat r;
        r.dim = a.dim;
        for (int i = 0; i < a.dim; ++i)
            for (int j = 0; j < a.dim; ++j) {
                int s = 0;
                for (int k = 0; k < a.dim; ++k) s += a.m[i][k] * b.m[k][j];
                r.m[i][j] = s;
            }
        return r;
    }
    friend bool operator==(const IntMat& a, const IntMat& b) {
        if (a.dim != b.dim) return false;
        for (int i = 0; i < a.dim; ++i)
            for (int j = 0; j < a.dim; ++j)
                if (a.m[i][j] != b.m[i][j]) return false;
        return true;
    }
};

// Vertex map (o, n) -> (orbit_map[o], M n + shift[o]).
struct PointGroupElem {
    IntMat M;
    std::vector<int> orbit_map;
    std::vector<Coord> shift;

    Vertex apply(const Vertex& v) const {
        Vertex r;
        r.orbit = static_cast<int16_t>(orbit_map[static_cast<size_t>(v.orbit)]);
        r.n = add(M.apply(v.n), shift[static_cast<size_t>(v.orbit)]);
        return r;
    }
};

// A family of parallel mirror hyperplanes.  level(v) = <normal_form, n> +
// orbit_level[o] is an exact rational; planes sit at level = k * spacing and
// reflection in plane k maps (o, n) to (orbit_map[o], M n + shift[o] + k *
// k_shift).
struct ReflectionFamily {
    std::string name;
    Coord normal_form = zero_coord();
    std::vector<Rational> orbit_level;
    int spacing = 1;
    IntMat M;
    std::vector<int> orbit_map;
    std::vector<Coord> shift;
    Coord k_shift = zero_coord();

    Rational level(const Vertex& v) const {
        int64_t s = 0;
        for (int i = 0; i < kMaxDim; ++i) s += static_cast<int64_t>(normal_form[i]) * v.n[i];
        return Rational(s) + orbit_level[static_cast<size_t>(v.orbit)];
    }
    Vertex reflect(const Vertex& v, int k) const {
        Vertex r;
        r.orbit = static_cast<int16_t>(orbit_map[static_cast<size_t>(v.orbit)]);
        Coord n = add(M.apply(v.n), shift[static_cast<size_t>(v.orbit)]);
        for (int i = 0; i < kMaxDim; ++i) n[i] = static_cast<int16_t>(n[i] + k * k_shift[i]);
        r.n = n;
        return r;
    }
};

enum class GroupKind { Explicit, SignedPermutations };

struct TilingSpec {
    std::string name;
    int dim = 0;
    int norbits = 1;
    std::vector<std::vector<NeighborOffset>> neighbors;  // per orbit
    std::vector<int> degree;                             // per orbit
    std::vector<std::array<Rational, kMaxDim>> orbit_offset;
    std::vector<std::vector<double>> basis;  // embedding, for emission only
    std::vector<PointGroupElem> point_group;
    GroupKind group_kind = GroupKind::Explicit;
    std::vector<ReflectionFamily> reflections;
    // Bound on the number of walk steps needed to reach orbit 0 from any
    // orbit; 0 means single-orbit lattice tiling.
    int stop_bound = 0;

    bool is_lattice() const { return norbits == 1; }

    std::vector<Vertex> neighbors_of(const Vertex& v) const {
        std::vector<Vertex> out;
        const auto& offs = neighbors[static_cast<size_t>(v.orbit)];
        out.reserve(offs.size());
        for (const auto& o : offs) {
            Vertex w;
            w.orbit = static_cast<int16_t>(o.target_orbit);
            w.n = add(v.n, o.disp);
            out.push_back(w);
        }
        return out;
    }

    // Exact rational embedding coordinates in the lattice basis.
    std::array<Rational, kMaxDim> position(const Vertex& v) const {
        std::array<Rational, kMaxDim> p = orbit_offset[static_cast<size_t>(v.orbit)];
        for (int i = 0; i < dim; ++i) p[i] += Rational(v.n[i]);
        return p;
    }
};

inline constexpr int kDistanceExceedsCap = -1;

inline int graph_distance(const TilingSpec& t, const Vertex& u, const Vertex& w, int cap) {
    if (cap < 0) throw Error("graph_distance: negative cap");
    if (u == w) return 0;
    // Bidirectional would be cheaper, plain BFS is fine at the caps used here.
    std::unordered_map<Vertex, int, VertexHash> dist;
    dist[u] = 0;
    std::queue<Vertex> q;
    q.push(u);
    while (!q.empty()) {
        Vertex v = q.front();
        q.pop();
        int dv = dist[v];
        if (dv >= cap) continue;
        for (const Vertex& x : t.neighbors_of(v)) {
            if (dist.count(x)) continue;
            if (x == w) return dv + 1;
            dist[x] = dv + 1;
            q.push(x);
        }
    }
    return kDistanceExceedsCap;
}

// All vertices within graph distance r of the given set.
inline std::vector<Vertex> ball(const TilingSpec& t, const std::vector<Vertex>& S, int r) {
    std::unordered_set<Vertex, VertexHash> seen(S.begin(), S.end());
    std::vector<Vertex> frontier(S.begin(), S.end());
    for (int step = 0; step < r; ++step) {
        std::vector<Vertex> next;
        for (const Vertex& v : frontier)
            for (const Vertex& w : t.neighbors_of(v))
                if (seen.insert(w).second) next.push_back(w);
        frontier = std::move(next);
    }
    std::vector<Vertex> out(seen.begin(), seen.end());
    std::sort(out.begin(), out.end());
    return out;
}

inline Vertex reflect(const TilingSpec& t, int family, int k, const Vertex& v) {
    if (family < 0 || family >= static_cast<int>(t.reflections.size()))
        throw Error("reflect: unknown plane family");
    return t.reflections[static_cast<size_t>(family)].reflect(v, k);
}

// ---------------------------------------------------------------------------
// Canonical forms of signed configurations under translation, point group and
// global sign flip.

using SignedConfig = std::vector<std::pair<Vertex, int>>;

namespace detail {

inline SignedConfig translate_anchor(SignedConfig c) {
    // Anchor the lex-smallest vertex of the smallest orbit at coordinate 0;
    // lex order within an orbit is translation invariant.
    size_t best = 0;
    for (size_t i = 1; i < c.size(); ++i)
        if (c[i].first < c[best].first) best = i;
    Coord tshift = neg(c[best].first.n);
    for (auto& [v, s] : c) v.n = add(v.n, tshift);
    std::sort(c.begin(), c.end());
    return c;
}

inline bool config_less(const SignedConfig& a, const SignedConfig& b) {
    return a < b;
}

inline void signed_perm_candidates(const SignedConfig& base, int dim, std::vector<SignedConfig>& out) {
    // Canonical under coordinate permutations and sign changes.  Only axes
    // touched by the configuration matter; untouched axes are interchangeable.
    std::vector<int> active;
    for (int i = 0; i < dim; ++i) {
        for (const auto& [v, s] : base)
            if (v.n[i] != 0) {
                active.push_back(i);
                break;
            }
    }
    if (active.size() > 8) throw Error("canonicalize: too many active axes for signed-permutation group");
    std::vector<int> perm(active.begin(), active.end());
    std::sort(perm.begin(), perm.end());
    do {
        for (int signs = 0; signs < (1 << active.size()); ++signs) {
            SignedConfig c = base;
            for (auto& [v, s] : c) {
                Coord n = zero_coord();
                for (size_t j = 0; j < active.size(); ++j) {
                    int val = v.n[active[j]];
                    if (signs & (1 << j)) val = -val;
                    n[static_cast<size_t>(perm[j])] = static_cast<int16_t>(val);
                }
                v.n = n;
            }
            out.push_back(translate_anchor(std::move(c)));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
}

}  // namespace detail

inline SignedConfig canonicalize(const TilingSpec& t, const SignedConfig& config) {
    if (config.empty()) return {};
    SignedConfig best;
    bool have = false;
    auto consider = [&](SignedConfig c) {
        if (!have || detail::config_less(c, best)) {
            best = std::move(c);
            have = true;
        }
    };
    for (int sgn = 0; sgn < 2; ++sgn) {
        SignedConfig flipped = config;
        if (sgn) {
            for (auto& [v, s] : flipped) s = -s;
        }
        if (t.group_kind == GroupKind::SignedPermutations) {
            for (size_t anchor = 0; anchor < flipped.size(); ++anchor) {
                SignedConfig c = flipped;
                Coord tshift = neg(flipped[anchor].first.n);
                for (auto& [v, s] : c) v.n = add(v.n, tshift);
                std::vector<SignedConfig> cands;
                detail::signed_perm_candidates(c, t.dim, cands);
                for (auto& cc : cands) consider(std::move(cc));
            }
        } else {
            for (const auto& g : t.point_group) {
                SignedConfig c = flipped;
                for (auto& [v, s] : c) v = g.apply(v);
                consider(detail::translate_anchor(std::move(c)));
            }
        }
    }
    return best;
}

inline std::string config_key(const SignedConfig& c) {
    std::string key;
    key.reserve(c.size() * (kMaxDim * 2 + 6));
    for (const auto& [v, s] : c) {
        key.append(reinterpret_cast<const char*>(&v.orbit), sizeof(v.orbit));
        key.append(reinterpret_cast<const char*>(v.n.data()), sizeof(int16_t) * kMaxDim);
        int32_t sv = s;
        key.append(reinterpret_cast<const char*>(&sv), sizeof(sv));
    }
    return key;
}

// ---------------------------------------------------------------------------
// Builtin tilings.

namespace detail {

inline PointGroupElem pg(const IntMat& M, std::vector<int> omap, std::vector<Coord> shift) {
    PointGroupElem e;
    e.M = M;
    e.orbit_map = std::move(omap);
    e.shift = std::move(shift);
    return e;
}

inline IntMat mat2(int a, int b, int c, int d) {
    IntMat m;
    m.dim = 2;
    m.m[0][0] = a;
    m.m[0][1] = b;
    m.m[1][0] = c;
    m.m[1][1] = d;
    return m;
}

inline Coord cvec(std::initializer_list<int> xs) {
    Coord c = zero_coord();
    int i = 0;
    for (int x : xs) c[static_cast<size_t>(i++)] = static_cast<int16_t>(x);
    return c;
}

inline PointGroupElem compose(const PointGroupElem& g2, const PointGroupElem& g1) {
    PointGroupElem r;
    r.M = g2.M * g1.M;
    size_t norb = g1.orbit_map.size();
    r.orbit_map.resize(norb);
    r.shift.resize(norb);
    for (size_t o = 0; o < norb; ++o) {
        int mid = g1.orbit_map[o];
        r.orbit_map[o] = g2.orbit_map[static_cast<size_t>(mid)];
        r.shift[o] = add(g2.M.apply(g1.shift[o]), g2.shift[static_cast<size_t>(mid)]);
    }
    return r;
}

inline std::string pg_key(const PointGroupElem& e) {
    std::string k;
    k.append(reinterpret_cast<const char*>(&e.M.m), sizeof(e.M.m));
    for (int o : e.orbit_map) k.append(reinterpret_cast<const char*>(&o), sizeof(o));
    for (const Coord& c : e.shift) k.append(reinterpret_cast<const char*>(c.data()), sizeof(int16_t) * kMaxDim);
    return k;
}

// Elements are kept modulo lattice translation (shift of orbit 0 pinned to
// zero); canonical forms quotient translations separately.
inline PointGroupElem normalize_mod_translation(PointGroupElem e) {
    Coord t0 = e.shift[0];
    for (auto& s : e.shift) s = sub(s, t0);
    return e;
}

inline std::vector<PointGroupElem> close_group(std::vector<PointGroupElem> gens, size_t cap) {
    for (auto& g : gens) g = normalize_mod_translation(g);
    std::vector<PointGroupElem> elems;
    std::set<std::string> seen;
    PointGroupElem id;
    id.M = IntMat::identity(gens.empty() ? 0 : gens[0].M.dim);
    id.orbit_map.resize(gens.empty() ? 1 : gens[0].orbit_map.size());
    for (size_t o = 0; o < id.orbit_map.size(); ++o) id.orbit_map[o] = static_cast<int>(o);
    id.shift.assign(id.orbit_map.size(), zero_coord());
    elems.push_back(id);
    seen.insert(pg_key(id));
    size_t head = 0;
    while (head < elems.size()) {
        PointGroupElem cur = elems[head++];
        for (const auto& g : gens) {
            PointGroupElem nx = normalize_mod_translation(compose(g, cur));
            if (seen.insert(pg_key(nx)).second) {
                elems.push_back(nx);
                if (elems.size() > cap) throw Error("point group closure exceeded cap");
            }
        }
    }
    return elems;
}

inline void push_pm_neighbors(std::vector<NeighborOffset>& v, std::initializer_list<int> disp) {
    NeighborOffset a;
    a.disp = cvec(disp);
    v.push_back(a);
    NeighborOffset b;
    b.disp = neg(a.disp);
    v.push_back(b);
}

inline TilingSpec make_tri() {
    TilingSpec t;
    t.name = "tri";
    t.dim = 2;
    t.norbits = 1;
    t.neighbors.resize(1);
    push_pm_neighbors(t.neighbors[0], {1, 0});
    push_pm_neighbors(t.neighbors[0], {0, 1});
    push_pm_neighbors(t.neighbors[0], {1, -1});
    t.degree = {6};
    t.orbit_offset.resize(1);
    t.basis = {{1.0, 0.5}, {0.0, std::sqrt(3.0) / 2.0}};
    IntMat r60 = mat2(0, -1, 1, 1);
    IntMat flip = mat2(0, 1, 1, 0);
    t.point_group = close_group({pg(r60, {0}, {zero_coord()}), pg(flip, {0}, {zero_coord()})}, 16);
    // Mirrors along lattice rows: level = n2, reflection (n1, n2) -> (n1+n2, -n2).
    ReflectionFamily f;
    f.name = "row";
    f.normal_form = cvec({0, 1});
    f.orbit_level = {Rational(0)};
    f.spacing = 1;
    f.M = mat2(1, 1, 0, -1);
    f.orbit_map = {0};
    f.shift = {zero_coord()};
    f.k_shift = cvec({-1, 2});
    t.reflections.push_back(f);
    t.stop_bound = 0;
    return t;
}

inline TilingSpec make_hex() {
    TilingSpec t;
    t.name = "hex";
    t.dim = 2;
    t.norbits = 2;
    t.neighbors.resize(2);
    // orbit 0 at lattice points, orbit 1 at +v, v = (v1+v2)/3.
    for (auto d : {cvec({0, 0}), cvec({-1, 0}), cvec({0, -1})}) {
        NeighborOffset o;
        o.target_orbit = 1;
        o.disp = d;
        t.neighbors[0].push_back(o);
    }
    for (auto d : {cvec({0, 0}), cvec({1, 0}), cvec({0, 1})}) {
        NeighborOffset o;
        o.target_orbit = 0;
        o.disp = d;
        t.neighbors[1].push_back(o);
    }
    t.degree = {3, 3};
    t.orbit_offset.resize(2);
    t.orbit_offset[1][0] = Rational(1, 3);
    t.orbit_offset[1][1] = Rational(1, 3);
    t.basis = {{1.0, 0.5}, {0.0, std::sqrt(3.0) / 2.0}};
    IntMat r120 = mat2(-1, -1, 1, 0);
    IntMat flip = mat2(0, 1, 1, 0);
    IntMat minus = mat2(-1, 0, 0, -1);
    PointGroupElem rot = pg(r120, {0, 1}, {zero_coord(), cvec({-1, 0})});
    PointGroupElem mir = pg(flip, {0, 1}, {zero_coord(), zero_coord()});
    PointGroupElem inv = pg(minus, {1, 0}, {zero_coord(), zero_coord()});
    t.point_group = close_group({rot, mir, inv}, 16);
    // Armchair mirrors: level = n1 - n2 on both orbits, reflection swaps n1, n2.
    ReflectionFamily f;
    f.name = "armchair";
    f.normal_form = cvec({1, -1});
    f.orbit_level = {Rational(0), Rational(0)};
    f.spacing = 1;
    f.M = mat2(0, 1, 1, 0);
    f.orbit_map = {0, 1};
    f.shift = {zero_coord(), zero_coord()};
    f.k_shift = cvec({1, -1});
    t.reflections.push_back(f);
    t.stop_bound = 2;
    return t;
}

inline TilingSpec make_fcc() {
    TilingSpec t;
    t.name = "fcc";
    t.dim = 3;
    t.norbits = 1;
    t.neighbors.resize(1);
    push_pm_neighbors(t.neighbors[0], {1, 0, 0});
    push_pm_neighbors(t.neighbors[0], {0, 1, 0});
    push_pm_neighbors(t.neighbors[0], {0, 0, 1});
    push_pm_neighbors(t.neighbors[0], {1, -1, 0});
    push_pm_neighbors(t.neighbors[0], {1, 0, -1});
    push_pm_neighbors(t.neighbors[0], {0, 1, -1});
    t.degree = {12};
    t.orbit_offset.resize(1);
    double s3 = std::sqrt(3.0), s6 = std::sqrt(6.0);
    t.basis = {{1.0, 0.5, 0.5}, {0.0, s3 / 2.0, s3 / 6.0}, {0.0, 0.0, s6 / 3.0}};
    // Affine maps induced by permuting the tetrahedron {0, v1, v2, v3},
    // together with inversion.
    std::vector<Coord> tet = {cvec({0, 0, 0}), cvec({1, 0, 0}), cvec({0, 1, 0}), cvec({0, 0, 1})};
    std::vector<PointGroupElem> gens;
    std::vector<int> perm = {0, 1, 2, 3};
    std::vector<PointGroupElem> all;
    do {
        IntMat M;
        M.dim = 3;
        for (int col = 0; col < 3; ++col) {
            Coord img = sub(tet[static_cast<size_t>(perm[static_cast<size_t>(col + 1)])],
                            tet[static_cast<size_t>(perm[0])]);
            for (int r = 0; r < 3; ++r) M.m[r][col] = img[static_cast<size_t>(r)];
        }
        PointGroupElem e = pg(M, {0}, {tet[static_cast<size_t>(perm[0])]});
        all.push_back(e);
        IntMat Mi;
        Mi.dim = 3;
        for (int r = 0; r < 3; ++r)
            for (int c2 = 0; c2 < 3; ++c2) Mi.m[r][c2] = -M.m[r][c2];
        all.push_back(pg(Mi, {0}, {neg(tet[static_cast<size_t>(perm[0])])}));
    } while (std::next_permutation(perm.begin(), perm.end()));
    t.point_group = close_group(all, 64);
    t.stop_bound = 0;
    return t;
}

// Lattice matrices for the D4 generators, acting on coordinates in the basis
// v1=1, v2=i, v3=j, v4=(1+i+j+k)/2.  Derived from the Euclidean maps by
// conjugation with the basis; all entries are integers.
inline IntMat mat4(std::initializer_list<int> rows) {
    IntMat m;
    m.dim = 4;
    int i = 0;
    for (int x : rows) {
        m.m[i / 4][i % 4] = x;
        ++i;
    }
    return m;
}

inline TilingSpec make_d4() {
    TilingSpec t;
    t.name = "d4";
    t.dim = 4;
    t.norbits = 1;
    t.neighbors.resize(1);
    push_pm_neighbors(t.neighbors[0], {1, 0, 0, 0});
    push_pm_neighbors(t.neighbors[0], {0, 1, 0, 0});
    push_pm_neighbors(t.neighbors[0], {0, 0, 1, 0});
    push_pm_neighbors(t.neighbors[0], {-1, -1, -1, 2});
    push_pm_neighbors(t.neighbors[0], {0, 0, 0, 1});
    push_pm_neighbors(t.neighbors[0], {-1, 0, 0, 1});
    push_pm_neighbors(t.neighbors[0], {0, -1, 0, 1});
    push_pm_neighbors(t.neighbors[0], {0, 0, -1, 1});
    push_pm_neighbors(t.neighbors[0], {-1, -1, 0, 1});
    push_pm_neighbors(t.neighbors[0], {-1, 0, -1, 1});
    push_pm_neighbors(t.neighbors[0], {0, -1, -1, 1});
    push_pm_neighbors(t.neighbors[0], {-1, -1, -1, 1});
    t.degree = {24};
    t.orbit_offset.resize(1);
    t.basis = {{1, 0, 0, 0.5}, {0, 1, 0, 0.5}, {0, 0, 1, 0.5}, {0, 0, 0, 0.5}};
    t.stop_bound = 0;

    // Generators: left multiplication by the quaternion units i, j and
    // omega = (1+i+j+k)/2, plus the x1 sign flip.  Closure is the symmetry
    // group used for candidate dedup.
    auto euc_to_lat = [](const std::array<std::array<double, 4>, 4>& E) {
        // n = (p1-p4, p2-p4, p3-p4, 2 p4); p = B n with the basis above.
        IntMat M;
        M.dim = 4;
        std::array<std::array<double, 4>, 4> B{{{1, 0, 0, 0.5}, {0, 1, 0, 0.5}, {0, 0, 1, 0.5}, {0, 0, 0, 0.5}}};
        for (int col = 0; col < 4; ++col) {
            std::array<double, 4> p{};
            for (int r = 0; r < 4; ++r)
                for (int k = 0; k < 4; ++k) p[static_cast<size_t>(r)] += E[static_cast<size_t>(r)][static_cast<size_t>(k)] * B[static_cast<size_t>(k)][static_cast<size_t>(col)];
            std::array<double, 4> n{p[0] - p[3], p[1] - p[3], p[2] - p[3], 2 * p[3]};
            for (int r = 0; r < 4; ++r) {
                double v = n[static_cast<size_t>(r)];
                long rv = std::lround(v);
                if (std::abs(v - static_cast<double>(rv)) > 1e-9) throw Error("d4 generator is not lattice-integral");
                M.m[r][col] = static_cast<int>(rv);
            }
        }
        return M;
    };
    // Quaternion left-multiplication matrices in coordinates (1, i, j, k).
    std::array<std::array<double, 4>, 4> Li{{{0, -1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, -1}, {0, 0, 1, 0}}};
    std::array<std::array<double, 4>, 4> Lj{{{0, 0, -1, 0}, {0, 0, 0, 1}, {1, 0, 0, 0}, {0, -1, 0, 0}}};
    std::array<std::array<double, 4>, 4> Lw{};
    {
        // omega * (1, i, j, k) read off from quaternion multiplication.
        std::array<std::array<double, 4>, 4> comps{{
            {0.5, 0.5, 0.5, 0.5},     // omega * 1
            {-0.5, 0.5, 0.5, -0.5},   // omega * i
            {-0.5, -0.5, 0.5, 0.5},   // omega * j
            {-0.5, 0.5, -0.5, 0.5},   // omega * k
        }};
        for (int col = 0; col < 4; ++col)
            for (int r = 0; r < 4; ++r) Lw[static_cast<size_t>(r)][static_cast<size_t>(col)] = comps[static_cast<size_t>(col)][static_cast<size_t>(r)];
    }
    std::array<std::array<double, 4>, 4> F1{{{-1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}};
    std::vector<PointGroupElem> gens;
    for (const auto& E : {Li, Lj, Lw, F1}) gens.push_back(pg(euc_to_lat(E), {0}, {zero_coord()}));
    t.point_group = close_group(gens, 1300);

    // Reflection families F_{D4}: normals v1..v4, planes <x, v_j> = 2k.
    struct FamDef {
        const char* name;
        Coord form;
        IntMat M;
        Coord kshift;
    };
    std::vector<FamDef> fams = {
        {"P1", cvec({1, 1, 0, 1}), mat4({0, -1, 0, -1, -1, 0, 0, -1, 0, 0, 1, 0, 0, 0, 0, 1}), cvec({2, 2, 0, 0})},
        {"P2", cvec({1, -1, 0, 0}), mat4({0, 1, 0, 0, 1, 0, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1}), cvec({2, -2, 0, 0})},
        {"P3", cvec({0, 0, 1, 1}), mat4({1, 0, 1, 1, 0, 1, 1, 1, 0, 0, 1, 0, 0, 0, -2, -1}), cvec({-2, -2, 0, 4})},
        {"P4", cvec({0, 0, 1, 0}), mat4({1, 0, -1, 0, 0, 1, -1, 0, 0, 0, -1, 0, 0, 0, 2, 1}), cvec({2, 2, 4, -4})},
    };
    for (const auto& fd : fams) {
        ReflectionFamily f;
        f.name = fd.name;
        f.normal_form = fd.form;
        f.orbit_level = {Rational(0)};
        f.spacing = 2;
        f.M = fd.M;
        f.orbit_map = {0};
        f.shift = {zero_coord()};
        f.k_shift = fd.kshift;
        t.reflections.push_back(f);
    }
    return t;
}

inline TilingSpec make_zd(int d) {
    if (d < 2) throw Error("zd requires dimension >= 2");
    if (d > kMaxDim) throw Error("zd dimension exceeds build limit");
    TilingSpec t;
    t.name = "zd" + std::to_string(d);
    t.dim = d;
    t.norbits = 1;
    t.neighbors.resize(1);
    for (int i = 0; i < d; ++i) {
        NeighborOffset a;
        a.disp = zero_coord();
        a.disp[static_cast<size_t>(i)] = 1;
        t.neighbors[0].push_back(a);
        NeighborOffset b;
        b.disp = zero_coord();
        b.disp[static_cast<size_t>(i)] = -1;
        t.neighbors[0].push_back(b);
    }
    t.degree = {2 * d};
    t.orbit_offset.resize(1);
    t.basis.assign(static_cast<size_t>(d), std::vector<double>(static_cast<size_t>(d), 0.0));
    for (int i = 0; i < d; ++i) t.basis[static_cast<size_t>(i)][static_cast<size_t>(i)] = 1.0;
    t.group_kind = GroupKind::SignedPermutations;
    for (int i = 0; i < d; ++i) {
        ReflectionFamily f;
        f.name = "x" + std::to_string(i + 1);
        f.normal_form = zero_coord();
        f.normal_form[static_cast<size_t>(i)] = 1;
        f.orbit_level = {Rational(0)};
        f.spacing = 1;
        f.M = IntMat::identity(d);
        f.M.m[i][i] = -1;
        f.orbit_map = {0};
        f.shift = {zero_coord()};
        f.k_shift = zero_coord();
        f.k_shift[static_cast<size_t>(i)] = 2;
        t.reflections.push_back(f);
    }
    t.stop_bound = 0;
    return t;
}

}  // namespace detail

inline TilingSpec builtin(const std::string& name) {
    if (name == "tri") return detail::make_tri();
    if (name == "hex") return detail::make_hex();
    if (name == "fcc") return detail::make_fcc();
    if (name == "d4") return detail::make_d4();
    if (name.rfind("zd", 0) == 0) {
        int d = std::atoi(name.c_str() + 2);
        return detail::make_zd(d);
    }
    throw Error("unknown builtin tiling: " + name);
}

}  // namespace spectile
