#pragma once

#include <unordered_map>

#include "spectile/prevector.hpp"
#include "spectile/quadrature.hpp"
#include "spectile/zd_series.hpp"

namespace spectile {

namespace greensdetail {

// Expected occupation numbers and stopping distribution of the walk started
// at w, run until it first reaches the base orbit.  All exact rationals.
struct SourceReduction {
    std::map<Coord, Rational> stop;      // absolute lattice coordinates
    std::map<Vertex, Rational> visits;   // expected visits before stopping
};

inline SourceReduction reduce_source(const TilingSpec& t, const Vertex& w) {
    SourceReduction out;
    if (w.orbit == 0) {
        out.stop.emplace(w.n, Rational(1));
        return out;
    }
    std::map<Vertex, Rational> live;
    live[w] = Rational(1);
    int max_steps = std::max(t.stop_bound, 1);
    for (int step = 0; step < max_steps; ++step) {
        if (live.empty()) break;
        std::map<Vertex, Rational> next;
        for (const auto& [v, p] : live) {
            out.visits[v] += p;
            Rational s = p / Rational(t.degree[static_cast<size_t>(v.orbit)]);
            for (const Vertex& x : t.neighbors_of(v)) {
                if (x.orbit == 0)
                    out.stop[x.n] += s;
                else
                    next[x] += s;
            }
        }
        live = std::move(next);
    }
    if (!live.empty()) throw Error("reduce_source: walk does not reach the lattice within the declared bound");
    return out;
}

// Stopping displacement distribution from a vertex of the given orbit
// (identity for the base orbit).
inline const std::map<Coord, Rational>& point_reduction(const TilingSpec& t, int orbit,
                                                        std::map<int, std::map<Coord, Rational>>& cache) {
    auto it = cache.find(orbit);
    if (it != cache.end()) return it->second;
    std::map<Coord, Rational> pr;
    if (orbit == 0) {
        pr.emplace(zero_coord(), Rational(1));
    } else {
        pr = stopped_measure(t, orbit).atoms;
    }
    return cache.emplace(orbit, std::move(pr)).first->second;
}

}  // namespace greensdetail

// Lazy evaluator for xi = g * nu.  Per orbit the restriction of xi to that
// orbit is a lattice convolution g_0 * alpha_o plus an exact rational garnish
// from the occupation terms of off-lattice sources.
class HarmonicField {
  public:
    HarmonicField(const TilingSpec& t, Prevector nu, QuadratureSpec q)
        : t_(&t), nu_(std::move(nu)), q_(q), kernel_(make_kernel(t)) {
        std::map<int, std::map<Coord, Rational>> prcache;
        alpha_.resize(static_cast<size_t>(t.norbits));
        for (const auto& [w, val] : nu_.entries) {
            auto sr = greensdetail::reduce_source(t, w);
            for (const auto& [x, occ] : sr.visits)
                garnish_[x] += Rational(val) * occ / Rational(t.degree[static_cast<size_t>(x.orbit)]);
            for (int o = 0; o < t.norbits; ++o) {
                const auto& pr = greensdetail::point_reduction(t, o, prcache);
                for (const auto& [lambda, sw] : sr.stop)
                    for (const auto& [delta, pw] : pr)
                        alpha_[static_cast<size_t>(o)][sub(lambda, delta)] += Rational(val) * sw * pw;
            }
        }
        for (auto& a : alpha_) {
            for (auto it = a.begin(); it != a.end();)
                it = it->second.is_zero() ? a.erase(it) : std::next(it);
        }
    }

    const Prevector& prevector() const { return nu_; }
    const TilingSpec& tiling() const { return *t_; }

    Rational garnish_at(const Vertex& v) const {
        auto it = garnish_.find(v);
        return it == garnish_.end() ? Rational(0) : it->second;
    }

    // Effective lattice weights of the orbit restriction (diagnostic/tests).
    const std::map<Coord, Rational>& alpha(int orbit) const { return alpha_[static_cast<size_t>(orbit)]; }

    void ensure(const std::vector<Vertex>& vs) {
        std::vector<Vertex> missing;
        for (const Vertex& v : vs)
            if (!cache_.count(v)) missing.push_back(v);
        if (missing.empty()) return;
        std::sort(missing.begin(), missing.end());
        missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
        std::vector<std::vector<Coord>> per_orbit(static_cast<size_t>(t_->norbits));
        for (const Vertex& v : missing) per_orbit[static_cast<size_t>(v.orbit)].push_back(v.n);
        TorusQuad quad(kernel_, q_);
        for (int o = 0; o < t_->norbits; ++o) {
            if (per_orbit[static_cast<size_t>(o)].empty()) continue;
            const auto& a = alpha_[static_cast<size_t>(o)];
            std::vector<Interval> vals;
            if (a.empty()) {
                vals.assign(per_orbit[static_cast<size_t>(o)].size(), Interval(0.0));
            } else if (use_series()) {
                vals = series_values(o, per_orbit[static_cast<size_t>(o)]);
            } else {
                TrigPoly payload;
                Rational asum(0);
                for (const auto& [c, r] : a) {
                    payload.add(neg(c), Cplx{r.to_double(), 0.0});
                    asum += r;
                }
                if (t_->dim == 2) payload.add(zero_coord(), Cplx{-asum.to_double(), 0.0});
                vals = quad.transform(payload, per_orbit[static_cast<size_t>(o)], 1);
            }
            for (size_t i = 0; i < vals.size(); ++i) {
                Vertex v;
                v.orbit = static_cast<int16_t>(o);
                v.n = per_orbit[static_cast<size_t>(o)][i];
                Interval val = vals[i] + Interval(garnish_at(v).to_double(), 1e-15);
                cache_.emplace(v, val);
            }
        }
    }

    Interval value(const Vertex& v) {
        auto it = cache_.find(v);
        if (it == cache_.end()) {
            ensure({v});
            it = cache_.find(v);
        }
        return it->second;
    }

    // Parseval total over the whole tiling:  sum of squared values of every
    // orbit restriction, garnish cross terms included.
    Interval total_norm2() {
        Interval total(0.0);
        TorusQuad quad(kernel_, q_);
        for (int o = 0; o < t_->norbits; ++o) {
            const auto& a = alpha_[static_cast<size_t>(o)];
            if (!a.empty()) {
                if (use_series()) {
                    std::map<Coord, double> autoc;
                    for (const auto& [ci, ri] : a)
                        for (const auto& [cj, rj] : a) autoc[sub(ci, cj)] += ri.to_double() * rj.to_double();
                    total += zd_parseval_series(t_->dim, autoc, q_.target_abs_error);
                } else {
                    TrigPoly ahat;
                    for (const auto& [c, r] : a) ahat.add(c, Cplx{r.to_double(), 0.0});
                    total += quad.integrate(ahat.abs_squared(), 2);
                }
            }
        }
        // || u + e ||^2 = ||u||^2 + 2 <u, e> + ||e||^2 with e the garnish
        for (const auto& [x, e] : garnish_) {
            Interval u = value(x) - Interval(e.to_double(), 1e-15);
            total += 2.0 * u * Interval(e.to_double(), 1e-15) + sqr(Interval(e.to_double(), 1e-15));
        }
        return total;
    }

  private:
    bool use_series() const { return t_->dim >= 5; }

    std::vector<Interval> series_values(int orbit, const std::vector<Coord>& xs) {
        (void)orbit;
        const auto& a = alpha_[static_cast<size_t>(orbit)];
        std::vector<Interval> out;
        out.reserve(xs.size());
        for (const Coord& x : xs) {
            Interval v(0.0);
            for (const auto& [c, r] : a)
                v += r.to_double() * zd_green_series(t_->dim, sub(x, c), q_.target_abs_error);
            out.push_back(v);
        }
        return out;
    }

    const TilingSpec* t_;
    Prevector nu_;
    QuadratureSpec q_;
    Kernel kernel_;
    std::vector<std::map<Coord, Rational>> alpha_;
    std::map<Vertex, Rational> garnish_;
    std::unordered_map<Vertex, Interval, VertexHash> cache_;
};

inline HarmonicField field(const TilingSpec& t, const Prevector& nu, const QuadratureSpec& q) {
    return HarmonicField(t, nu, q);
}

// Green value g_0(x) for lattice x: difference kernel in dimension 2, plain
// kernel in dimension >= 3, return series for hypercubic lattices beyond the
// quadrature range.
inline Interval greens_lattice(const TilingSpec& t, const Coord& x, const QuadratureSpec& q) {
    if (t.dim < 2) throw Error("greens_lattice: dimension must be >= 2");
    if (t.dim >= 5) return zd_green_series(t.dim, x, q.target_abs_error);
    Kernel k = make_kernel(t);
    TorusQuad quad(k, q);
    TrigPoly num;
    num.add(x, Cplx{1.0, 0.0});
    if (t.dim == 2) num.add(zero_coord(), Cplx{-1.0, 0.0});
    return quad.integrate(num, 1);
}

// g_v(x) for arbitrary vertices via the stopped-walk reduction.
inline Interval greens_vertex(const TilingSpec& t, const Vertex& v, const Vertex& x, const QuadratureSpec& q) {
    auto sr = greensdetail::reduce_source(t, v);
    std::map<int, std::map<Coord, Rational>> prcache;
    const auto& pr = greensdetail::point_reduction(t, static_cast<int>(x.orbit), prcache);
    Rational occ(0);
    auto vit = sr.visits.find(x);
    if (vit != sr.visits.end()) occ = vit->second / Rational(t.degree[static_cast<size_t>(x.orbit)]);

    std::map<Coord, Rational> weights;  // coefficient of g_0(x.n + delta - lambda)
    for (const auto& [lambda, sw] : sr.stop)
        for (const auto& [delta, pw] : pr) weights[add(sub(x.n, lambda), delta)] += sw * pw;

    if (t.dim >= 5) {
        Interval out(occ.to_double(), 1e-15);
        for (const auto& [c, r] : weights) out += r.to_double() * zd_green_series(t.dim, c, q.target_abs_error);
        return out;
    }
    Kernel k = make_kernel(t);
    TorusQuad quad(k, q);
    TrigPoly num;
    Rational wsum(0);
    for (const auto& [c, r] : weights) {
        num.add(c, Cplx{r.to_double(), 0.0});
        wsum += r;
    }
    if (t.dim == 2) num.add(zero_coord(), Cplx{-wsum.to_double(), 0.0});
    return quad.integrate(num, 1) + Interval(occ.to_double(), 1e-15);
}

// Vanishing order of nu-hat at the origin (0, 1 or 2), decided exactly.
inline int vanishing_order(const TilingSpec& t, const Prevector& nu) { return class_of(t, nu); }

// Quotient 2-norm by Parseval: the full-space norm of the (already
// anti-symmetric) prevector divided by the orbit size 2^|S|.  ell^2
// membership requires vanishing order >= the dimension table value.
inline Interval l2_quotient_norm(const TilingSpec& t, const Prevector& nu, const std::vector<int>& families,
                                 const QuadratureSpec& q) {
    if (!is_antisymmetric(t, nu, families)) throw Error("l2_quotient_norm: prevector is not anti-symmetric under S");
    int need = required_class(t, Boundary::Open, t.dim);
    if (vanishing_order(t, nu) < need) throw Error("l2_quotient_norm: prevector is not in the ell^2 class");
    HarmonicField f(t, nu, q);
    Interval full = f.total_norm2();
    double scale = std::pow(0.5, static_cast<double>(families.size()));
    return scale * full;
}

// Decides whether nu = laplacian(eta) for an integer, finitely supported eta,
// by rounding the field on a support-covering box and verifying exactly.
inline bool is_trivial(const TilingSpec& t, const Prevector& nu, const QuadratureSpec& q) {
    if (nu.empty()) return true;
    int need = required_class(t, Boundary::Periodic, t.dim);
    if (class_of(t, nu) < need) throw Error("is_trivial: prevector is not in the required class");
    HarmonicField f(t, nu, q);
    std::vector<Vertex> supp;
    for (const auto& [v, c] : nu.entries) supp.push_back(v);

    Interval total = f.total_norm2();
    for (int radius = 3; radius <= 9; radius += 3) {
        std::vector<Vertex> box = ball(t, supp, radius);
        f.ensure(box);
        // outside-box sup bound via the norm tail
        Interval inside(0.0);
        for (const Vertex& v : box) inside += sqr(f.value(v));
        double tail_up = total.upper() - inside.lower();
        if (tail_up >= 0.25) continue;  // cannot yet certify |xi| < 1/2 outside

        Prevector eta;
        bool safe = true;
        for (const Vertex& v : box) {
            Interval xv = f.value(v);
            long r = std::lround(xv.mid);
            if (std::abs(xv.mid - static_cast<double>(r)) + xv.rad >= 0.5 - 1e-9) safe = false;
            if (r != 0) eta.add(v, static_cast<int>(r));
        }
        if (!safe) throw Error("is_trivial: interval radii too large to round safely");
        return graph_laplacian(t, eta) == nu;
    }
    throw Error("is_trivial: could not certify decay outside the rounding box");
}

}  // namespace spectile
