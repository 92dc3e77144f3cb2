#pragma once

#include "spectile/greens.hpp"

namespace spectile {

struct FValue {
    Interval value;
    std::vector<Vertex> region;
    Interval tail_norm2;
};

// Box used for the exact cosine sums: coordinate box of the given half-width
// around the support, intersected with nothing else.  Returns all vertices
// of every orbit whose coordinates lie within the box.
inline std::vector<Vertex> coordinate_box(const TilingSpec& t, const Prevector& nu, int halfwidth) {
    std::array<int, kMaxDim> lo{}, hi{};
    bool first = true;
    for (const auto& [v, c] : nu.entries) {
        for (int i = 0; i < t.dim; ++i) {
            int x = v.n[static_cast<size_t>(i)];
            if (first) {
                lo[static_cast<size_t>(i)] = hi[static_cast<size_t>(i)] = x;
            } else {
                lo[static_cast<size_t>(i)] = std::min(lo[static_cast<size_t>(i)], x);
                hi[static_cast<size_t>(i)] = std::max(hi[static_cast<size_t>(i)], x);
            }
        }
        first = false;
    }
    if (first) return {};
    std::vector<Vertex> out;
    std::function<void(int, Vertex&)> rec = [&](int axis, Vertex& v) {
        if (axis == t.dim) {
            for (int o = 0; o < t.norbits; ++o) {
                Vertex w = v;
                w.orbit = static_cast<int16_t>(o);
                out.push_back(w);
            }
            return;
        }
        for (int x = lo[static_cast<size_t>(axis)] - halfwidth; x <= hi[static_cast<size_t>(axis)] + halfwidth; ++x) {
            v.n[static_cast<size_t>(axis)] = static_cast<int16_t>(x);
            rec(axis + 1, v);
        }
    };
    Vertex v;
    v.n = zero_coord();
    rec(0, v);
    return out;
}

inline int default_box_halfwidth(int dim) { return dim == 2 ? 10 : 5; }

// f(xi) over the whole tiling: exact cosine sum on the box R plus the
// Parseval tail with its fourth-power error term.  When reflection families
// are given the sums run over the quotient (the input must already be
// anti-symmetric) and every orbit of size 2^|S| is counted once.
inline FValue f_of(const TilingSpec& t, const Prevector& nu, const std::vector<int>& families,
                   const std::vector<Vertex>& region, const QuadratureSpec& q) {
    if (!is_antisymmetric(t, nu, families)) throw Error("f_of: prevector is not anti-symmetric under S");
    // the region must contain the distance-2 enlargement of the support
    {
        std::vector<Vertex> supp;
        for (const auto& [v, c] : nu.entries) supp.push_back(v);
        std::unordered_set<Vertex, VertexHash> rs(region.begin(), region.end());
        for (const Vertex& v : ball(t, supp, 2))
            if (!rs.count(v)) throw Error("f_of: region does not cover the support enlargement");
    }
    HarmonicField f(t, nu, q);
    Interval total = f.total_norm2();
    f.ensure(region);
    Interval box_cos(0.0), box_sq(0.0);
    for (const Vertex& v : region) {
        Interval xv = f.value(v);
        box_cos += Interval(1.0) - cos2pi(xv);
        box_sq += sqr(xv);
    }
    double scale = std::pow(0.5, static_cast<double>(families.size()));
    Interval tail = scale * total - box_sq;
    if (tail.upper() < 0.0) throw Error("f_of: negative tail norm (inconsistent quadrature)");
    double tail_up = std::max(0.0, tail.upper());
    double tail_lo = std::max(0.0, tail.lower());
    // f = box + 2 pi^2 T - (pi^4/3) T^2 + theta (pi^4/3) T^2, |theta| <= 1,
    // so the quartic contribution lies in [-(2 pi^4/3) tail_up^2, 0].
    double q4 = (M_PI * M_PI * M_PI * M_PI) / 3.0;
    Interval T(0.5 * (tail_up + tail_lo), 0.5 * (tail_up - tail_lo));
    FValue out;
    out.value = box_cos + 2.0 * M_PI * M_PI * T + Interval(-q4 * tail_up * tail_up, q4 * tail_up * tail_up);
    out.region = region;
    out.tail_norm2 = T;
    return out;
}

inline FValue f_of(const TilingSpec& t, const Prevector& nu, const std::vector<int>& families, int box_halfwidth,
                   const QuadratureSpec& q) {
    return f_of(t, nu, families, coordinate_box(t, nu, box_halfwidth), q);
}

// Two-sided cosine-sum bounds from a certified 2-norm: for ||xi||_2^2 >= a,
// 2 pi^2 a (1 - pi^2 a / 3) <= f <= 2 pi^2 ||xi||_2^2.
inline std::pair<double, double> quadratic_bounds(const Interval& norm2, double alpha) {
    if (alpha > norm2.lower() + 1e-15) throw Error("quadratic_bounds: alpha exceeds the certified lower endpoint");
    double a = std::max(0.0, alpha);
    double cap = 1.5 / (M_PI * M_PI);
    double ac = std::min(a, cap);  // the lower form is increasing up to 3/(2 pi^2)
    double lower = 2.0 * M_PI * M_PI * ac * (1.0 - M_PI * M_PI * ac / 3.0);
    double upper = 2.0 * M_PI * M_PI * norm2.upper();
    return {lower, upper};
}

// certified f lower bound from a certified norm lower bound
inline double quadratic_f_floor(double norm2_lower) {
    double cap = 1.5 / (M_PI * M_PI);
    double a = std::clamp(norm2_lower, 0.0, cap);
    return 2.0 * M_PI * M_PI * a * (1.0 - M_PI * M_PI * a / 3.0);
}

// smallest alpha whose quadratic floor certifiably exceeds f_target; any
// configuration with ||xi||^2 >= alpha then has f > f_target.  Returns +inf
// when the quadratic floor cannot reach the target (f_target >= 3/2).
inline double alpha_threshold(double f_target) {
    if (f_target <= 0.0) return 0.0;
    if (f_target >= 1.5 - 1e-12) return std::numeric_limits<double>::infinity();
    double c1 = 2.0 * M_PI * M_PI, c2 = 2.0 * M_PI * M_PI * M_PI * M_PI / 3.0;
    double disc = c1 * c1 - 4.0 * c2 * f_target;
    double a = (c1 - std::sqrt(disc)) / (2.0 * c2);
    a *= 1.0 + 1e-12;
    while (quadratic_f_floor(a) <= f_target) a *= 1.0 + 1e-12;
    return a;
}

// gamma from a certified quotient norm.  With symmetry halving (a two-point
// symmetric orbit, sup^2 <= norm2/2) the quartic slack is (pi^4/6) norm2^2,
// otherwise (pi^4/3) norm2^2; either way gamma sits in
// [2 pi^2 n - 2c n^2, 2 pi^2 n] reported as midpoint +- radius.
inline Interval gamma_from_norm(const Interval& norm2, bool symmetry_halving) {
    double c = (M_PI * M_PI * M_PI * M_PI) / (symmetry_halving ? 6.0 : 3.0);
    double n_up = std::max(0.0, norm2.upper());
    Interval main = 2.0 * M_PI * M_PI * norm2;
    double B = c * n_up * n_up;
    return main - Interval(B, B);
}

}  // namespace spectile
