#pragma once

#include <cmath>
#include <complex>
#include <cstring>

#include "spectile/common.hpp"
#include "spectile/interval.hpp"
#include "spectile/linalg.hpp"
#include "spectile/walk.hpp"

namespace spectile {

struct Cplx {
    double re = 0.0, im = 0.0;
    friend Cplx operator+(Cplx a, Cplx b) { return {a.re + b.re, a.im + b.im}; }
    friend Cplx operator-(Cplx a, Cplx b) { return {a.re - b.re, a.im - b.im}; }
    friend Cplx operator*(Cplx a, Cplx b) { return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re}; }
    friend Cplx operator*(double c, Cplx a) { return {c * a.re, c * a.im}; }
    Cplx conj() const { return {re, -im}; }
    Cplx& operator+=(Cplx b) {
        re += b.re;
        im += b.im;
        return *this;
    }
};

inline Cplx unit_phase(double t) { return {std::cos(2.0 * M_PI * t), std::sin(2.0 * M_PI * t)}; }

// Trigonometric polynomial sum_j c_j e(m_j . y) with complex coefficients.
struct TrigPoly {
    std::vector<std::pair<Coord, Cplx>> terms;

    void add(const Coord& m, Cplx c) { terms.push_back({m, c}); }

    Cplx eval(const double* y, int dim) const {
        Cplx s;
        for (const auto& [m, c] : terms) {
            double ph = 0.0;
            for (int i = 0; i < dim; ++i) ph += static_cast<double>(m[i]) * y[i];
            s += c * unit_phase(ph);
        }
        return s;
    }

    // |p|^2 expanded as a trig polynomial (used for Parseval numerators).
    TrigPoly abs_squared() const {
        TrigPoly out;
        for (const auto& [mi, ci] : terms)
            for (const auto& [mj, cj] : terms) out.add(sub(mi, mj), ci * cj.conj());
        return out;
    }
};

// Fourier symbol of the stopped walk on the base lattice: mu_hat(y) =
// sum_a w_a cos(2 pi a.y).  kappa certifies 1 - mu_hat >= kappa |y|^2 for
// |y| <= r0_max (from 1 - cos t >= 2 t^2 / pi^2 on |t| <= pi).
struct Kernel {
    int dim = 0;
    int deg0 = 0;
    std::vector<std::pair<Coord, double>> cos_atoms;
    double kappa = 0.0;
    double r0_max = 0.0;

    double mu_hat(const double* y) const {
        double s = 0.0;
        for (const auto& [a, w] : cos_atoms) {
            double ph = 0.0;
            for (int i = 0; i < dim; ++i) ph += static_cast<double>(a[i]) * y[i];
            s += w * std::cos(2.0 * M_PI * ph);
        }
        return s;
    }
};

inline Kernel make_kernel(const TilingSpec& t) {
    Kernel k;
    k.dim = t.dim;
    k.deg0 = t.degree[0];
    StoppedMeasure mu = stopped_measure(t, 0);
    std::map<Coord, double> merged;
    for (const auto& [a, p] : mu.atoms) merged[a] += p.to_double();
    for (const auto& [a, w] : merged) k.cos_atoms.push_back({a, w});
    Matrix M(t.dim, t.dim);
    double max_norm2 = 0.0;
    for (const auto& [a, p] : mu.atoms) {
        double n2 = 0.0;
        for (int i = 0; i < t.dim; ++i) {
            for (int j = 0; j < t.dim; ++j)
                M(i, j) += p.to_double() * static_cast<double>(a[i]) * static_cast<double>(a[j]);
            n2 += static_cast<double>(a[i]) * static_cast<double>(a[i]);
        }
        max_norm2 = std::max(max_norm2, n2);
    }
    k.kappa = 8.0 * min_eigenvalue_sym(M) * (1.0 - 1e-9);
    k.r0_max = max_norm2 > 0.0 ? 0.5 / std::sqrt(max_norm2) : 0.25;
    if (k.kappa <= 0.0) throw Error("kernel: walk covariance is degenerate");
    return k;
}

struct QuadratureSpec {
    double target_abs_error = 1e-8;
    int base_far_nodes = 0;      // 0 = per-dimension default
    int base_radial_nodes = 0;   // 0 = per-dimension default
    int base_angular_nodes = 0;
    double patch_radius = 0.0;   // 0 = auto
    int max_levels = 4;
    int threads = 0;             // 0 = default_thread_count()
};

namespace quaddetail {

// Polynomial cutoff: chi(y) = 1 - S(|y|^2 / r0^2) with S the degree-15
// smoothstep (7 vanishing derivatives at both ends).  chi is a polynomial in
// y inside the ball, identically 0 outside, and 1 - chi vanishes to order 16
// at the origin.
inline double smoothstep7(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    // coefficients of t^8 * sum_k binom(7+k,k) binom(15,7-k) (-t)^k
    static const double c[8] = {6435.0, -40040.0, 108108.0, -163800.0, 150150.0, -83160.0, 25740.0, -3432.0};
    double p = 0.0;
    for (int k = 7; k >= 0; --k) p = p * t + c[k];
    double t4 = t * t * t * t;
    return t4 * t4 * p;
}

inline double cutoff(double r2, double r02) { return r2 >= r02 ? 0.0 : 1.0 - smoothstep7(r2 / r02); }

struct PatchNode {
    std::array<double, 4> y{};
    double w = 0.0;  // weight including jacobian, angular weights and cutoff
};

inline std::vector<PatchNode> patch_nodes(int dim, double r0, int nr, int na) {
    std::vector<double> gx, gw;
    gauss_legendre(nr, gx, gw);
    std::vector<PatchNode> nodes;
    double r02 = r0 * r0;
    auto push = [&](double r, double wr, const std::array<double, 4>& omega, double wang) {
        PatchNode p;
        double jac = 1.0;
        for (int i = 1; i < dim; ++i) jac *= r;
        double r2 = 0.0;
        for (int i = 0; i < dim; ++i) {
            p.y[static_cast<size_t>(i)] = r * omega[static_cast<size_t>(i)];
            r2 += p.y[static_cast<size_t>(i)] * p.y[static_cast<size_t>(i)];
        }
        p.w = wr * wang * jac * cutoff(r2, r02);
        if (p.w != 0.0) nodes.push_back(p);
    };
    std::vector<std::pair<double, double>> rs;
    for (int i = 0; i < nr; ++i) rs.push_back({0.5 * r0 * (gx[static_cast<size_t>(i)] + 1.0), 0.5 * r0 * gw[static_cast<size_t>(i)]});
    if (dim == 2) {
        int nphi = 4 * na;
        double wphi = 2.0 * M_PI / nphi;
        for (const auto& [r, wr] : rs)
            for (int k = 0; k < nphi; ++k) {
                double phi = 2.0 * M_PI * (k + 0.5) / nphi;
                push(r, wr, {std::cos(phi), std::sin(phi), 0, 0}, wphi);
            }
    } else if (dim == 3) {
        std::vector<double> ux, uw;
        gauss_legendre(2 * na, ux, uw);
        int nphi = 4 * na;
        double wphi = 2.0 * M_PI / nphi;
        for (const auto& [r, wr] : rs)
            for (size_t iu = 0; iu < ux.size(); ++iu) {
                double u = ux[iu], su = std::sqrt(std::max(0.0, 1.0 - u * u));
                for (int k = 0; k < nphi; ++k) {
                    double phi = 2.0 * M_PI * (k + 0.5) / nphi;
                    push(r, wr, {su * std::cos(phi), su * std::sin(phi), u, 0}, uw[iu] * wphi);
                }
            }
    } else if (dim == 4) {
        std::vector<double> px, pw;
        gauss_legendre(na, px, pw);
        int nphi = 2 * na;
        double wphi = 2.0 * M_PI / nphi;
        for (const auto& [r, wr] : rs)
            for (int i1 = 0; i1 < na; ++i1) {
                double p1 = 0.5 * M_PI * (px[static_cast<size_t>(i1)] + 1.0), w1 = 0.5 * M_PI * pw[static_cast<size_t>(i1)];
                double s1 = std::sin(p1), c1 = std::cos(p1);
                for (int i2 = 0; i2 < na; ++i2) {
                    double p2 = 0.5 * M_PI * (px[static_cast<size_t>(i2)] + 1.0), w2 = 0.5 * M_PI * pw[static_cast<size_t>(i2)];
                    double s2 = std::sin(p2), c2 = std::cos(p2);
                    for (int k = 0; k < nphi; ++k) {
                        double phi = 2.0 * M_PI * (k + 0.5) / nphi;
                        push(r, wr, {c1, s1 * c2, s1 * s2 * std::cos(phi), s1 * s2 * std::sin(phi)},
                             w1 * w2 * wphi * s1 * s1 * s2);
                    }
                }
            }
    } else {
        throw Error("patch quadrature supports dimensions 2..4 only");
    }
    return nodes;
}

inline int default_far_nodes(int dim) {
    switch (dim) {
        case 2: return 128;
        case 3: return 72;
        case 4: return 40;
        default: throw Error("far quadrature supports dimensions 2..4 only");
    }
}

inline int default_radial_nodes(int dim) { return dim == 4 ? 16 : (dim == 3 ? 20 : 24); }
inline int default_angular_nodes(int dim) { return dim == 4 ? 10 : (dim == 3 ? 12 : 16); }

// Per-axis midpoint nodes and phase power tables.
struct FarGrid {
    int dim = 0;
    int N = 0;
    std::vector<double> xs;
    int max_pow = 0;
    // phase[axis][node * (2*max_pow+1) + (p + max_pow)] = e(p * xs[node])
    std::array<std::vector<Cplx>, 4> phase;

    Cplx axis_phase(int axis, int node, int p) const {
        return phase[static_cast<size_t>(axis)][static_cast<size_t>(node) * (2 * max_pow + 1) + (p + max_pow)];
    }
};

inline FarGrid make_far_grid(int dim, int N, int max_pow) {
    FarGrid g;
    g.dim = dim;
    g.N = N;
    g.max_pow = max_pow;
    g.xs.resize(static_cast<size_t>(N));
    for (int k = 0; k < N; ++k) g.xs[static_cast<size_t>(k)] = (k + 0.5) / N - 0.5;
    for (int ax = 0; ax < dim; ++ax) {
        auto& tab = g.phase[static_cast<size_t>(ax)];
        tab.resize(static_cast<size_t>(N) * (2 * max_pow + 1));
        for (int k = 0; k < N; ++k) {
            Cplx z = unit_phase(g.xs[static_cast<size_t>(k)]);
            Cplx acc{1.0, 0.0};
            tab[static_cast<size_t>(k) * (2 * max_pow + 1) + max_pow] = acc;
            Cplx accp = acc, accm = acc;
            for (int p = 1; p <= max_pow; ++p) {
                accp = accp * z;
                accm = accm * z.conj();
                tab[static_cast<size_t>(k) * (2 * max_pow + 1) + (max_pow + p)] = accp;
                tab[static_cast<size_t>(k) * (2 * max_pow + 1) + (max_pow - p)] = accm;
            }
        }
    }
    return g;
}

}  // namespace quaddetail

// Torus integrator for integrands  numerator(y) / (deg (1 - mu_hat(y)))^k.
// The cube is split by a polynomial cutoff into a smooth periodic far part
// (tensor midpoint rule) and a ball around the singular point handled in
// polar coordinates where the integrand times the jacobian is analytic.
// Radii come from two-level comparisons at every stage.
class TorusQuad {
  public:
    TorusQuad(const Kernel& kernel, QuadratureSpec spec) : k_(kernel), spec_(spec) {
        r0_ = spec_.patch_radius > 0.0 ? spec_.patch_radius : std::min(0.2, k_.r0_max);
        if (r0_ > k_.r0_max) throw Error("quadrature: patch radius exceeds certified range");
        threads_ = spec_.threads > 0 ? spec_.threads : default_thread_count();
    }

    double patch_radius() const { return r0_; }

    // Scalar integral of num(y) / (deg (1-mu))^pow over the torus.
    Interval integrate(const TrigPoly& num, int pow) const {
        std::vector<TrigPoly> nums = {num};
        return integrate_many(nums, pow)[0];
    }

    // Shared-denominator batch: same kernel power, several numerators.
    std::vector<Interval> integrate_many(const std::vector<TrigPoly>& nums, int pow) const {
        int levels = 0;
        std::vector<double> coarse, fine;
        std::vector<double> abs_fine;
        for (int lvl = 0;; ++lvl) {
            std::vector<double> vals, absvals;
            eval_level(nums, pow, lvl, vals, absvals);
            if (lvl > 0) {
                coarse = fine;
            }
            fine = vals;
            abs_fine = absvals;
            if (lvl == 0) continue;
            levels = lvl;
            bool ok = true;
            for (size_t i = 0; i < nums.size(); ++i) {
                double rad = 3.0 * std::abs(fine[i] - coarse[i]) + 1e-14 * abs_fine[i] + 1e-300;
                if (rad > spec_.target_abs_error) ok = false;
            }
            if (ok || lvl >= spec_.max_levels) {
                if (!ok) throw Error("quadrature: failed to certify target error (radius too large)");
                break;
            }
        }
        (void)levels;
        std::vector<Interval> out;
        out.reserve(nums.size());
        for (size_t i = 0; i < nums.size(); ++i)
            out.push_back(Interval(fine[i], 3.0 * std::abs(fine[i] - coarse[i]) + 1e-14 * abs_fine[i]));
        return out;
    }

    // Batched lattice transform: values T(x) = integral of e(x.y) payload(y)
    // / (deg (1-mu))^pow for every x in xs.  Used to evaluate Green's
    // function convolutions on whole boxes at once.
    std::vector<Interval> transform(const TrigPoly& payload, const std::vector<Coord>& xs, int pow) const {
        std::vector<double> coarse, fine, absv;
        for (int lvl = 0;; ++lvl) {
            std::vector<double> vals, avals;
            eval_transform_level(payload, xs, pow, lvl, vals, avals);
            if (lvl > 0) coarse = fine;
            fine = vals;
            absv = avals;
            if (lvl == 0) continue;
            bool ok = true;
            for (size_t i = 0; i < xs.size(); ++i)
                if (3.0 * std::abs(fine[i] - coarse[i]) + 1e-14 * absv[i] > spec_.target_abs_error) ok = false;
            if (ok || lvl >= spec_.max_levels) {
                if (!ok) throw Error("quadrature: failed to certify target error (radius too large)");
                break;
            }
        }
        std::vector<Interval> out;
        out.reserve(xs.size());
        for (size_t i = 0; i < xs.size(); ++i)
            out.push_back(Interval(fine[i], 3.0 * std::abs(fine[i] - coarse[i]) + 1e-14 * absv[i]));
        return out;
    }

  private:
    Kernel k_;
    QuadratureSpec spec_;
    double r0_ = 0.2;
    int threads_ = 1;

    int far_nodes(int lvl) const {
        int base = spec_.base_far_nodes > 0 ? spec_.base_far_nodes : quaddetail::default_far_nodes(k_.dim);
        double f = std::pow(1.5, lvl);
        int n = static_cast<int>(std::lround(base * f));
        return n + (n % 2);
    }

    double denom_pow(const double* y, int pow) const {
        double den = k_.deg0 * (1.0 - k_.mu_hat(y));
        double d = den;
        for (int i = 1; i < pow; ++i) d *= den;
        return d;
    }

    void eval_level(const std::vector<TrigPoly>& nums, int pow, int lvl, std::vector<double>& vals,
                    std::vector<double>& absvals) const {
        int N = far_nodes(lvl);
        size_t m = nums.size();
        vals.assign(m, 0.0);
        absvals.assign(m, 0.0);
        int max_pow = 1;
        for (const auto& [a, w] : k_.cos_atoms)
            for (int i = 0; i < k_.dim; ++i) max_pow = std::max(max_pow, std::abs(static_cast<int>(a[i])));
        for (const auto& p : nums)
            for (const auto& [mm, c] : p.terms)
                for (int i = 0; i < k_.dim; ++i) max_pow = std::max(max_pow, std::abs(static_cast<int>(mm[i])));
        quaddetail::FarGrid g = quaddetail::make_far_grid(k_.dim, N, max_pow);

        // far part: full tensor midpoint sum, then subtract the cutoff mass
        // near the origin (cutoff support only).
        std::vector<std::vector<double>> slab(static_cast<size_t>(N), std::vector<double>(m, 0.0));
        std::vector<std::vector<double>> slab_abs(static_cast<size_t>(N), std::vector<double>(m, 0.0));
        parallel_for(N, threads_, [&](int k1) { far_slab(g, nums, pow, k1, slab[static_cast<size_t>(k1)], slab_abs[static_cast<size_t>(k1)]); });
        double cell = std::pow(1.0 / N, k_.dim);
        for (size_t j = 0; j < m; ++j) {
            std::vector<double> per(static_cast<size_t>(N));
            std::vector<double> pera(static_cast<size_t>(N));
            for (int i = 0; i < N; ++i) {
                per[static_cast<size_t>(i)] = slab[static_cast<size_t>(i)][j];
                pera[static_cast<size_t>(i)] = slab_abs[static_cast<size_t>(i)][j];
            }
            vals[j] = pairwise_sum(per) * cell;
            absvals[j] = pairwise_sum(pera) * cell;
        }

        // patch part in polar coordinates
        int nr0 = spec_.base_radial_nodes > 0 ? spec_.base_radial_nodes : quaddetail::default_radial_nodes(k_.dim);
        int na0 = spec_.base_angular_nodes > 0 ? spec_.base_angular_nodes : quaddetail::default_angular_nodes(k_.dim);
        int nr = static_cast<int>(std::lround(nr0 * std::pow(1.5, lvl)));
        int na = static_cast<int>(std::lround(na0 * std::pow(1.5, lvl)));
        auto nodes = quaddetail::patch_nodes(k_.dim, r0_, nr, na);
        std::vector<double> psum(m, 0.0), pasum(m, 0.0);
        for (const auto& nd : nodes) {
            double den = denom_pow(nd.y.data(), pow);
            for (size_t j = 0; j < m; ++j) {
                double v = nums[j].eval(nd.y.data(), k_.dim).re / den * nd.w;
                psum[j] += v;
                pasum[j] += std::abs(v);
            }
        }
        for (size_t j = 0; j < m; ++j) {
            vals[j] += psum[j];
            absvals[j] += pasum[j];
        }
    }

    void far_slab(const quaddetail::FarGrid& g, const std::vector<TrigPoly>& nums, int pow, int k1,
                  std::vector<double>& acc, std::vector<double>& acc_abs) const {
        int N = g.N, dim = k_.dim;
        size_t m = nums.size();
        double r02 = r0_ * r0_;
        double y[4] = {0, 0, 0, 0};
        int idx[4] = {k1, 0, 0, 0};
        std::vector<double> rowacc(m, 0.0), rowabs(m, 0.0);
        // iterate remaining axes
        std::function<void(int)> rec = [&](int axis) {
            if (axis == dim) {
                for (int i = 0; i < dim; ++i) y[i] = g.xs[static_cast<size_t>(idx[i])];
                double r2 = 0.0;
                for (int i = 0; i < dim; ++i) r2 += y[i] * y[i];
                double w = 1.0 - quaddetail::cutoff(r2, r02);
                if (w == 0.0) return;
                // mu via phase tables
                double mu = 0.0;
                for (const auto& [a, ww] : k_.cos_atoms) {
                    Cplx z{1.0, 0.0};
                    for (int i = 0; i < dim; ++i) z = z * g.axis_phase(i, idx[i], a[i]);
                    mu += ww * z.re;
                }
                double den = k_.deg0 * (1.0 - mu);
                double dp = den;
                for (int i = 1; i < pow; ++i) dp *= den;
                for (size_t j = 0; j < m; ++j) {
                    double numre = 0.0;
                    for (const auto& [mm, c] : nums[j].terms) {
                        Cplx z{1.0, 0.0};
                        for (int i = 0; i < dim; ++i) z = z * g.axis_phase(i, idx[i], mm[i]);
                        numre += c.re * z.re - c.im * z.im;
                    }
                    double v = w * numre / dp;
                    rowacc[j] += v;
                    rowabs[j] += std::abs(v);
                }
                return;
            }
            for (int kk = 0; kk < N; ++kk) {
                idx[axis] = kk;
                rec(axis + 1);
            }
        };
        rec(1);
        acc = rowacc;
        acc_abs = rowabs;
    }

    void eval_transform_level(const TrigPoly& payload, const std::vector<Coord>& xs, int pow, int lvl,
                              std::vector<double>& vals, std::vector<double>& absvals) const {
        int N = far_nodes(lvl);
        int dim = k_.dim;
        size_t nx = xs.size();
        vals.assign(nx, 0.0);
        absvals.assign(nx, 0.0);
        int max_pow = 1;
        for (const auto& [a, w] : k_.cos_atoms)
            for (int i = 0; i < dim; ++i) max_pow = std::max(max_pow, std::abs(static_cast<int>(a[i])));
        for (const auto& [mm, c] : payload.terms)
            for (int i = 0; i < dim; ++i) max_pow = std::max(max_pow, std::abs(static_cast<int>(mm[i])));
        quaddetail::FarGrid g = quaddetail::make_far_grid(dim, N, max_pow);

        // per-axis x-phase tables: X[axis][node][xi index]
        std::array<std::vector<int>, 4> xvals;
        std::array<std::vector<Cplx>, 4> xphase;
        std::array<std::unordered_map<int, int>, 4> xindex;
        for (int ax = 0; ax < dim; ++ax) {
            std::set<int> s;
            for (const auto& x : xs) s.insert(x[static_cast<size_t>(ax)]);
            xvals[static_cast<size_t>(ax)].assign(s.begin(), s.end());
            int c = 0;
            for (int v : xvals[static_cast<size_t>(ax)]) xindex[static_cast<size_t>(ax)][v] = c++;
            xphase[static_cast<size_t>(ax)].resize(static_cast<size_t>(N) * xvals[static_cast<size_t>(ax)].size());
            for (int kk = 0; kk < N; ++kk)
                for (size_t xi = 0; xi < xvals[static_cast<size_t>(ax)].size(); ++xi)
                    xphase[static_cast<size_t>(ax)][static_cast<size_t>(kk) * xvals[static_cast<size_t>(ax)].size() + xi] =
                        unit_phase(g.xs[static_cast<size_t>(kk)] * xvals[static_cast<size_t>(ax)][xi]);
        }
        std::array<size_t, 4> xn{};
        for (int ax = 0; ax < dim; ++ax) xn[static_cast<size_t>(ax)] = xvals[static_cast<size_t>(ax)].size();

        // far: per-k1 slab contraction over remaining axes
        size_t crossx = 1;
        for (int ax = 1; ax < dim; ++ax) crossx *= xn[static_cast<size_t>(ax)];
        std::vector<std::vector<Cplx>> slabres(static_cast<size_t>(N), std::vector<Cplx>(crossx));
        parallel_for(N, threads_, [&](int k1) {
            transform_slab(g, payload, pow, k1, xvals, xphase, slabres[static_cast<size_t>(k1)]);
        });
        // combine: full tensor T(x) = sum_k1 phase(x1,k1) * slab(k1)[x2..xd]
        double cell = std::pow(1.0 / N, dim);
        std::vector<Cplx> T(static_cast<size_t>(xn[0]) * crossx);
        for (int k1 = 0; k1 < N; ++k1) {
            const auto& sl = slabres[static_cast<size_t>(k1)];
            for (size_t x1 = 0; x1 < xn[0]; ++x1) {
                Cplx ph = xphase[0][static_cast<size_t>(k1) * xn[0] + x1];
                Cplx* dst = &T[x1 * crossx];
                for (size_t r = 0; r < crossx; ++r) dst[r] += ph * sl[r];
            }
        }
        // patch nodes, evaluated per x (node counts are small)
        int nr0 = spec_.base_radial_nodes > 0 ? spec_.base_radial_nodes : quaddetail::default_radial_nodes(k_.dim);
        int na0 = spec_.base_angular_nodes > 0 ? spec_.base_angular_nodes : quaddetail::default_angular_nodes(k_.dim);
        int nr = static_cast<int>(std::lround(nr0 * std::pow(1.5, lvl)));
        int na = static_cast<int>(std::lround(na0 * std::pow(1.5, lvl)));
        auto nodes = quaddetail::patch_nodes(dim, r0_, nr, na);
        struct PN {
            std::array<double, 4> y;
            Cplx pw;  // payload(y) / den^pow * weight
        };
        std::vector<PN> pns;
        pns.reserve(nodes.size());
        for (const auto& nd : nodes) {
            double den = denom_pow(nd.y.data(), pow);
            PN p;
            p.y = nd.y;
            p.pw = (nd.w / den) * payload.eval(nd.y.data(), dim);
            pns.push_back(p);
        }
        std::vector<double> patch_v(nx, 0.0), patch_a(nx, 0.0);
        parallel_for(static_cast<int>(nx), threads_, [&](int xi) {
            const Coord& x = xs[static_cast<size_t>(xi)];
            double s = 0.0, sa = 0.0;
            for (const auto& p : pns) {
                double ph = 0.0;
                for (int i = 0; i < dim; ++i) ph += static_cast<double>(x[static_cast<size_t>(i)]) * p.y[static_cast<size_t>(i)];
                Cplx e = unit_phase(ph);
                double v = e.re * p.pw.re - e.im * p.pw.im;
                s += v;
                sa += std::abs(v);
            }
            patch_v[static_cast<size_t>(xi)] = s;
            patch_a[static_cast<size_t>(xi)] = sa;
        });
        for (size_t i = 0; i < nx; ++i) {
            // locate x in T
            const Coord& x = xs[i];
            size_t off = 0;
            for (int ax = 0; ax < dim; ++ax) {
                size_t stride = 1;
                for (int b = ax + 1; b < dim; ++b) stride *= xn[static_cast<size_t>(b)];
                off += static_cast<size_t>(xindex[static_cast<size_t>(ax)].at(x[static_cast<size_t>(ax)])) * stride;
            }
            double farv = T[off].re * cell;
            vals[i] = farv + patch_v[i];
            absvals[i] = std::abs(farv) + patch_a[i];
        }
    }

    void transform_slab(const quaddetail::FarGrid& g, const TrigPoly& payload, int pow, int k1,
                        const std::array<std::vector<int>, 4>& xvals, const std::array<std::vector<Cplx>, 4>& xphase,
                        std::vector<Cplx>& out) const {
        int N = g.N, dim = k_.dim;
        double r02 = r0_ * r0_;
        std::array<size_t, 4> xn{};
        for (int ax = 0; ax < dim; ++ax) xn[static_cast<size_t>(ax)] = xvals[static_cast<size_t>(ax)].size();
        // progressive contraction: G over axes (k2..kd) -> out[x2..xd]
        // recursion handles dims 2..4 uniformly at modest cost
        size_t crossx = 1;
        for (int ax = 1; ax < dim; ++ax) crossx *= xn[static_cast<size_t>(ax)];
        std::fill(out.begin(), out.end(), Cplx{});
        double y[4];
        int idx[4] = {k1, 0, 0, 0};
        y[0] = g.xs[static_cast<size_t>(k1)];

        // Direct loops specialised by dimension keep this readable and fast.
        auto node_value = [&](void) -> Cplx {
            double r2 = 0.0;
            for (int i = 0; i < dim; ++i) r2 += y[i] * y[i];
            double w = 1.0 - quaddetail::cutoff(r2, r02);
            if (w == 0.0) return Cplx{};
            double mu = 0.0;
            for (const auto& [a, ww] : k_.cos_atoms) {
                Cplx z{1.0, 0.0};
                for (int i = 0; i < dim; ++i) z = z * g.axis_phase(i, idx[i], a[i]);
                mu += ww * z.re;
            }
            double den = k_.deg0 * (1.0 - mu);
            double dp = den;
            for (int i = 1; i < pow; ++i) dp *= den;
            Cplx pl;
            for (const auto& [mm, c] : payload.terms) {
                Cplx z{1.0, 0.0};
                for (int i = 0; i < dim; ++i) z = z * g.axis_phase(i, idx[i], mm[i]);
                pl += c * z;
            }
            return (w / dp) * pl;
        };

        if (dim == 2) {
            for (int k2 = 0; k2 < N; ++k2) {
                idx[1] = k2;
                y[1] = g.xs[static_cast<size_t>(k2)];
                Cplx v = node_value();
                if (v.re == 0.0 && v.im == 0.0) continue;
                for (size_t x2 = 0; x2 < xn[1]; ++x2)
                    out[x2] += xphase[1][static_cast<size_t>(k2) * xn[1] + x2] * v;
            }
        } else if (dim == 3) {
            std::vector<Cplx> inner(xn[2]);
            for (int k2 = 0; k2 < N; ++k2) {
                idx[1] = k2;
                y[1] = g.xs[static_cast<size_t>(k2)];
                std::fill(inner.begin(), inner.end(), Cplx{});
                for (int k3 = 0; k3 < N; ++k3) {
                    idx[2] = k3;
                    y[2] = g.xs[static_cast<size_t>(k3)];
                    Cplx v = node_value();
                    if (v.re == 0.0 && v.im == 0.0) continue;
                    for (size_t x3 = 0; x3 < xn[2]; ++x3)
                        inner[x3] += xphase[2][static_cast<size_t>(k3) * xn[2] + x3] * v;
                }
                for (size_t x2 = 0; x2 < xn[1]; ++x2) {
                    Cplx ph = xphase[1][static_cast<size_t>(k2) * xn[1] + x2];
                    for (size_t x3 = 0; x3 < xn[2]; ++x3) out[x2 * xn[2] + x3] += ph * inner[x3];
                }
            }
        } else if (dim == 4) {
            std::vector<Cplx> inner3(xn[3]);
            std::vector<Cplx> inner23(xn[2] * xn[3]);
            for (int k2 = 0; k2 < N; ++k2) {
                idx[1] = k2;
                y[1] = g.xs[static_cast<size_t>(k2)];
                std::fill(inner23.begin(), inner23.end(), Cplx{});
                for (int k3 = 0; k3 < N; ++k3) {
                    idx[2] = k3;
                    y[2] = g.xs[static_cast<size_t>(k3)];
                    std::fill(inner3.begin(), inner3.end(), Cplx{});
                    for (int k4 = 0; k4 < N; ++k4) {
                        idx[3] = k4;
                        y[3] = g.xs[static_cast<size_t>(k4)];
                        Cplx v = node_value();
                        if (v.re == 0.0 && v.im == 0.0) continue;
                        for (size_t x4 = 0; x4 < xn[3]; ++x4)
                            inner3[x4] += xphase[3][static_cast<size_t>(k4) * xn[3] + x4] * v;
                    }
                    for (size_t x3 = 0; x3 < xn[2]; ++x3) {
                        Cplx ph = xphase[2][static_cast<size_t>(k3) * xn[2] + x3];
                        for (size_t x4 = 0; x4 < xn[3]; ++x4) inner23[x3 * xn[3] + x4] += ph * inner3[x4];
                    }
                }
                for (size_t x2 = 0; x2 < xn[1]; ++x2) {
                    Cplx ph = xphase[1][static_cast<size_t>(k2) * xn[1] + x2];
                    for (size_t r = 0; r < xn[2] * xn[3]; ++r) out[x2 * xn[2] * xn[3] + r] += ph * inner23[r];
                }
            }
        }
    }
};

}  // namespace spectile
