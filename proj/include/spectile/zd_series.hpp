#pragma once

#include <cmath>
#include <map>

#include "spectile/interval.hpp"
#include "spectile/common.hpp"
#include "spectile/linalg.hpp"

namespace spectile {

// Z^d machinery beyond the tensor-quadrature range: the torus integrals
// separate under the Laplace representation 1/A^k = int t^{k-1} e^{-tA} dt /
// (k-1)!, turning Green values and Parseval norms into one-dimensional
// integrals of products of scaled Bessel functions I_m(t/d) e^{-t/d} with a
// closed-form tail bound.

inline double chernoff_tail(int d, double delta) {
    if (d < 1) throw Error("chernoff_tail: dimension must be >= 1");
    if (delta < 0.0 || delta > 1.0) throw Error("chernoff_tail: delta outside [0,1]");
    double a = std::exp(-0.5 * d * (1.0 - delta) * (1.0 - delta));
    double b = std::pow(M_PI * M_E * delta / 4.0, 0.5 * d);
    return std::min(a, b);
}

// delta where the exponential and volume bounds cross; independent of d.
inline double chernoff_crossing() {
    double lo = 0.05, hi = 0.9;
    auto f = [](double delta) { return (1.0 - delta) * (1.0 - delta) + std::log(M_PI * M_E * delta / 4.0); };
    for (int it = 0; it < 200; ++it) {
        double midp = 0.5 * (lo + hi);
        if (f(lo) * f(midp) <= 0.0)
            hi = midp;
        else
            lo = midp;
    }
    return 0.5 * (lo + hi);
}

namespace zddetail {

// e^{-x} I_m(x): power series for moderate x, asymptotic expansion beyond.
inline double bessel_i_scaled(int m, double x) {
    m = std::abs(m);
    if (m > 12) throw Error("bessel_i_scaled: order too large");
    if (x < 0.0) throw Error("bessel_i_scaled: negative argument");
    if (x == 0.0) return m == 0 ? 1.0 : 0.0;
    if (x <= 200.0) {
        double term = 1.0;
        for (int j = 1; j <= m; ++j) term *= 0.5 * x / j;
        double sum = term;
        double x24 = 0.25 * x * x;
        for (int j = 1; j < 900; ++j) {
            term *= x24 / (static_cast<double>(j) * (j + m));
            sum += term;
            if (term < sum * 1e-18) break;
        }
        return sum * std::exp(-x);
    }
    // I_m(x) e^{-x} ~ (2 pi x)^{-1/2} sum_k (-1)^k a_k / x^k,
    // a_k = prod_{l=1..k} (4m^2 - (2l-1)^2) / (k! 8^k)
    double mu = 4.0 * m * m;
    double sum = 1.0, term = 1.0;
    for (int k = 1; k <= 10; ++k) {
        term *= -(mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
        sum += term;
    }
    return sum / std::sqrt(2.0 * M_PI * x);
}

// integral over [0, T] of t^{k-1} prod_i Ihat_{z_i}(t/d) by panelled
// Gauss-Legendre; returns two refinement levels for the radius.
inline void bessel_laplace_panels(int d, const std::vector<int>& zs, int k, double T, double& coarse, double& fine) {
    std::vector<double> x1, w1, x2, w2;
    gauss_legendre(24, x1, w1);
    gauss_legendre(38, x2, w2);
    auto integrand = [&](double t) {
        double v = (k == 2) ? t : 1.0;
        for (int i = 0; i < d; ++i) v *= bessel_i_scaled(zs[static_cast<size_t>(i)], t / d);
        return v;
    };
    auto run = [&](const std::vector<double>& gx, const std::vector<double>& gw) {
        double total = 0.0;
        double a = 0.0, b = 1.0;
        while (a < T) {
            if (b > T) b = T;
            double h = 0.5 * (b - a), c = 0.5 * (a + b);
            double s = 0.0;
            for (size_t i = 0; i < gx.size(); ++i) s += gw[i] * integrand(c + h * gx[i]);
            total += s * h;
            a = b;
            b = a * 2.0;
            if (b - a < 1.0) b = a + 1.0;
        }
        return total;
    };
    coarse = run(x1, w1);
    fine = run(x2, w2);
}

// closed-form bound for the dropped tail using Ihat_m(x) <= sqrt(pi/(8x))
inline double bessel_tail_bound(int d, int k, double T) {
    double p = 0.5 * d;
    double c = std::pow(M_PI * d / 8.0, p);
    double expo = (k == 2 ? 2.0 : 1.0) - p;
    if (expo >= 0.0) throw Error("bessel_tail_bound: dimension too small for this power");
    return c * std::pow(T, expo) / (-expo);
}

}  // namespace zddetail

// Green value g_0(x) on Z^d, d >= 3: (1/2d) int_0^inf prod Ihat_{x_i}(t/d) dt.
inline Interval zd_green_series(int d, const Coord& x, double target_err) {
    if (d < 3) throw Error("zd_green_series: requires d >= 3");
    std::vector<int> zs;
    for (int i = 0; i < d; ++i) zs.push_back(x[static_cast<size_t>(i)]);
    for (double T = 1e4;; T *= 8.0) {
        double tail = zddetail::bessel_tail_bound(d, 1, T) / (2.0 * d);
        if (tail > 0.2 * target_err && T < 3e16) continue;
        double coarse, fine;
        zddetail::bessel_laplace_panels(d, zs, 1, T, coarse, fine);
        double val = fine / (2.0 * d);
        double rad = 3.0 * std::abs(fine - coarse) / (2.0 * d) + 1e-12 * (1.0 + std::abs(val));
        // the dropped tail is nonnegative
        return Interval(val + 0.5 * tail, rad + 0.5 * tail);
    }
}

// Parseval sum (1/4d^2) int N(y)/(1-mu)^2 with N given by its exact
// autocorrelation atoms N(y) = sum_z a_z e(z.y).
inline Interval zd_parseval_series(int d, const std::map<Coord, double>& autocorr, double target_err) {
    if (d < 5) throw Error("zd_parseval_series: requires d >= 5");
    double a_l1 = 0.0;
    for (const auto& [z, a] : autocorr) a_l1 += std::abs(a);
    for (double T = 1e4;; T *= 8.0) {
        double tail = a_l1 * zddetail::bessel_tail_bound(d, 2, T) / (4.0 * d * d);
        if (tail > 0.2 * target_err && T < 3e16) continue;
        if (tail > target_err) throw Error("zd_parseval_series: cannot certify target error");
        double sum_c = 0.0, sum_f = 0.0;
        for (const auto& [z, a] : autocorr) {
            std::vector<int> zs;
            for (int i = 0; i < d; ++i) zs.push_back(z[static_cast<size_t>(i)]);
            double coarse, fine;
            zddetail::bessel_laplace_panels(d, zs, 2, T, coarse, fine);
            sum_c += a * coarse;
            sum_f += a * fine;
        }
        double val = sum_f / (4.0 * d * d);
        double rad = 3.0 * std::abs(sum_f - sum_c) / (4.0 * d * d) + 1e-12 * (std::abs(val) + a_l1 / (4.0 * d * d));
        return Interval(val, rad + tail);
    }
}

}  // namespace spectile
