#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "spectile/common.hpp"

namespace spectile {

// Midpoint/radius interval.  Every report-facing quantity carries one of
// these; arithmetic widens conservatively and adds a small floating-point
// slop so double rounding never shrinks an enclosure.
struct Interval {
    double mid = 0.0;
    double rad = 0.0;

    Interval() = default;
    explicit Interval(double m) : mid(m), rad(0.0) {}
    Interval(double m, double r) : mid(m), rad(std::abs(r)) {}

    static Interval exact(double m) { return Interval(m); }
    static Interval pm(double m, double r) { return Interval(m, r); }

    double lower() const { return mid - rad; }
    double upper() const { return mid + rad; }
    bool contains(double x) const { return lower() <= x && x <= upper(); }
    bool intersects(const Interval& o) const { return lower() <= o.upper() && o.lower() <= upper(); }

    static double slop(double scale) { return 4.0 * std::abs(scale) * 2.220446049250313e-16; }

    friend Interval operator+(const Interval& a, const Interval& b) {
        double m = a.mid + b.mid;
        return Interval(m, a.rad + b.rad + slop(m));
    }
    friend Interval operator-(const Interval& a, const Interval& b) {
        double m = a.mid - b.mid;
        return Interval(m, a.rad + b.rad + slop(m));
    }
    friend Interval operator-(const Interval& a) { return Interval(-a.mid, a.rad); }
    friend Interval operator*(const Interval& a, const Interval& b) {
        double m = a.mid * b.mid;
        double r = std::abs(a.mid) * b.rad + std::abs(b.mid) * a.rad + a.rad * b.rad;
        return Interval(m, r + slop(m));
    }
    friend Interval operator*(double c, const Interval& a) { return Interval(c) * a; }
    friend Interval operator*(const Interval& a, double c) { return Interval(c) * a; }
    friend Interval operator+(const Interval& a, double c) { return a + Interval(c); }
    friend Interval operator-(const Interval& a, double c) { return a - Interval(c); }

    // Division requires the divisor interval to exclude zero.
    friend Interval operator/(const Interval& a, const Interval& b) {
        if (b.lower() <= 0.0 && b.upper() >= 0.0) throw Error("interval: division by interval containing 0");
        double c1 = a.lower() / b.lower(), c2 = a.lower() / b.upper();
        double c3 = a.upper() / b.lower(), c4 = a.upper() / b.upper();
        double lo = std::min(std::min(c1, c2), std::min(c3, c4));
        double hi = std::max(std::max(c1, c2), std::max(c3, c4));
        double m = 0.5 * (lo + hi);
        return Interval(m, 0.5 * (hi - lo) + slop(m));
    }

    Interval& operator+=(const Interval& b) { return *this = *this + b; }
    Interval& operator-=(const Interval& b) { return *this = *this - b; }

    friend Interval sqr(const Interval& a) { return a * a; }

    friend Interval hull(const Interval& a, const Interval& b) {
        double lo = std::min(a.lower(), b.lower());
        double hi = std::max(a.upper(), b.upper());
        return Interval(0.5 * (lo + hi), 0.5 * (hi - lo));
    }

    std::string str() const {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.12g +- %.3g", mid, rad);
        return buf;
    }
};

// cos(2*pi*x) over an interval, used by the trivially-small enclosures in the
// evaluate module.  Monotonicity is not assumed; the bound is the crude
// Lipschitz one (|d/dx cos(2 pi x)| <= 2 pi), adequate for tiny radii.
inline Interval cos2pi(const Interval& x) {
    double m = std::cos(2.0 * M_PI * x.mid);
    double r = std::min(2.0, 2.0 * M_PI * x.rad);
    return Interval(m, r + Interval::slop(1.0));
}

}  // namespace spectile
