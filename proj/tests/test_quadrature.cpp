#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "spectile/quadrature.hpp"

using namespace spectile;

namespace {
Coord cv(std::initializer_list<int> xs) {
    Coord c = zero_coord();
    int i = 0;
    for (int x : xs) c[static_cast<size_t>(i++)] = static_cast<int16_t>(x);
    return c;
}
}  // namespace

TEST_CASE("triangular Green value at a neighbor is exactly -1/6") {
    Kernel k = make_kernel(builtin("tri"));
    QuadratureSpec q;
    q.target_abs_error = 1e-10;
    TorusQuad quad(k, q);
    TrigPoly num;  // e(v1.y) - 1 difference kernel
    num.add(cv({1, 0}), Cplx{1.0, 0.0});
    num.add(cv({0, 0}), Cplx{-1.0, 0.0});
    Interval g = quad.integrate(num, 1);
    CHECK(g.contains(-1.0 / 6.0));
    CHECK(g.rad < 1e-10);
}

TEST_CASE("kernel curvature bound holds near the origin") {
    for (const char* name : {"tri", "hex", "fcc", "d4"}) {
        Kernel k = make_kernel(builtin(name));
        CHECK(k.kappa > 0.0);
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (int trial = 0; trial < 2000; ++trial) {
            double y[4] = {0, 0, 0, 0};
            double r2 = 0.0;
            for (int i = 0; i < k.dim; ++i) {
                y[i] = U(rng) * k.r0_max / std::sqrt(static_cast<double>(k.dim));
                r2 += y[i] * y[i];
            }
            CHECK(1.0 - k.mu_hat(y) >= k.kappa * r2 - 1e-12);
        }
    }
}

TEST_CASE("fcc pair norm matches the published value") {
    Kernel k = make_kernel(builtin("fcc"));
    QuadratureSpec q;
    q.target_abs_error = 2e-6;
    TorusQuad quad(k, q);
    TrigPoly nu;
    nu.add(cv({0, 0, 0}), Cplx{1.0, 0.0});
    nu.add(cv({1, 0, 0}), Cplx{-1.0, 0.0});
    Interval n = quad.integrate(nu.abs_squared(), 2);
    CHECK(n.intersects(Interval::pm(0.01867, 5e-5)));
}

TEST_CASE("d4 pair norm matches the published value") {
    Kernel k = make_kernel(builtin("d4"));
    QuadratureSpec q;
    q.target_abs_error = 5e-7;
    TorusQuad quad(k, q);
    TrigPoly nu;
    nu.add(cv({0, 0, 0, 0}), Cplx{1.0, 0.0});
    nu.add(cv({1, 0, 0, 0}), Cplx{-1.0, 0.0});
    Interval n = quad.integrate(nu.abs_squared(), 2);
    CHECK(n.intersects(Interval::pm(0.0038397, 3e-7)));
}

TEST_CASE("batched transform agrees with scalar integration") {
    Kernel k = make_kernel(builtin("tri"));
    QuadratureSpec q;
    q.target_abs_error = 1e-9;
    TorusQuad quad(k, q);
    // payload nuhat*(y) for nu = delta_0 - delta_{v1} - delta_{v2} + delta_{v1+v2}
    TrigPoly payload;
    for (auto& [m, s] : std::vector<std::pair<Coord, double>>{
             {cv({0, 0}), 1.0}, {cv({1, 0}), -1.0}, {cv({0, 1}), -1.0}, {cv({1, 1}), 1.0}}) {
        payload.add(neg(m), Cplx{s, 0.0});
    }
    std::vector<Coord> xs = {cv({0, 0}), cv({1, 0}), cv({2, -1}), cv({3, 3})};
    auto batch = quad.transform(payload, xs, 1);
    for (size_t i = 0; i < xs.size(); ++i) {
        TrigPoly num;
        for (const auto& [m, c] : payload.terms) num.add(add(m, xs[i]), c);
        Interval direct = quad.integrate(num, 1);
        CHECK(batch[i].intersects(direct));
        CHECK(std::abs(batch[i].mid - direct.mid) < 1e-9);
    }
}

TEST_CASE("quadrature refuses unreachable tolerance") {
    Kernel k = make_kernel(builtin("d4"));
    QuadratureSpec q;
    q.target_abs_error = 1e-16;
    q.max_levels = 1;
    q.base_far_nodes = 12;
    q.base_radial_nodes = 6;
    q.base_angular_nodes = 4;
    TorusQuad quad(k, q);
    TrigPoly nu;
    nu.add(cv({0, 0, 0, 0}), Cplx{1.0, 0.0});
    nu.add(cv({1, 0, 0, 0}), Cplx{-1.0, 0.0});
    CHECK_THROWS_AS(quad.integrate(nu.abs_squared(), 2), Error);
}
