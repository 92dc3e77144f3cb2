#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "spectile/walk.hpp"

using namespace spectile;

namespace {
Coord cv(std::initializer_list<int> xs) {
    Coord c = zero_coord();
    int i = 0;
    for (int x : xs) c[static_cast<size_t>(i++)] = static_cast<int16_t>(x);
    return c;
}
}  // namespace

TEST_CASE("triangular stopped measure is uniform on the six units") {
    StoppedMeasure mu = stopped_measure(builtin("tri"), 0);
    CHECK(mu.atoms.size() == 6);
    for (const auto& [a, p] : mu.atoms) CHECK(p == Rational(1, 6));
    CHECK(mu.mean_stop_time == Rational(1));
}

TEST_CASE("honeycomb stopped measures") {
    TilingSpec hex = builtin("hex");
    StoppedMeasure m0 = stopped_measure(hex, 0);
    CHECK(m0.atoms.at(cv({0, 0})) == Rational(1, 3));
    CHECK(m0.atoms.size() == 7);
    for (auto d : {cv({1, 0}), cv({-1, 0}), cv({0, 1}), cv({0, -1}), cv({1, -1}), cv({-1, 1})})
        CHECK(m0.atoms.at(d) == Rational(1, 9));
    CHECK(m0.mean_stop_time == Rational(2));

    StoppedMeasure m1 = stopped_measure(hex, 1);
    CHECK(m1.atoms.size() == 3);
    for (auto d : {cv({0, 0}), cv({1, 0}), cv({0, 1})}) CHECK(m1.atoms.at(d) == Rational(1, 3));
    CHECK(m1.mean_stop_time == Rational(1));
}

TEST_CASE("characteristic function normalisation and symbolic match") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(-0.5, 0.5);
    for (const char* name : {"tri", "hex", "fcc", "d4", "zd6"}) {
        TilingSpec t = builtin(name);
        StoppedMeasure mu = stopped_measure(t, 0);
        double zero[kMaxDim] = {0.0};
        CHECK(mu.char_fn(zero, t.dim) == Catch::Approx(1.0).margin(1e-14));
        for (int trial = 0; trial < 1000; ++trial) {
            double y[kMaxDim] = {0.0};
            for (int i = 0; i < t.dim; ++i) y[i] = U(rng);
            double v = mu.char_fn(y, t.dim);
            CHECK(std::abs(v) <= 1.0 + 1e-12);
            // direct summation over atoms with independent cos evaluation
            double direct = 0.0;
            for (const auto& [a, p] : mu.atoms) {
                double ph = 0.0;
                for (int i = 0; i < t.dim; ++i) ph += a[static_cast<size_t>(i)] * y[i];
                direct += p.to_double() * std::cos(2 * M_PI * ph);
            }
            CHECK(v == Catch::Approx(direct).margin(1e-14));
        }
    }
}

TEST_CASE("zd characteristic function is the averaged cosine sum") {
    TilingSpec z5 = builtin("zd5");
    StoppedMeasure mu = stopped_measure(z5, 0);
    double y[kMaxDim] = {0.11, -0.23, 0.31, 0.02, -0.47};
    double want = 0.0;
    for (int i = 0; i < 5; ++i) want += std::cos(2 * M_PI * y[i]) / 5.0;
    CHECK(mu.char_fn(y, 5) == Catch::Approx(want).margin(1e-14));
}
