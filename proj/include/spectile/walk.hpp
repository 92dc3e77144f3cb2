#pragma once

#include <cmath>
#include <map>

#include "spectile/rational.hpp"
#include "spectile/tiling.hpp"

namespace spectile {

// Distribution of the random walk at its first (positive) visit to the base
// lattice orbit, as exact rational atoms on lattice displacements.
struct StoppedMeasure {
    int source_orbit = 0;
    std::map<Coord, Rational> atoms;
    Rational mean_stop_time;

    double char_fn(const double* y, int dim) const {
        double s = 0.0;
        for (const auto& [a, p] : atoms) {
            double ph = 0.0;
            for (int i = 0; i < dim; ++i) ph += static_cast<double>(a[i]) * y[i];
            s += p.to_double() * std::cos(2.0 * M_PI * ph);
        }
        return s;
    }
};

inline StoppedMeasure stopped_measure(const TilingSpec& t, int orbit) {
    if (orbit < 0 || orbit >= t.norbits) throw Error("stopped_measure: bad orbit");
    int max_depth = std::max(t.stop_bound, 1) + (orbit == 0 ? 1 : 0);
    StoppedMeasure out;
    out.source_orbit = orbit;
    out.mean_stop_time = Rational(0);

    // live probability mass per (orbit, displacement); one forced first step
    // from the source, absorption whenever orbit 0 is reached afterwards.
    std::map<Vertex, Rational> live;
    Vertex src;
    src.orbit = static_cast<int16_t>(orbit);
    live[src] = Rational(1);
    for (int depth = 0; depth < max_depth + 1; ++depth) {
        if (live.empty()) break;
        std::map<Vertex, Rational> next;
        for (const auto& [v, p] : live) {
            Rational step = p / Rational(t.degree[static_cast<size_t>(v.orbit)]);
            for (const Vertex& w : t.neighbors_of(v)) {
                if (w.orbit == 0) {
                    auto it = out.atoms.find(w.n);
                    if (it == out.atoms.end())
                        out.atoms.emplace(w.n, step);
                    else
                        it->second += step;
                    out.mean_stop_time += Rational(depth + 1) * step;
                } else {
                    next[w] += step;
                }
            }
        }
        live = std::move(next);
    }
    if (!live.empty()) throw Error("stopped_measure: walk does not reach the lattice within the declared bound");
    // total mass must be exactly 1
    Rational total(0);
    for (const auto& [a, p] : out.atoms) total += p;
    if (!(total == Rational(1))) throw Error("stopped_measure: mass leak");
    return out;
}

}  // namespace spectile
