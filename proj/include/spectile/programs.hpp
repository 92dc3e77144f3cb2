#pragma once

#include <queue>

#include "spectile/interval.hpp"
#include "spectile/linalg.hpp"
#include "spectile/prevector.hpp"

namespace spectile {

enum class ProgramMode { Q, P, Qprime, Pprime, Qj, Pj };

inline bool mode_is_quadratic(ProgramMode m) { return m == ProgramMode::Qprime || m == ProgramMode::Pprime; }
inline bool mode_is_equality(ProgramMode m) {
    return m == ProgramMode::Q || m == ProgramMode::Qprime || m == ProgramMode::Qj;
}

// Constrained minimisation instance.  Variables are the distance-1
// enlargement of the constraint sites; the box |x| <= 1/2 is always present.
// Sites may carry height 0 (forced-zero ring constraints).
struct ProgramSpec {
    ProgramMode mode = ProgramMode::P;
    const TilingSpec* tiling = nullptr;
    std::vector<Vertex> sites;
    std::vector<Rational> heights;
    int segments = 8;
};

struct ProgramValue {
    Interval lower_bound;  // only the lower endpoint is contractual
    std::vector<std::pair<Vertex, double>> minimizer;
    double dual_gap = std::numeric_limits<double>::infinity();
    long cells = 0;
    std::string certificate;
};

namespace progdetail {

struct Instance {
    ProgramMode mode;
    int nvars = 0, ncons = 0;
    std::vector<Vertex> vars;
    std::vector<std::vector<std::pair<int, double>>> rows;  // constraint -> (var, coeff)
    std::vector<double> rhs;
    double lo = -0.5;  // P-family restricts to [0, 1/2]
    int segments = 8;
};

inline Instance build(const ProgramSpec& spec) {
    if (spec.sites.size() != spec.heights.size()) throw Error("program: sites/heights mismatch");
    const TilingSpec& t = *spec.tiling;
    Instance ins;
    ins.mode = spec.mode;
    ins.segments = std::max(1, spec.segments);
    ins.vars = ball(t, spec.sites, 1);
    ins.nvars = static_cast<int>(ins.vars.size());
    ins.ncons = static_cast<int>(spec.sites.size());
    std::unordered_map<Vertex, int, VertexHash> idx;
    for (int i = 0; i < ins.nvars; ++i) idx[ins.vars[static_cast<size_t>(i)]] = i;
    bool eq = mode_is_equality(spec.mode);
    for (size_t c = 0; c < spec.sites.size(); ++c) {
        const Vertex& u = spec.sites[c];
        std::map<int, double> row;
        row[idx.at(u)] += static_cast<double>(t.degree[static_cast<size_t>(u.orbit)]);
        for (const Vertex& w : t.neighbors_of(u)) row[idx.at(w)] += eq ? -1.0 : 1.0;
        ins.rows.push_back({row.begin(), row.end()});
        double h = spec.heights[c].to_double();
        ins.rhs.push_back(eq ? h : std::abs(h));
    }
    ins.lo = eq ? -0.5 : 0.0;
    return ins;
}

// ---- objective pieces -----------------------------------------------------

inline double fcos(double x) { return 1.0 - std::cos(2.0 * M_PI * x); }
inline double fcos_d(double x) { return 2.0 * M_PI * std::sin(2.0 * M_PI * x); }

// Convex minorant of 1-cos(2 pi x) on [l, u]: up to three pieces
// (left tangent line | cosine core | right tangent line).  Tangent points are
// bracketed so the lines provably stay below the objective.
struct Minorant {
    double l = 0, u = 0;
    double tl = 0, tr = 0;      // piece boundaries (tl <= tr)
    bool has_core = false;      // cosine piece on [tl, tr]
    double sl = 0, al = 0;      // left line  al + sl * x
    double sr = 0, ar = 0;      // right line ar + sr * x
    bool lin_only = false;      // single chord (domain in a concave region)
    double s0 = 0, a0 = 0;

    double eval(double x) const {
        if (lin_only) return a0 + s0 * x;
        if (has_core && x >= tl && x <= tr) return fcos(x);
        if (x < tl) return al + sl * x;
        return ar + sr * x;
    }
};

// tangent point t in [0, 1/4] with tangent line at t passing at or below
// (u, f(u)); returns the lower bracket end so the line is certified under f.
inline double tangent_point_right(double u) {
    auto g = [&](double t) { return fcos(t) + fcos_d(t) * (u - t) - fcos(u); };
    double lo = 0.0, hi = 0.25;
    if (g(hi) <= 0.0) return hi;
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        if (g(mid) <= 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

inline Minorant make_minorant(double l, double u) {
    Minorant m;
    m.l = l;
    m.u = u;
    if (l >= -0.25 && u <= 0.25) {
        m.has_core = true;
        m.tl = l;
        m.tr = u;
        m.sl = m.al = m.sr = m.ar = 0.0;
        // make out-of-range queries safe
        m.ar = fcos(u);
        m.al = fcos(l);
        return m;
    }
    if (l >= 0.25 || u <= -0.25) {
        // concave region: chord
        m.lin_only = true;
        m.s0 = (fcos(u) - fcos(l)) / (u - l);
        m.a0 = fcos(l) - m.s0 * l;
        return m;
    }
    // mixed: tangents from the outer endpoints into the core
    double tr = u > 0.25 ? std::max(l, tangent_point_right(u)) : u;
    double tl = l < -0.25 ? std::min(u, -tangent_point_right(-l)) : l;
    if (tl > tr) throw Error("minorant: inconsistent tangent points");
    m.has_core = true;
    m.tl = tl;
    m.tr = tr;
    if (u > 0.25) {
        if (tr > l && tr < u && fcos(tr) + fcos_d(tr) * (u - tr) <= fcos(u) + 1e-12) {
            m.sr = fcos_d(tr);
        } else {
            m.sr = (fcos(u) - fcos(tr)) / (u - tr);
        }
        m.ar = fcos(tr) - m.sr * tr;
    } else {
        m.sr = 0.0;
        m.ar = fcos(u);
    }
    if (l < -0.25) {
        if (tl < u && tl > l && fcos(tl) - fcos_d(tl) * (tl - l) <= fcos(l) + 1e-12) {
            m.sl = fcos_d(tl);
        } else {
            m.sl = (fcos(tl) - fcos(l)) / (tl - l);
        }
        m.al = fcos(tl) - m.sl * tl;
    } else {
        m.sl = 0.0;
        m.al = fcos(l);
    }
    return m;
}

// min over [l,u] of piece-wise minorant minus g*x; also reports argmin.
inline double minorant_dual_min(const Minorant& m, double g, double* xmin) {
    double best = std::numeric_limits<double>::infinity();
    double bx = m.l;
    auto consider = [&](double x, double v) {
        if (v < best) {
            best = v;
            bx = x;
        }
    };
    if (m.lin_only) {
        consider(m.l, m.a0 + (m.s0 - g) * m.l);
        consider(m.u, m.a0 + (m.s0 - g) * m.u);
    } else {
        if (m.has_core) {
            consider(m.tl, fcos(m.tl) - g * m.tl);
            consider(m.tr, fcos(m.tr) - g * m.tr);
            if (std::abs(g) <= 2.0 * M_PI) {
                double xc = std::asin(g / (2.0 * M_PI)) / (2.0 * M_PI);
                if (xc >= m.tl && xc <= m.tr) consider(xc, fcos(xc) - g * xc);
            }
        }
        if (m.tl > m.l) {
            consider(m.l, m.al + (m.sl - g) * m.l);
            consider(m.tl, m.al + (m.sl - g) * m.tl);
        }
        if (m.tr < m.u) {
            consider(m.tr, m.ar + (m.sr - g) * m.tr);
            consider(m.u, m.ar + (m.sr - g) * m.u);
        }
    }
    if (xmin) *xmin = bx;
    return best - 1e-13 * (1.0 + std::abs(g));
}

// quadratic piece: min over [l,u] of x^2 - g*x
inline double quadratic_dual_min(double l, double u, double g, double* xmin) {
    double x = std::clamp(0.5 * g, l, u);
    if (xmin) *xmin = x;
    return x * x - g * x - 1e-15 * (1.0 + g * g);
}

// ---- dual ascent ----------------------------------------------------------

struct DualResult {
    double bound = -std::numeric_limits<double>::infinity();
    std::vector<double> lambda;
    std::vector<double> x;
};

// Evaluates the (rigorous) Lagrangian dual for fixed multipliers and climbs
// it with an adaptive supergradient method.  Any multiplier value yields a
// valid lower bound; ascent quality only affects tightness.
template <typename PieceMin>
DualResult dual_ascent(const Instance& ins, const PieceMin& piece_min, std::vector<double> lambda0, int iters,
                       double stop_above) {
    int n = ins.nvars, m = ins.ncons;
    bool eq = mode_is_equality(ins.mode);
    std::vector<double> lambda = lambda0.empty() ? std::vector<double>(static_cast<size_t>(m), 0.0) : lambda0;
    std::vector<double> g(static_cast<size_t>(n)), x(static_cast<size_t>(n));
    DualResult best;
    best.lambda = lambda;
    double step = 0.1;
    for (int it = 0; it < iters; ++it) {
        std::fill(g.begin(), g.end(), 0.0);
        for (int c = 0; c < m; ++c)
            for (const auto& [j, a] : ins.rows[static_cast<size_t>(c)]) g[static_cast<size_t>(j)] += lambda[static_cast<size_t>(c)] * a;
        double d = 0.0;
        for (int c = 0; c < m; ++c) d += lambda[static_cast<size_t>(c)] * ins.rhs[static_cast<size_t>(c)];
        for (int j = 0; j < n; ++j) d += piece_min(j, g[static_cast<size_t>(j)], &x[static_cast<size_t>(j)]);
        if (d > best.bound) {
            best.bound = d;
            best.lambda = lambda;
            best.x = x;
            step *= 1.25;
        } else {
            lambda = best.lambda;
            step *= 0.6;
            if (step < 1e-14) break;
        }
        if (best.bound > stop_above) break;
        // supergradient at the current best
        std::vector<double> s(static_cast<size_t>(m));
        double snorm = 0.0;
        for (int c = 0; c < m; ++c) {
            double ax = 0.0;
            for (const auto& [j, a] : ins.rows[static_cast<size_t>(c)]) ax += a * (best.x.empty() ? 0.0 : best.x[static_cast<size_t>(j)]);
            s[static_cast<size_t>(c)] = ins.rhs[static_cast<size_t>(c)] - ax;
            snorm += s[static_cast<size_t>(c)] * s[static_cast<size_t>(c)];
        }
        if (snorm < 1e-28) break;
        for (int c = 0; c < m; ++c) {
            double nl = best.lambda[static_cast<size_t>(c)] + step * s[static_cast<size_t>(c)];
            if (!eq && nl < 0.0) nl = 0.0;
            lambda[static_cast<size_t>(c)] = nl;
        }
    }
    return best;
}

// ---- quadratic modes: active-set KKT with exact dual certificate -----------

inline ProgramValue solve_quadratic(const Instance& ins, double tol) {
    (void)tol;
    int n = ins.nvars, m = ins.ncons;
    bool eq = mode_is_equality(ins.mode);
    std::vector<int> active;
    for (int c = 0; c < m; ++c)
        if (eq || ins.rhs[static_cast<size_t>(c)] > 0.0) active.push_back(c);
    std::vector<double> lambda_full(static_cast<size_t>(m), 0.0);
    std::vector<double> x(static_cast<size_t>(n), 0.0);
    for (int round = 0; round < 4 * m + 8; ++round) {
        int k = static_cast<int>(active.size());
        std::vector<double> lam;
        if (k > 0) {
            Matrix G(k, k);
            std::vector<double> b2(static_cast<size_t>(k));
            for (int i = 0; i < k; ++i) {
                b2[static_cast<size_t>(i)] = 2.0 * ins.rhs[static_cast<size_t>(active[static_cast<size_t>(i)])];
                for (int j = 0; j < k; ++j) {
                    double dot = 0.0;
                    // sparse row dot
                    const auto& ri = ins.rows[static_cast<size_t>(active[static_cast<size_t>(i)])];
                    const auto& rj = ins.rows[static_cast<size_t>(active[static_cast<size_t>(j)])];
                    size_t a = 0, b = 0;
                    while (a < ri.size() && b < rj.size()) {
                        if (ri[a].first < rj[b].first)
                            ++a;
                        else if (ri[a].first > rj[b].first)
                            ++b;
                        else {
                            dot += ri[a].second * rj[b].second;
                            ++a;
                            ++b;
                        }
                    }
                    G(i, j) = dot;
                }
            }
            lam = solve_dense(G, b2);
        }
        std::fill(x.begin(), x.end(), 0.0);
        for (int i = 0; i < k; ++i)
            for (const auto& [j, a] : ins.rows[static_cast<size_t>(active[static_cast<size_t>(i)])])
                x[static_cast<size_t>(j)] += 0.5 * lam[static_cast<size_t>(i)] * a;
        if (!eq) {
            // drop the most negative multiplier, if any
            int worst = -1;
            double wv = -1e-12;
            for (int i = 0; i < k; ++i)
                if (lam[static_cast<size_t>(i)] < wv) {
                    wv = lam[static_cast<size_t>(i)];
                    worst = i;
                }
            if (worst >= 0) {
                active.erase(active.begin() + worst);
                continue;
            }
            // add back violated inactive constraints
            int viol = -1;
            double vv = 1e-12;
            for (int c = 0; c < m; ++c) {
                if (std::find(active.begin(), active.end(), c) != active.end()) continue;
                double ax = 0.0;
                for (const auto& [j, a] : ins.rows[static_cast<size_t>(c)]) ax += a * x[static_cast<size_t>(j)];
                double gap = ins.rhs[static_cast<size_t>(c)] - ax;
                if (gap > vv) {
                    vv = gap;
                    viol = c;
                }
            }
            if (viol >= 0) {
                active.push_back(viol);
                continue;
            }
        }
        std::fill(lambda_full.begin(), lambda_full.end(), 0.0);
        for (int i = 0; i < k; ++i) lambda_full[static_cast<size_t>(active[static_cast<size_t>(i)])] = lam[static_cast<size_t>(i)];
        break;
    }
    // rigorous dual value at lambda_full (box-aware)
    auto piece = [&](int j, double g, double* xm) { return quadratic_dual_min(ins.lo, 0.5, g, xm); };
    DualResult d = dual_ascent(ins, piece, lambda_full, 40, std::numeric_limits<double>::infinity());
    double primal = 0.0;
    bool in_box = true;
    for (double v : x) {
        primal += v * v;
        if (v < ins.lo - 1e-12 || v > 0.5 + 1e-12) in_box = false;
    }
    ProgramValue out;
    out.lower_bound = Interval(d.bound, 1e-12 * (1.0 + std::abs(d.bound)));
    out.dual_gap = in_box ? std::abs(primal - d.bound) : std::numeric_limits<double>::infinity();
    out.cells = 1;
    out.certificate = "kkt-dual";
    for (int j = 0; j < n; ++j) out.minimizer.push_back({ins.vars[static_cast<size_t>(j)], x[static_cast<size_t>(j)]});
    return out;
}

// ---- cosine modes: branch and bound over interval cells --------------------

struct Node {
    std::vector<std::pair<double, double>> dom;
    double bound = -std::numeric_limits<double>::infinity();
    std::vector<double> lambda;
    std::vector<double> x;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const { return a.bound > b.bound; }
};

inline ProgramValue solve_cosine(const Instance& ins, double tol, double prune_threshold, int effort) {
    int n = ins.nvars;
    double leaf_width = 0.25 / ins.segments;
    int iters = effort >= 2 ? 1400 : (effort == 1 ? 400 : 120);

    auto node_bound = [&](Node& nd, const std::vector<double>& warm) {
        std::vector<Minorant> mins;
        mins.reserve(static_cast<size_t>(n));
        for (int j = 0; j < n; ++j) mins.push_back(make_minorant(nd.dom[static_cast<size_t>(j)].first, nd.dom[static_cast<size_t>(j)].second));
        auto piece = [&](int j, double g, double* xm) { return minorant_dual_min(mins[static_cast<size_t>(j)], g, xm); };
        DualResult d = dual_ascent(ins, piece, warm, iters, prune_threshold);
        nd.bound = d.bound;
        nd.lambda = d.lambda;
        nd.x = d.x;
    };

    Node root;
    root.dom.assign(static_cast<size_t>(n), {ins.lo, 0.5});
    node_bound(root, {});
    std::priority_queue<Node, std::vector<Node>, NodeOrder> heap;
    heap.push(root);
    long cells = 0;
    double best_leaf = std::numeric_limits<double>::infinity();
    Node best_node = root;
    const long cell_cap = effort >= 2 ? 200000 : 20000;
    while (!heap.empty()) {
        Node nd = heap.top();
        heap.pop();
        ++cells;
        if (nd.bound > prune_threshold) {
            // minimum of the heap already exceeds the threshold
            ProgramValue out;
            out.lower_bound = Interval(nd.bound, 1e-12 * (1 + std::abs(nd.bound)));
            out.cells = cells;
            out.certificate = "exceeds-threshold";
            return out;
        }
        // pick branch variable: widest domain not yet leaf-sized, whose
        // dual argmin sits outside the core
        int bvar = -1;
        double bscore = 0.0;
        for (int j = 0; j < n; ++j) {
            double l = nd.dom[static_cast<size_t>(j)].first, u = nd.dom[static_cast<size_t>(j)].second;
            double w = u - l;
            bool is_core = l >= -0.25 && u <= 0.25;
            if (is_core) continue;
            if (w <= leaf_width + 1e-12) continue;
            double xj = nd.x.empty() ? 0.0 : nd.x[static_cast<size_t>(j)];
            double score = w + (std::abs(xj) > 0.25 ? 1.0 : 0.0);
            if (score > bscore) {
                bscore = score;
                bvar = j;
            }
        }
        if (bvar < 0) {
            // leaf: certified bound for this cell
            if (nd.bound < best_leaf) {
                best_leaf = nd.bound;
                best_node = nd;
            }
            // remaining nodes all have bound >= nd.bound? not necessarily;
            // keep draining until the heap minimum is >= best_leaf
            if (heap.empty() || heap.top().bound >= best_leaf - 1e-12) {
                ProgramValue out;
                double certified = heap.empty() ? best_leaf : std::min(best_leaf, heap.top().bound);
                out.lower_bound = Interval(certified, 1e-12 * (1 + std::abs(certified)));
                out.cells = cells;
                out.dual_gap = 0.0;
                out.certificate = "cell-dual";
                for (int j = 0; j < n; ++j) out.minimizer.push_back({ins.vars[static_cast<size_t>(j)], best_node.x.empty() ? 0.0 : best_node.x[static_cast<size_t>(j)]});
                return out;
            }
            continue;
        }
        if (cells > cell_cap) throw Error("program solve: cell budget exhausted");
        double l = nd.dom[static_cast<size_t>(bvar)].first, u = nd.dom[static_cast<size_t>(bvar)].second;
        std::vector<std::pair<double, double>> cuts;
        if (l < -0.25 && u > 0.25) {
            cuts = {{l, -0.25}, {-0.25, 0.25}, {0.25, u}};
        } else if (l >= -0.25 && u > 0.25 && l < 0.25) {
            cuts = {{l, 0.25}, {0.25, u}};
        } else if (u <= 0.25 && l < -0.25 && u > -0.25) {
            cuts = {{l, -0.25}, {-0.25, u}};
        } else {
            double mid = 0.5 * (l + u);
            cuts = {{l, mid}, {mid, u}};
        }
        for (const auto& cut : cuts) {
            Node ch = nd;
            ch.dom[static_cast<size_t>(bvar)] = cut;
            node_bound(ch, nd.lambda);
            if (ch.bound <= prune_threshold || true) heap.push(ch);
        }
    }
    ProgramValue out;
    out.lower_bound = Interval(best_leaf, 1e-12 * (1 + std::abs(best_leaf)));
    out.cells = cells;
    out.certificate = "cell-dual";
    return out;
}

}  // namespace progdetail

// Certified lower bound for the program.  prune_threshold allows early exit
// once the bound provably exceeds a caller-side pruning level; effort
// controls dual-ascent iteration budgets.
inline ProgramValue solve(const ProgramSpec& spec, double tol, double prune_threshold = std::numeric_limits<double>::infinity(),
                          int effort = 1) {
    progdetail::Instance ins = progdetail::build(spec);
    if (ins.ncons == 0) {
        ProgramValue out;
        out.lower_bound = Interval(0.0, 0.0);
        out.certificate = "empty";
        return out;
    }
    if (mode_is_quadratic(spec.mode)) return progdetail::solve_quadratic(ins, tol);
    return progdetail::solve_cosine(ins, tol, prune_threshold, effort);
}

// Exact value of Q'({v}, nu) for a degree-deg vertex with |nu_v| = height:
// height^2 / (deg (deg+1)).
inline Rational singleton_closed_form(int deg, int height) {
    if (deg < 2) throw Error("singleton_closed_form: degree must be >= 2");
    return Rational(static_cast<int64_t>(height) * height, static_cast<int64_t>(deg) * (deg + 1));
}

// Lagrange/Gram row-sum bound: k constraint gradients of squared norm norm2
// whose signed cross products have row sums bounded by max_cross_rowsum give
// sum x^2 >= k / (norm2 + max_cross_rowsum), provided the perturbation is a
// contraction (rowsum < norm2 / 2), which forces the multiplier signs.
inline Rational gram_bound(int k, const Rational& norm2, const Rational& max_cross_rowsum) {
    if (k < 1) throw Error("gram_bound: k must be positive");
    Rational half = norm2 / Rational(2);
    if (!(max_cross_rowsum < half)) throw Error("gram_bound: sign-positivity precondition fails");
    return Rational(k) / (norm2 + max_cross_rowsum);
}

enum class PairOffset { Adjacent, TwoStep, Diagonal, Far };

// Closed forms for hypercubic pair programs P'({0,u},1) via the symmetric
// Lagrange solution 2 / (|v|^2 + v1.v2).
inline Rational pair_closed_form(int d, PairOffset kind) {
    int64_t dd = d;
    int64_t base = 4 * dd * dd + 2 * dd;
    switch (kind) {
        case PairOffset::Adjacent: return Rational(2, base + 4 * dd);
        case PairOffset::TwoStep: return Rational(2, base + 1);
        case PairOffset::Diagonal: return Rational(2, base + 2);
        case PairOffset::Far: return Rational(2, base);
    }
    throw Error("pair_closed_form: bad kind");
}

inline Rational zd_singleton_closed_form(int d, int height) { return singleton_closed_form(2 * d, height); }

}  // namespace spectile
