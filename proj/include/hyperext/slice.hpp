#pragma once

// Slice engine for radial convolutions on hyperboloid sheets.
//
// For radial profiles the convolution density depends on (rho, tau) = (|xi|, tau) and reduces to
//   h(rho, tau) = (2 pi / rho) * g(rho, tau),   g = integral of P(x) over A(rho, tau),
// where P(x) = A(x) B(tau + beta x) is the product of the two profiles in chart variables,
// R1 = phi_{sA}(x), R2 = phi_{sB}(tau + beta x), and A(rho, tau) = {x : |R1 - R2| <= rho <= R1 + R2}.
// beta = -1 for two upper-sheet factors (x + y = tau) and +1 for upper/lower (y - x = tau).
// Profiles are piecewise polynomial in the chart, so P is piecewise polynomial and g is evaluated
// exactly from a cumulative table; only the outer (rho, tau) integrations are numerical.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "hyperext/common.hpp"
#include "hyperext/quadrature.hpp"
#include "hyperext/radial.hpp"

namespace hyperext::slice {

enum class Kind { self, cross };

template <class T>
struct Source {
    Kind kind = Kind::self;
    PiecewisePoly<T> A, B;
    double sA = 1.0, sB = 1.0;
    // A and B identical (same coefficients and mass); enables the symmetric fast path.
    bool symmetric = false;

    int beta() const { return kind == Kind::self ? -1 : 1; }
    bool empty() const { return A.empty() || B.empty(); }
    double tau_lo() const { return kind == Kind::self ? A.lo() + B.lo() : B.lo() - A.hi(); }
    double tau_hi() const { return kind == Kind::self ? A.hi() + B.hi() : B.hi() - A.lo(); }
};

// f mu_{s} * g mu_{s}, or the mixed product when the two masses differ.
template <class T>
Source<T> self_source(const RadialProfile<T>& f, const RadialProfile<T>& g) {
    Source<T> src;
    src.kind = Kind::self;
    src.A = f.poly();
    src.B = g.poly();
    src.sA = f.s();
    src.sB = g.s();
    src.symmetric = &f == &g || (f.s() == g.s() && f.chart() == g.chart() && f.values() == g.values() &&
                                 f.mode() == g.mode());
    return src;
}

// (f_plus mu_+) * (f_minus mu_-) with time difference tau = t_plus - t_minus.
template <class T>
Source<T> cross_source(const RadialProfile<T>& f_plus, const RadialProfile<T>& f_minus) {
    require(f_plus.s() == f_minus.s(), "cross convolution needs a shared mass parameter");
    Source<T> src;
    src.kind = Kind::cross;
    src.A = f_minus.poly();
    src.B = f_plus.poly();
    src.sA = src.sB = f_plus.s();
    return src;
}

// Source with explicit piecewise polynomials (used for |f|^2 and similar derived densities).
template <class T>
Source<T> poly_source(Kind kind, PiecewisePoly<T> A, double sA, PiecewisePoly<T> B, double sB,
                      bool symmetric = false) {
    Source<T> src;
    src.kind = kind;
    src.A = std::move(A);
    src.B = std::move(B);
    src.sA = sA;
    src.sB = sB;
    src.symmetric = symmetric;
    return src;
}

struct Geometry {
    double tau = 0.0, sA = 0.0, sB = 0.0;
    int beta = -1;

    double y(double x) const { return tau + beta * x; }
    double R1(double x) const { return std::sqrt(x * x + sA * sA); }
    double R2(double x) const {
        double v = y(x);
        return std::sqrt(v * v + sB * sB);
    }
    double dR1(double x) const {
        double r = R1(x);
        return r > 0.0 ? x / r : 1.0;
    }
    double dR2(double x) const {
        double r = R2(x);
        return beta * (r > 0.0 ? y(x) / r : 1.0);
    }
    double D(double x) const { return R1(x) - R2(x); }
    double S(double x) const { return R1(x) + R2(x); }
    double dD(double x) const { return dR1(x) - dR2(x); }
    double dS(double x) const { return dR1(x) + dR2(x); }
    // Squaring R1 = +-rho +- R2 twice leaves one quadratic in x whose roots contain every solution of
    // D = +-rho and S = rho. Returns the number of real roots; used as Newton starting points.
    int level_roots(double rho, double out[2]) const {
        const double l1 = -2.0 * beta * tau, l0 = sA * sA - tau * tau - sB * sB - rho * rho, r2 = rho * rho;
        const double qa = l1 * l1 - 4.0 * r2;
        const double qb = 2.0 * (l0 * l1 - 4.0 * r2 * beta * tau);
        const double qc = l0 * l0 - 4.0 * r2 * (tau * tau + sB * sB);
        if (qa == 0.0) {
            if (qb == 0.0) return 0;
            out[0] = -qc / qb;
            return 1;
        }
        const double disc = qb * qb - 4.0 * qa * qc;
        if (disc < 0.0) return 0;
        const double q = -0.5 * (qb + std::copysign(std::sqrt(disc), qb));
        if (q == 0.0) {
            out[0] = 0.0;
            return 1;
        }
        out[0] = q / qa;
        out[1] = qc / q;
        return 2;
    }
    // |D| is monotone increasing on the cross domain; D itself on the self domain.
    double absD(double x) const { return std::abs(D(x)); }
    double dabsD(double x) const { return D(x) >= 0.0 ? dD(x) : -dD(x); }
};

// Root of f(x) = target for monotone f on [a, b], given f(a) and f(b) straddle target.
template <class F, class DF>
double solve_monotone(const F& f, const DF& df, double target, double a, double b,
                      double guess = std::numeric_limits<double>::quiet_NaN()) {
    double fa = f(a) - target, fb = f(b) - target;
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    const bool inc = fb > fa;
    double x = guess > a && guess < b ? guess : a + (b - a) * (fa / (fa - fb));
    if (!(x > a && x < b)) x = 0.5 * (a + b);
    for (int it = 0; it < 100; ++it) {
        double fx = f(x) - target;
        if (fx == 0.0) return x;
        if ((fx < 0.0) == inc) a = x; else b = x;
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) break;
        double d = df(x);
        double xn = d != 0.0 ? x - fx / d : 0.5 * (a + b);
        if (!(xn > a && xn < b)) xn = 0.5 * (a + b);
        if (std::abs(xn - x) <= 2.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
            x = xn;
            break;
        }
        x = xn;
    }
    return x;
}

struct Span {
    double a = 0.0, b = 0.0;
};

// One tau-slice: P on [lo, hi] as exact piecewise polynomials with a cumulative table.
template <class T>
struct Row {
    Geometry geo;
    Kind kind = Kind::self;
    bool empty = true;
    double lo = 0.0, hi = 0.0;
    double xmin = 0.0;  // argmin of S on [lo, hi] (self kind)
    std::vector<double> xs;
    std::vector<std::array<T, 5>> p;
    std::vector<T> cum;

    std::size_t piece_of(double x) const {
        auto it = std::upper_bound(xs.begin(), xs.end(), x);
        std::size_t i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
        return std::min(i, p.size() - 1);
    }

    static T poly_value(const std::array<T, 5>& c, double t) {
        return c[0] + t * (c[1] + t * (c[2] + t * (c[3] + t * c[4])));
    }
    static T poly_integral(const std::array<T, 5>& c, double t) {
        return t * (c[0] + t * (c[1] / 2.0 + t * (c[2] / 3.0 + t * (c[3] / 4.0 + t * c[4] / 5.0))));
    }

    T cum_at(double x) const {
        if (empty || x <= lo) return T{};
        if (x >= hi) return cum.back();
        std::size_t i = piece_of(x);
        return cum[i] + poly_integral(p[i], x - xs[i]);
    }
    T integral(double a, double b) const {
        if (b <= a) return T{};
        return cum_at(b) - cum_at(a);
    }
    T total() const { return empty ? T{} : cum.back(); }

    // One-sided values of P (zero outside [lo, hi]).
    T value_right(double x) const {
        if (empty || x < lo || x >= hi) return T{};
        std::size_t i = piece_of(x);
        return poly_value(p[i], x - xs[i]);
    }
    T value_left(double x) const {
        if (empty || x <= lo || x > hi) return T{};
        auto it = std::lower_bound(xs.begin(), xs.end(), x);
        std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
        i = std::min(i, p.size() - 1);
        return poly_value(p[i], x - xs[i]);
    }
};

namespace detail {

inline void push_scale_points(std::vector<double>& out, double s, double lo, double hi,
                              double offset, int sign) {
    if (!(s > 0.0)) return;
    static constexpr double mult[] = {0.125, 0.25, 0.5, 1.0, 2.0, 4.0};
    for (double m : mult) {
        double x = offset + sign * m * s;
        if (x > lo && x < hi) out.push_back(x);
    }
}

template <class T>
std::array<T, 3> local_coeffs(const PiecewisePoly<T>& q, std::size_t cell, double t0, double scale) {
    const auto& c = q.c[cell];
    // q(knot + t0 + scale * t) expanded in t.
    return {c[0] + t0 * (c[1] + t0 * c[2]), scale * (c[1] + 2.0 * t0 * c[2]), scale * scale * c[2]};
}

}  // namespace detail

template <class T>
Row<T> build_row(const Source<T>& src, double tau) {
    Row<T> row;
    row.kind = src.kind;
    row.geo = Geometry{tau, src.sA, src.sB, src.beta()};
    if (src.empty()) return row;
    const int beta = src.beta();
    double lo, hi;
    if (src.kind == Kind::self) {
        lo = std::max({src.A.lo(), tau - src.B.hi(), 0.0});
        hi = std::min({src.A.hi(), tau - src.B.lo(), tau});
    } else {
        lo = std::max({src.A.lo(), src.B.lo() - tau, 0.0});
        hi = std::min(src.A.hi(), src.B.hi() - tau);
    }
    if (!(hi > lo)) return row;
    row.lo = lo;
    row.hi = hi;

    std::vector<double> bp;
    bp.reserve(src.A.knots.size() + src.B.knots.size() + 16);
    bp.push_back(lo);
    bp.push_back(hi);
    for (double k : src.A.knots)
        if (k > lo && k < hi) bp.push_back(k);
    for (double k : src.B.knots) {
        double x = beta == -1 ? tau - k : k - tau;
        if (x > lo && x < hi) bp.push_back(x);
    }
    detail::push_scale_points(bp, src.sA, lo, hi, 0.0, 1);
    if (beta == -1) detail::push_scale_points(bp, src.sB, lo, hi, tau, -1);
    else detail::push_scale_points(bp, src.sB, lo, hi, -tau, 1);
    std::sort(bp.begin(), bp.end());
    const double merge = 1e-13 * std::max(1.0, std::abs(hi));
    row.xs.reserve(bp.size());
    for (double x : bp) {
        if (row.xs.empty() || x - row.xs.back() > merge) row.xs.push_back(x);
        else if (x == hi) row.xs.back() = hi;
    }
    if (row.xs.back() != hi) row.xs.push_back(hi);
    if (row.xs.front() != lo) row.xs.front() = lo;

    const std::size_t n = row.xs.size() - 1;
    row.p.resize(n);
    row.cum.resize(n + 1);
    row.cum[0] = T{};
    for (std::size_t i = 0; i < n; ++i) {
        const double a = row.xs[i], b = row.xs[i + 1], mid = 0.5 * (a + b);
        std::size_t ca = src.A.cell_of(mid);
        auto pa = detail::local_coeffs(src.A, ca, a - src.A.knots[ca], 1.0);
        double ymid = tau + beta * mid, ya = tau + beta * a;
        std::size_t cb = src.B.cell_of(ymid);
        auto pb = detail::local_coeffs(src.B, cb, ya - src.B.knots[cb], static_cast<double>(beta));
        std::array<T, 5> c{};
        for (int u = 0; u < 3; ++u)
            for (int v = 0; v < 3; ++v) c[u + v] += pa[u] * pb[v];
        row.p[i] = c;
        row.cum[i + 1] = row.cum[i] + Row<T>::poly_integral(c, b - a);
    }
    row.empty = false;

    if (src.kind == Kind::self) {
        const Geometry& g = row.geo;
        auto dS = [&](double x) { return g.dS(x); };
        double dl = dS(lo), dh = dS(hi);
        if (dl >= 0.0) row.xmin = lo;
        else if (dh <= 0.0) row.xmin = hi;
        else if (src.sA == src.sB && std::abs(0.5 * tau - 0.5 * (lo + hi)) < 1e-15 * (1.0 + tau)) row.xmin = 0.5 * tau;
        else {
            auto d2 = [&](double x) {
                double r1 = g.R1(x), r2 = g.R2(x);
                return (src.sA * src.sA) / (r1 * r1 * r1) + (src.sB * src.sB) / (r2 * r2 * r2);
            };
            row.xmin = solve_monotone(dS, d2, 0.0, lo, hi);
        }
    } else {
        row.xmin = lo;
    }
    return row;
}

// Admissible x-set A(rho, tau) intersected with [lo, hi]; returns the number of spans (0..2).
template <class T>
int admissible(const Row<T>& row, double rho, Span out[2]) {
    if (row.empty) return 0;
    const Geometry& g = row.geo;
    const double lo = row.lo, hi = row.hi;
    auto S = [&](double x) { return g.S(x); };
    auto dS = [&](double x) { return g.dS(x); };
    double roots[2];
    const int nroots = rho > 0.0 ? g.level_roots(rho, roots) : 0;
    // Closest quadratic root inside [a, b] to a solution of f = target.
    auto guess = [&](const auto& f, double target, double a, double b) {
        double best = std::numeric_limits<double>::quiet_NaN(), err = std::numeric_limits<double>::infinity();
        for (int i = 0; i < nroots; ++i) {
            if (!(roots[i] > a && roots[i] < b)) continue;
            double e = std::abs(f(roots[i]) - target);
            if (e < err) {
                err = e;
                best = roots[i];
            }
        }
        return best;
    };
    if (row.kind == Kind::cross) {
        auto aD = [&](double x) { return g.absD(x); };
        auto daD = [&](double x) { return g.dabsD(x); };
        double xb;
        if (aD(hi) <= rho) xb = hi;
        else if (aD(lo) > rho) return 0;
        else xb = solve_monotone(aD, daD, rho, lo, hi, guess(aD, rho, lo, hi));
        double xa;
        if (S(lo) >= rho) xa = lo;
        else if (S(hi) < rho) return 0;
        else xa = solve_monotone(S, dS, rho, lo, hi, guess(S, rho, lo, hi));
        if (!(xb > xa)) return 0;
        out[0] = {xa, xb};
        return 1;
    }
    auto D = [&](double x) { return g.D(x); };
    auto dD = [&](double x) { return g.dD(x); };
    double xa, xb;
    if (D(lo) >= -rho) xa = lo;
    else if (D(hi) < -rho) return 0;
    else xa = solve_monotone(D, dD, -rho, lo, hi, guess(D, -rho, lo, hi));
    if (D(hi) <= rho) xb = hi;
    else if (D(lo) > rho) return 0;
    else xb = solve_monotone(D, dD, rho, lo, hi, guess(D, rho, lo, hi));
    if (!(xb > xa)) return 0;
    double xm = std::clamp(row.xmin, xa, xb);
    if (S(xm) >= rho) {
        out[0] = {xa, xb};
        return 1;
    }
    int n = 0;
    if (S(xa) > rho) out[n++] = {xa, solve_monotone(S, dS, rho, xa, xm, guess(S, rho, xa, xm))};
    if (S(xb) > rho) out[n++] = {solve_monotone(S, dS, rho, xm, xb, guess(S, rho, xm, xb)), xb};
    return n;
}

// g(rho, tau) = integral of P over A(rho, tau).
template <class T>
T slice_mass(const Row<T>& row, double rho) {
    Span sp[2];
    int n = admissible(row, rho, sp);
    T acc{};
    for (int i = 0; i < n; ++i) acc += row.integral(sp[i].a, sp[i].b);
    return acc;
}

// h(rho, tau) including the rho = 0 limit. Returns +inf on the singular ray of the cross kind.
template <class T>
T field_value(const Row<T>& row, double rho) {
    if (row.empty) return T{};
    if (rho > 0.0) return (two_pi / rho) * slice_mass(row, rho);
    const Geometry& g = row.geo;
    if (row.kind == Kind::cross) {
        if (g.tau != 0.0) return T{};
        T v = row.value_right(row.lo);
        if (v == T{}) return T{};
        return T{std::numeric_limits<double>::infinity()};
    }
    auto D = [&](double x) { return g.D(x); };
    auto dD = [&](double x) { return g.dD(x); };
    if (D(row.lo) > 0.0 || D(row.hi) < 0.0) return T{};
    double xc = solve_monotone(D, dD, 0.0, row.lo, row.hi);
    double d = dD(xc);
    if (!(d > 0.0)) return T{std::numeric_limits<double>::infinity()};
    return (two_pi / d) * (row.value_left(xc) + row.value_right(xc));
}

// Split points in rho between which g(., tau) is smooth. smin receives the value of S at its
// minimiser, where the admissible set changes like a square root.
template <class T>
void append_rho_splits(const Row<T>& row, std::vector<double>& out, std::vector<double>& smins) {
    if (row.empty) return;
    const Geometry& g = row.geo;
    for (double x : row.xs) {
        out.push_back(g.absD(x));
        out.push_back(g.S(x));
    }
    double sm = g.S(row.xmin);
    out.push_back(sm);
    smins.push_back(sm);
    out.push_back(0.0);
}

inline void sort_unique(std::vector<double>& v, double tol) {
    std::sort(v.begin(), v.end());
    std::vector<double> w;
    w.reserve(v.size());
    for (double x : v)
        if (w.empty() || x - w.back() > tol * std::max(1.0, std::abs(x))) w.push_back(x);
    v.swap(w);
}

// Integral over rho >= 0 of phi(rho, g_a(rho), g_b(rho)) for one or two rows.
template <class T, class Phi>
double rho_integral_pair(const Row<T>* ra, const Row<T>* rb, const Phi& phi, int order) {
    std::vector<double> splits, smins;
    if (ra) append_rho_splits(*ra, splits, smins);
    if (rb) append_rho_splits(*rb, splits, smins);
    if (splits.empty()) return 0.0;
    sort_unique(splits, 1e-14);
    sort_unique(smins, 1e-14);
    const GLRule& gl = gauss_legendre(order);
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < splits.size(); ++k) {
        const double a = splits[k], b = splits[k + 1], w = b - a;
        if (!(w > 0.0)) continue;
        // Above a minimum of S the inverse S^{-1} has a square-root branch point at that minimum, so
        // every such piece is integrated in v = sqrt(rho - smin), where the roots are analytic.
        auto it = std::upper_bound(smins.begin(), smins.end(), a + 1e-13 * std::max(1.0, a));
        const bool use_v = it != smins.begin();
        const double m = use_v ? std::min(*std::prev(it), a) : 0.0;
        const double va = use_v ? std::sqrt(a - m) : 0.0, vb = use_v ? std::sqrt(b - m) : 0.0;
        double acc = 0.0;
        for (std::size_t q = 0; q < gl.x.size(); ++q) {
            double t = gl.x[q], rho, jac;
            if (use_v) {
                double v = va + (vb - va) * t;
                rho = m + v * v;
                jac = 2.0 * v * (vb - va);
            } else {
                rho = a + w * t;
                jac = w;
            }
            T ga = ra ? slice_mass(*ra, rho) : T{};
            T gb = rb ? slice_mass(*rb, rho) : T{};
            acc += gl.w[q] * jac * phi(rho, ga, gb);
        }
        total += acc;
    }
    return total;
}

// Symmetric self rows (A = B, equal masses): the admissible set is symmetric about tau/2, so the
// rho-integral is parametrised by the right endpoint z without root finding:
//   region 1: rho = D(z), g = I(z) = int_{tau-z}^{z} P;  region 3: rho = S(z), g = g_full - I(z);
//   in between g = g_full.
template <class T, class Phi>
double rho_integral_symmetric(const Row<T>& row, const Phi& phi, int order) {
    if (row.empty) return 0.0;
    const Geometry& g = row.geo;
    const double tau = g.tau, half = 0.5 * tau, hi = row.hi;
    const T full = row.total();
    const GLRule& gl = gauss_legendre(order);
    double total = 0.0;
    auto it = std::upper_bound(row.xs.begin(), row.xs.end(), half);
    double a = half;
    auto inner = [&](double z) { return row.integral(std::max(row.lo, tau - z), std::min(hi, z)); };
    for (;; ++it) {
        double b = it == row.xs.end() ? hi : *it;
        b = std::min(b, hi);
        if (b > a) {
            const double w = b - a;
            double acc = 0.0;
            for (std::size_t q = 0; q < gl.x.size(); ++q) {
                double z = a + w * gl.x[q];
                T Iz = inner(z);
                acc += gl.w[q] * (phi(g.D(z), Iz) * g.dD(z) + phi(g.S(z), full - Iz) * g.dS(z));
            }
            total += w * acc;
        }
        if (it == row.xs.end() || b >= hi) break;
        a = b;
    }
    const double r0 = g.D(hi), r1 = g.S(half);
    if (r1 > r0) {
        const double w = r1 - r0;
        double acc = 0.0;
        for (std::size_t q = 0; q < gl.x.size(); ++q) acc += gl.w[q] * phi(r0 + w * gl.x[q], full);
        total += w * acc;
    }
    return total;
}

// Base tau panels: kinks of the row functional (sums or differences of chart knots), refined to a
// maximum width.
template <class T>
std::vector<double> tau_breaks(const Source<T>& a, const Source<T>* b = nullptr, double max_width = 0.5) {
    std::vector<double> pts;
    double min_cell = std::numeric_limits<double>::infinity();
    auto add_source = [&](const Source<T>& src) {
        if (src.empty()) return;
        const auto& ka = src.A.knots;
        const auto& kb = src.B.knots;
        for (std::size_t i = 0; i + 1 < ka.size(); ++i) min_cell = std::min(min_cell, ka[i + 1] - ka[i]);
        for (std::size_t i = 0; i + 1 < kb.size(); ++i) min_cell = std::min(min_cell, kb[i + 1] - kb[i]);
        const double sign = src.kind == Kind::self ? 1.0 : -1.0;
        pts.push_back(src.tau_lo());
        pts.push_back(src.tau_hi());
        if (ka.size() * kb.size() <= 40000) {
            for (double x : ka)
                for (double y : kb) pts.push_back(y + sign * x);
        } else {
            for (double x : ka) {
                pts.push_back(kb.front() + sign * x);
                pts.push_back(kb.back() + sign * x);
            }
            for (double y : kb) {
                pts.push_back(y + sign * ka.front());
                pts.push_back(y + sign * ka.back());
            }
            // Uniform fill at the finest cell width; aligned with all sums for uniform grids.
            const double lo = src.tau_lo(), hi = src.tau_hi();
            const std::size_t n = static_cast<std::size_t>(std::ceil((hi - lo) / min_cell - 1e-9));
            for (std::size_t k = 1; k < n; ++k) pts.push_back(lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n));
        }
        double s = std::max(src.sA, src.sB);
        if (s > 0.0 && src.kind == Kind::self)
            for (double m : {0.125, 0.25, 0.5, 1.0, 2.0, 4.0}) pts.push_back(src.tau_lo() + m * s);
        if (src.kind == Kind::cross) pts.push_back(0.0);
    };
    add_source(a);
    if (b) add_source(*b);
    if (pts.empty()) return pts;
    double lo = *std::min_element(pts.begin(), pts.end());
    double hi = *std::max_element(pts.begin(), pts.end());
    double tlo = a.empty() ? (b ? b->tau_lo() : lo) : a.tau_lo();
    double thi = a.empty() ? (b ? b->tau_hi() : hi) : a.tau_hi();
    if (b && !b->empty()) {
        tlo = a.empty() ? b->tau_lo() : std::min(tlo, b->tau_lo());
        thi = a.empty() ? b->tau_hi() : std::max(thi, b->tau_hi());
    }
    std::erase_if(pts, [&](double x) { return x < tlo || x > thi; });
    sort_unique(pts, 1e-13);
    std::vector<double> out;
    out.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) {
            double w = pts[i] - pts[i - 1];
            int m = static_cast<int>(std::ceil(w / max_width - 1e-12));
            for (int k = 1; k < m; ++k) out.push_back(pts[i - 1] + w * k / m);
        }
        out.push_back(pts[i]);
    }
    return out;
}

}  // namespace hyperext::slice
