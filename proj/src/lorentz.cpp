#include "hyperext/lorentz.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "hyperext/common.hpp"
#include "hyperext/quadrature.hpp"

namespace hyperext {

double minkowski_form(const SpaceTimePoint& p, const SpaceTimePoint& q) {
    return p.t * q.t - p.x[0] * q.x[0] - p.x[1] * q.x[1] - p.x[2] * q.x[2];
}

Mat3 rotation_to(const Vec3& axis) {
    const double n = std::sqrt(axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]);
    require(n > 0.0 && std::isfinite(n), "boost axis must be a nonzero finite vector");
    const Vec3 a{axis[0] / n, axis[1] / n, axis[2] / n};
    const double c = a[0];
    Mat3 r{};
    if (c < -1.0 + 1e-15) {
        // Half turn about e3.
        r[0] = {-1.0, 0.0, 0.0};
        r[1] = {0.0, -1.0, 0.0};
        r[2] = {0.0, 0.0, 1.0};
        return r;
    }
    // Rodrigues with v = e1 x a = (0, -a3, a2).
    const double v1 = -a[2], v2 = a[1];
    const Mat3 K{{{0.0, -v2, v1}, {v2, 0.0, 0.0}, {-v1, 0.0, 0.0}}};
    const double k = 1.0 / (1.0 + c);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double kk = 0.0;
            for (int l = 0; l < 3; ++l) kk += K[i][l] * K[l][j];
            r[i][j] = (i == j ? 1.0 : 0.0) + K[i][j] + k * kk;
        }
    return r;
}

Mat4 embed(const Mat3& r) {
    Mat4 m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = r[i][j];
    m[3][3] = 1.0;
    return m;
}

Mat4 multiply(const Mat4& a, const Mat4& b) {
    Mat4 m{};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            for (int l = 0; l < 4; ++l) m[i][j] += a[i][l] * b[l][j];
    return m;
}

double determinant(const Mat4& m) {
    // Gaussian elimination with partial pivoting.
    Mat4 a = m;
    double det = 1.0;
    for (int c = 0; c < 4; ++c) {
        int p = c;
        for (int r = c + 1; r < 4; ++r)
            if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
        if (a[p][c] == 0.0) return 0.0;
        if (p != c) {
            std::swap(a[p], a[c]);
            det = -det;
        }
        det *= a[c][c];
        for (int r = c + 1; r < 4; ++r) {
            const double f = a[r][c] / a[c][c];
            for (int j = c; j < 4; ++j) a[r][j] -= f * a[c][j];
        }
    }
    return det;
}

SpaceTimePoint act(const Mat4& m, const SpaceTimePoint& p) {
    const double v[4] = {p.x[0], p.x[1], p.x[2], p.t};
    double w[4] = {0.0, 0.0, 0.0, 0.0};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) w[i] += m[i][j] * v[j];
    return {{w[0], w[1], w[2]}, w[3]};
}

Mat4 boost_matrix(const BoostParam& bp, bool scaled) {
    require(std::abs(bp.t) < 1.0, "boost parameter must satisfy |t| < 1");
    const double g = 1.0 / std::sqrt((1.0 - bp.t) * (1.0 + bp.t));
    Mat4 l{};
    l[0][0] = g;
    l[0][3] = g * bp.t;
    l[3][0] = g * bp.t;
    l[3][3] = g;
    l[1][1] = l[2][2] = 1.0;
    const Mat3 r = rotation_to(bp.axis);
    Mat3 rt{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) rt[i][j] = r[j][i];
    Mat4 m = multiply(embed(r), multiply(l, embed(rt)));
    if (scaled) {
        const double f = std::sqrt((1.0 - bp.t) * (1.0 + bp.t));
        for (auto& row : m)
            for (double& v : row) v *= f;
    }
    return m;
}

SpaceTimePoint boost(const BoostParam& bp, const SpaceTimePoint& p, bool scaled) {
    return act(boost_matrix(bp, scaled), p);
}

double cap_radial_primitive(double s, double r) {
    const double psi = std::sqrt(std::max(0.0, (r - s) * (r + s)));
    const double log_part = s == 0.0 ? 0.0 : s * s * std::log(r + psi);
    return 0.5 * (log_part + r * psi);
}

double spherical_cap_area(double eps) { return two_pi * (1.0 - std::cos(eps)); }

double cap_measure(const CapSpec& c) {
    require(c.s >= 0.0 && c.a >= c.s && c.b >= c.a && std::isfinite(c.b), "cap needs s <= a <= b < inf");
    require(c.eps >= 0.0 && c.eps <= pi, "cap half-angle must lie in [0, pi]");
    if (c.b == c.a) return 0.0;
    // With s > 0 the log terms are subtracted as one log of a ratio to avoid cancellation.
    const double s = c.s;
    const double pa = std::sqrt((c.a - s) * (c.a + s)), pb = std::sqrt((c.b - s) * (c.b + s));
    const double logs = s == 0.0 ? 0.0 : s * s * std::log((c.b + pb) / (c.a + pa));
    return spherical_cap_area(c.eps) * 0.5 * (logs + c.b * pb - c.a * pa);
}

CapNormalization normalize_cap(const CapSpec& c, int samples) {
    CapNormalization rep;
    const double s = c.s, eps = c.eps;
    auto hyp = [&](const std::string& name, bool ok, double value) {
        rep.hypotheses.push_back({name, ok, value});
        if (!ok && rep.rejected.empty()) rep.rejected = name;
    };
    hyp("s <= 1/2", s <= 0.5, s);
    hyp("radial range [1, 2]", c.a == 1.0 && c.b == 2.0, c.b - c.a);
    hyp("eps in [0, pi/2]", eps >= 0.0 && eps <= 0.5 * pi, eps);
    const double sn = std::sin(eps);
    const double q = s > 0.0 ? sn * sn / (s * s) : std::numeric_limits<double>::infinity();
    hyp("sin^2(eps) / s^2 >= 8", q >= 8.0, q);
    if (!rep.rejected.empty()) return rep;
    rep.accepted = true;

    rep.t = eps <= pi / 3.0 ? std::cos(eps) : 0.0;
    const double t = rep.t, omt = (1.0 - t) * (1.0 + t);
    rep.s_image = s / std::sqrt(omt);
    // Boosts preserve the measure and the scaling by (1 - t^2)^{-1/2} multiplies it by (1 - t^2)^{-1}.
    rep.measure = cap_measure(c) / omt;
    rep.measure_floor = t > 0.0 ? pi / (1.0 + std::cos(eps)) : pi * (1.0 - std::cos(eps));
    rep.measure_ok = rep.measure >= 0.5 * pi && rep.measure >= rep.measure_floor * (1.0 - 1e-14);

    // The cap is rotated onto the e1 axis (rotation-invariant image), then L_t^{-1} = (1-t^2)^{-1/2} L^{-t}.
    const Mat4 inv = boost_matrix({-t, {1.0, 0.0, 0.0}}, false);
    const double f = 1.0 / std::sqrt(omt);
    rep.r_min = std::numeric_limits<double>::infinity();
    rep.r_max = 0.0;
    const int n = std::max(samples, 2);
    for (int i = 0; i < n; ++i) {
        const double r = 1.0 + static_cast<double>(i) / (n - 1);
        for (int j = 0; j < n; ++j) {
            const double ph = eps * static_cast<double>(j) / (n - 1);
            SpaceTimePoint p{{r * std::cos(ph), r * std::sin(ph), 0.0}, std::sqrt((r - s) * (r + s))};
            SpaceTimePoint q = act(inv, p);
            const double xr = f * std::sqrt(q.x[0] * q.x[0] + q.x[1] * q.x[1] + q.x[2] * q.x[2]);
            const double tt = f * q.t;
            rep.r_min = std::min(rep.r_min, xr);
            rep.r_max = std::max(rep.r_max, xr);
            rep.shell_defect =
                std::max(rep.shell_defect, std::abs(tt * tt - xr * xr + rep.s_image * rep.s_image));
        }
    }
    rep.range_ok = rep.r_min >= 7.0 / 16.0 && rep.r_max <= 33.0 / 16.0;
    rep.pass = rep.measure_ok && rep.range_ok && rep.shell_defect <= 1e-10;
    return rep;
}

DyadicCapAsymptotics dyadic_cap_asymptotics(double s, int k, double eps) {
    require(k >= 0, "dyadic index k must be >= 0");
    require(s > 0.0, "dyadic caps need s > 0");
    DyadicCapAsymptotics r;
    const double lo = std::ldexp(s, k), hi = std::ldexp(s, k + 1);
    r.exact = cap_measure({s, lo, hi, {1.0, 0.0, 0.0}, eps});
    r.asymptote = 3.0 * pi * s * s * std::ldexp(1.0, 2 * k) * (1.0 - std::cos(eps));
    r.ratio = r.asymptote > 0.0 ? r.exact / r.asymptote : std::numeric_limits<double>::quiet_NaN();
    const double p = std::ldexp(1.0, k), P = 2.0 * p;
    r.log_term = std::log((P + std::sqrt(P * P - 1.0)) / (p + std::sqrt(p * p - 1.0)));
    return r;
}

BallCertificate bounded_ball_certificate(double s, int k, double eps, int samples) {
    require(s > 0.0 && k >= 0, "bounded-ball certificate needs s > 0 and k >= 0");
    require(eps >= 0.0 && eps <= 0.5 * pi, "bounded-ball certificate needs eps in [0, pi/2]");
    BallCertificate c;
    const double w = std::ldexp(1.0, -2 * (k + 1));
    c.t = std::sqrt(1.0 - w);
    c.measure = cap_measure({s, std::ldexp(s, k), std::ldexp(s, k + 1), {1.0, 0.0, 0.0}, eps});
    const Mat4 inv = boost_matrix({-c.t, {1.0, 0.0, 0.0}}, false);
    const int n = std::max(samples, 2);
    for (int i = 0; i < n; ++i) {
        const double r = std::ldexp(s, k) * (1.0 + static_cast<double>(i) / (n - 1));
        for (int j = 0; j < n; ++j) {
            const double ph = eps * static_cast<double>(j) / (n - 1);
            SpaceTimePoint p{{r * std::cos(ph), r * std::sin(ph), 0.0}, std::sqrt((r - s) * (r + s))};
            SpaceTimePoint q = act(inv, p);
            const double tr = std::hypot(q.x[1], q.x[2]);
            c.max_first = std::max(c.max_first, std::abs(q.x[0]));
            c.max_transverse = std::max(c.max_transverse, tr);
            c.max_radius = std::max(c.max_radius, std::hypot(q.x[0], tr));
        }
    }
    c.first_bound = std::ldexp(s, 2 * (k + 1)) * (1.0 - std::cos(eps)) + 4.0 * s;
    c.transverse_bound = std::ldexp(s, k + 1) * std::sin(eps);
    c.scale = s + c.measure / s + std::sqrt(c.measure);
    c.constant = c.max_radius / c.scale;
    const double slack = 1.0 + 1e-12;
    c.pass = c.max_first <= c.first_bound * slack && c.max_transverse <= c.transverse_bound * slack + 1e-300 &&
             c.constant <= ball_constant;
    return c;
}

namespace {

// Integral over the unit sphere of g(omega) with polar axis e1: Gauss-Legendre panels in cos(theta)
// times the trapezoid rule in the azimuth.
template <class G>
double sphere_integral(const G& g, int panels, int az) {
    const GLRule& gl = gauss_legendre(30);
    const double dphi = two_pi / az;
    double total = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double c0 = -1.0 + 2.0 * p / panels, w = 2.0 / panels;
        for (std::size_t q = 0; q < gl.x.size(); ++q) {
            const double c = c0 + w * gl.x[q], sn = std::sqrt(std::max(0.0, (1.0 - c) * (1.0 + c)));
            double ring = 0.0;
            for (int a = 0; a < az; ++a) {
                const double ph = dphi * a;
                ring += g(Vec3{c, sn * std::cos(ph), sn * std::sin(ph)});
            }
            total += w * gl.w[q] * ring * dphi;
        }
    }
    return total;
}

double sheets_integral(const std::function<double(const SpaceTimePoint&)>& f, double tol, int panels, int az,
                       double* err) {
    auto radial = [&](double u) {
        const double r = std::sqrt(u * u + 1.0);
        double acc = 0.0;
        for (double sheet : {1.0, -1.0}) {
            acc += sphere_integral(
                [&](const Vec3& w) { return f(SpaceTimePoint{{r * w[0], r * w[1], r * w[2]}, sheet * u}); }, panels,
                az);
        }
        return r * acc;
    };
    double e = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        radial, 0.0, std::numeric_limits<double>::infinity(), 15, tol, &e);
    if (err) *err = std::abs(e * v);
    return v;
}

}  // namespace

double hyperboloid_integral(const std::function<double(const SpaceTimePoint&)>& f, const InvarianceOptions& opt,
                            double* error) {
    double e_full = 0.0;
    const double full = sheets_integral(f, opt.rel_tol, opt.polar_panels, opt.azimuth_nodes, &e_full);
    if (error) {
        const double half = sheets_integral(f, opt.rel_tol, std::max(1, opt.polar_panels / 2),
                                            std::max(4, opt.azimuth_nodes / 2), nullptr);
        *error = e_full + std::abs(full - half);
    }
    return full;
}

InvarianceReport lorentz_invariance_check(const std::function<double(const SpaceTimePoint&)>& f, const Mat4& L,
                                          const InvarianceOptions& opt) {
    InvarianceReport rep;
    double el = 0.0, er = 0.0;
    rep.lhs = hyperboloid_integral(f, opt, &el);
    rep.rhs = hyperboloid_integral([&](const SpaceTimePoint& p) { return f(act(L, p)); }, opt, &er);
    const double scale = std::max(std::abs(rep.lhs), std::numeric_limits<double>::min());
    rep.rel_err = std::abs(rep.lhs - rep.rhs) / scale;
    rep.quad_err = (el + er) / scale;
    rep.converged = rep.quad_err <= std::max(1e-6, 10.0 * opt.rel_tol);
    return rep;
}

std::function<double(const SpaceTimePoint&)> gaussian_test(const SpaceTimePoint& center, double width) {
    require(width > 0.0, "test function width must be positive");
    const double k = 1.0 / (width * width);
    return [center, k](const SpaceTimePoint& p) {
        double d = (p.t - center.t) * (p.t - center.t);
        for (int i = 0; i < 3; ++i) d += (p.x[i] - center.x[i]) * (p.x[i] - center.x[i]);
        return std::exp(-k * d);
    };
}

}  // namespace hyperext
