#include "hyperext/comparison.hpp"

#include <algorithm>
#include <array>
#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "hyperext/closed_forms.hpp"
#include "hyperext/common.hpp"

namespace hyperext {

namespace {

constexpr long double pi_l = 3.141592653589793238462643383279502884L;

struct RuleLD {
    std::vector<long double> x, w;  // on [0, 1]
};

template <unsigned N>
RuleLD make_rule() {
    using G = boost::math::quadrature::gauss<long double, N>;
    RuleLD r;
    const auto& ab = G::abscissa();
    const auto& wt = G::weights();
    for (std::size_t i = 0; i < ab.size(); ++i) {
        const long double x = ab[i], w = wt[i];
        if (x == 0.0L) {
            r.x.push_back(0.5L);
            r.w.push_back(0.5L * w);
        } else {
            r.x.push_back(0.5L * (1.0L - x));
            r.w.push_back(0.5L * w);
            r.x.push_back(0.5L * (1.0L + x));
            r.w.push_back(0.5L * w);
        }
    }
    return r;
}

const RuleLD& rule30() {
    static const RuleLD r = make_rule<30>();
    return r;
}
const RuleLD& rule20() {
    static const RuleLD r = make_rule<20>();
    return r;
}

// Laplace tail of coef (1 + x)^n beyond X.
double tail_majorant(long double decay, long double X, int n, long double coef) {
    long double acc = 0.0L, fall = 1.0L;
    for (int j = 0; j <= n; ++j) {
        acc += fall * std::pow(1.0L + X, static_cast<long double>(n - j)) / std::pow(decay, static_cast<long double>(j + 1));
        fall *= static_cast<long double>(n - j);
    }
    return static_cast<double>(coef * std::exp(-decay * X) * acc);
}

// log(u + sqrt(u^2 + c^2)) without cancellation for small u / c.
long double log_hyp(long double u, long double c) { return std::log(c) + std::asinh(u / c); }

}  // namespace

LaplaceResult laplace_integral(const std::function<long double(long double)>& F, long double decay,
                               long double scale, int degree, long double coef) {
    require(decay > 0.0L && scale > 0.0L, "laplace_integral needs positive decay and scale");
    const long double X = 80.0L / decay;
    std::vector<long double> bp{0.0L};
    for (long double x = scale * std::ldexp(1.0L, -12); x < X; x *= 2.0L) bp.push_back(x);
    for (long double m : {0.5L, 1.0L, 2.0L, 4.0L, 8.0L, 12.0L, 16.0L, 20.0L, 30.0L, 40.0L, 60.0L})
        if (m / decay < X) bp.push_back(m / decay);
    bp.push_back(X);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    const RuleLD& hi = rule30();
    const RuleLD& lo = rule20();
    long double v30 = 0.0L, v20 = 0.0L;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        const long double a = bp[i], w = bp[i + 1] - bp[i];
        long double s = 0.0L;
        for (std::size_t q = 0; q < hi.x.size(); ++q) {
            const long double x = a + w * hi.x[q];
            s += hi.w[q] * std::exp(-decay * x) * F(x);
        }
        v30 += w * s;
        s = 0.0L;
        for (std::size_t q = 0; q < lo.x.size(); ++q) {
            const long double x = a + w * lo.x[q];
            s += lo.w[q] * std::exp(-decay * x) * F(x);
        }
        v20 += w * s;
    }
    LaplaceResult r;
    r.value = v30;
    r.tail_bound = tail_majorant(decay, X, degree, coef);
    r.error = static_cast<double>(std::abs(v30 - v20)) + r.tail_bound;
    return r;
}

long double trial_numerator_density(long double t) {
    const long double t2 = t * t;
    return t2 * std::sqrt(t2 + 4.0L) - (2.0L / 3.0L) * (t2 + 4.0L) * std::sqrt(t2 + 1.0L) + 8.0L / 3.0L +
           2.0L * t * std::asinh(t);
}

namespace {

LaplaceResult numerator_integral(long double a) {
    return laplace_integral(trial_numerator_density, a, 1.0L, 3, 5.0L);
}
LaplaceResult mass_integral(long double a) {
    return laplace_integral([](long double t) { return std::sqrt(t * t + 1.0L); }, a, 1.0L, 1, 1.0L);
}

// Second, independent rule: adaptive Gauss-Kronrod up to 20/a and exp-sinh beyond.
double second_rule(const std::function<double(double)>& F, double a) {
    auto g = [&](double t) {
        const double e = std::exp(-a * t);
        return e == 0.0 ? 0.0 : e * F(t);
    };
    const double split = 20.0 / a;
    double e1 = 0.0;
    const double head = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, 0.0, split, 30, 1e-13, &e1);
    boost::math::quadrature::exp_sinh<double> es;
    const double tail = es.integrate(g, split, std::numeric_limits<double>::infinity());
    return head + tail;
}

}  // namespace

IntegralValue I_of_a(double a) {
    require(a > 0.0 && std::isfinite(a), "I(a) needs a > 0");
    IntegralValue r;
    const LaplaceResult L = numerator_integral(a);
    r.value = static_cast<double>(16.0L * pi_l * pi_l * pi_l * L.value);
    r.rel_error = L.error / static_cast<double>(std::abs(L.value));
    r.second_rule = 16.0 * pi * pi * pi *
                    second_rule([](double t) { return static_cast<double>(trial_numerator_density(t)); }, a);
    r.converged = r.rel_error <= 1e-10;
    return r;
}

IntegralValue II_of_a(double a) {
    require(a > 0.0 && std::isfinite(a), "II(a) needs a > 0");
    IntegralValue r;
    const LaplaceResult L = mass_integral(a);
    r.value = static_cast<double>(16.0L * pi_l * pi_l * L.value * L.value);
    r.rel_error = 2.0 * L.error / static_cast<double>(L.value);
    const double k = second_rule([](double t) { return std::sqrt(t * t + 1.0); }, a);
    r.second_rule = 16.0 * pi * pi * k * k;
    r.converged = r.rel_error <= 1e-10;
    return r;
}

long double trial_ratio(long double a) {
    const long double n = numerator_integral(a).value;
    const long double k = mass_integral(a).value;
    return pi_l * n / (k * k);
}

long double rescaled_ratio(long double a) { return trial_ratio(std::cbrt(a)); }

std::vector<RatioSample> ratio_scan(double a_min, double a_max, int steps) {
    require(a_min > 0.0 && a_max > a_min, "ratio scan needs 0 < a_min < a_max");
    require(steps >= 2, "ratio scan needs at least two steps");
    std::vector<RatioSample> out(static_cast<std::size_t>(steps));
    parallel_for(out.size(), [&](std::size_t i) {
        const double a = i + 1 == out.size() ? a_max : a_min + (a_max - a_min) * static_cast<double>(i) / (steps - 1);
        const IntegralValue I = I_of_a(a), II = II_of_a(a);
        out[i] = {a, I.value, II.value, static_cast<double>(trial_ratio(a)), I.rel_error, II.rel_error};
    });
    return out;
}

namespace {

// Least squares by Householder QR; returns the coefficient vector.
std::vector<long double> least_squares(std::vector<std::vector<long double>> A, std::vector<long double> y) {
    const std::size_t m = A.size(), n = A.front().size();
    for (std::size_t k = 0; k < n; ++k) {
        long double norm = 0.0L;
        for (std::size_t i = k; i < m; ++i) norm += A[i][k] * A[i][k];
        norm = std::sqrt(norm);
        if (norm == 0.0L) continue;
        const long double alpha = A[k][k] > 0.0L ? -norm : norm;
        std::vector<long double> v(m, 0.0L);
        for (std::size_t i = k; i < m; ++i) v[i] = A[i][k];
        v[k] -= alpha;
        long double vv = 0.0L;
        for (std::size_t i = k; i < m; ++i) vv += v[i] * v[i];
        if (vv == 0.0L) continue;
        for (std::size_t j = k; j < n; ++j) {
            long double d = 0.0L;
            for (std::size_t i = k; i < m; ++i) d += v[i] * A[i][j];
            d = 2.0L * d / vv;
            for (std::size_t i = k; i < m; ++i) A[i][j] -= d * v[i];
        }
        long double d = 0.0L;
        for (std::size_t i = k; i < m; ++i) d += v[i] * y[i];
        d = 2.0L * d / vv;
        for (std::size_t i = k; i < m; ++i) y[i] -= d * v[i];
    }
    std::vector<long double> c(n, 0.0L);
    for (std::size_t k = n; k-- > 0;) {
        long double s = y[k];
        for (std::size_t j = k + 1; j < n; ++j) s -= A[k][j] * c[j];
        c[k] = A[k][k] != 0.0L ? s / A[k][k] : 0.0L;
    }
    return c;
}

// Basis {1, b^(3-n)} + b^(4-n) {log^2(1/b), log(1/b), 1} for the n-th b-derivative of I/II.
std::vector<long double> basis_row(long double b, int n) {
    const long double L = -std::log(b);
    const long double lead = std::pow(b, static_cast<long double>(3 - n));
    const long double next = std::pow(b, static_cast<long double>(4 - n));
    std::vector<long double> row{1.0L};
    if (n < 3) row.push_back(lead);
    row.push_back(next * L * L);
    row.push_back(next * L);
    row.push_back(next);
    return row;
}

struct FitResult {
    long double constant = 0.0L;
    long double spread = 0.0L;
};

FitResult fit_constant(const std::vector<long double>& b, const std::vector<long double>& v, int n) {
    auto solve = [&](std::size_t skip) {
        std::vector<std::vector<long double>> A;
        std::vector<long double> y;
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (i == skip) continue;
            A.push_back(basis_row(b[i], n));
            y.push_back(v[i]);
        }
        return least_squares(A, y)[0];
    };
    FitResult r;
    r.constant = solve(b.size());
    const std::size_t params = basis_row(b.front(), n).size();
    if (b.size() > params)
        for (std::size_t i = 0; i < b.size(); ++i) r.spread = std::max(r.spread, std::abs(solve(i) - r.constant));
    return r;
}

// Central difference of order `order` (0..3) of f at x with step h, Richardson-extrapolated over h, h/2, h/4.
template <class F>
long double richardson(const F& f, long double x, long double h, int order) {
    auto stencil = [&](long double s) -> long double {
        switch (order) {
            case 0: return f(x);
            case 1: return (f(x + s) - f(x - s)) / (2.0L * s);
            case 2: return (f(x + s) - 2.0L * f(x) + f(x - s)) / (s * s);
            default: return (f(x + 2.0L * s) - 2.0L * f(x + s) + 2.0L * f(x - s) - f(x - 2.0L * s)) / (2.0L * s * s * s);
        }
    };
    if (order == 0) return f(x);
    const long double d0 = stencil(h), d1 = stencil(h / 2.0L), d2 = stencil(h / 4.0L);
    const long double r0 = (4.0L * d1 - d0) / 3.0L, r1 = (4.0L * d2 - d1) / 3.0L;
    return (16.0L * r1 - r0) / 15.0L;
}

}  // namespace

std::vector<LimitEstimate> derivative_limits(const DerivativeSchedule& sched) {
    require(sched.b0 > 0.0 && sched.b0 < 1.0 && sched.b_count >= 6, "derivative schedule needs 0 < b0 < 1 and >= 6 points");
    require(sched.a0 > 0.0 && sched.a0 < 1.0 && sched.a_count >= 5, "derivative schedule needs 0 < a0 < 1 and >= 5 points");
    const std::size_t nb = static_cast<std::size_t>(sched.b_count), na = static_cast<std::size_t>(sched.a_count);
    std::vector<long double> bs(nb), as(na), abs_(na);
    std::vector<std::array<long double, 4>> deriv(nb);
    std::vector<long double> nd(na);
    for (std::size_t k = 0; k < nb; ++k) bs[k] = std::ldexp(static_cast<long double>(sched.b0), -static_cast<int>(k));
    for (std::size_t k = 0; k < na; ++k) {
        as[k] = static_cast<long double>(sched.a0) * std::pow(10.0L, -static_cast<long double>(k));
        abs_[k] = std::cbrt(as[k]);
    }
    parallel_for(nb * 4 + na, [&](std::size_t job) {
        if (job < nb * 4) {
            const std::size_t k = job / 4;
            const int order = static_cast<int>(job % 4);
            deriv[k][order] = richardson(trial_ratio, bs[k], bs[k] / 8.0L, order);
        } else {
            const std::size_t k = job - nb * 4;
            nd[k] = richardson(rescaled_ratio, as[k], as[k] / 8.0L, 1);
        }
    });

    std::vector<LimitEstimate> out;
    const double targets[4] = {two_pi, 0.0, 0.0, 8.0 * pi};
    const char* names[4] = {"I/II", "d/da I/II", "d2/da2 I/II", "d3/da3 I/II"};
    for (int n = 0; n < 4; ++n) {
        std::vector<long double> v(nb);
        for (std::size_t k = 0; k < nb; ++k) v[k] = deriv[k][n];
        const FitResult f = fit_constant(bs, v, n);
        LimitEstimate e;
        e.name = names[n];
        e.target = targets[n];
        e.estimate = static_cast<double>(f.constant);
        e.error_bar = static_cast<double>(f.spread);
        e.raw = static_cast<double>(v.back());
        e.raw_at = static_cast<double>(bs.back());
        e.relative = n == 0 || n == 3;
        e.tolerance = n == 0 ? 0.02 : n == 3 ? 0.2 : 0.05 * two_pi;
        out.push_back(e);
    }
    {
        const FitResult f = fit_constant(abs_, nd, 3);
        LimitEstimate e;
        e.name = "d/da N/D";
        e.target = 4.0 * pi / 3.0;
        e.estimate = static_cast<double>(f.constant);
        e.error_bar = static_cast<double>(f.spread);
        e.raw = static_cast<double>(nd.front());
        e.raw_at = static_cast<double>(as.front());
        e.relative = true;
        e.tolerance = 0.05;
        out.push_back(e);
    }
    for (auto& e : out) {
        const double scale = e.relative ? std::abs(e.target) : 1.0;
        const double dev = std::abs(e.estimate - e.target) / scale;
        e.stable = e.error_bar / scale <= 0.25 * e.tolerance;
        e.pass = dev <= e.tolerance && std::isfinite(e.estimate);
    }
    return out;
}

namespace {

struct Identity {
    const char* name;
    const char* order;
    std::function<long double(long double u, long double c)> integrand;  // without e^{-u}
    std::function<long double(long double c)> post;                     // applied to the integral
    std::function<long double(long double c)> leading;
    std::function<long double(long double a)> weight;
    int degree;
    long double coef;
};

long double lhs_value(const Identity& id, long double a) {
    const long double c = std::cbrt(a);
    const LaplaceResult r = laplace_integral([&](long double u) { return id.integrand(u, c); }, 1.0L, c, id.degree,
                                             id.coef);
    return id.post(c) * r.value;
}

double growth_slope(const std::vector<AsymptoticPoint>& pts) {
    // Least-squares slope of log|scaled| against log(1/a).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int m = 0;
    for (const auto& p : pts) {
        if (!(std::abs(p.scaled) > 0.0)) continue;
        const double x = -std::log(p.a), y = std::log(std::abs(p.scaled));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 2) return 0.0;
    return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace

std::vector<AsymptoticCheck> asymptotic_integral_suite(const std::vector<double>& a_list_in) {
    std::vector<double> a_list = a_list_in;
    if (a_list.empty())
        for (int k = 3; k <= 12; ++k) a_list.push_back(std::pow(10.0, -k));
    for (double a : a_list) require(a > 0.0 && a < 1.0, "asymptotic suite needs a in (0, 1)");
    std::sort(a_list.begin(), a_list.end(), std::greater<>());

    auto one = [](long double) { return 1.0L; };
    auto zero = [](long double) { return 0.0L; };
    auto inv_c = [](long double c) { return 1.0L / c; };
    auto abs_log = [](long double a) { return std::abs(std::log(a)); };
    auto c_log = [](long double a) { return std::cbrt(a) * std::abs(std::log(a)); };
    const std::vector<Identity> ids = {
        {"asymp_7", "O(log a)", [](long double u, long double c) { return 1.0L / std::sqrt(u * u + c * c); }, one, zero,
         abs_log, 0, 1e6L},
        {"asymp_2", "1/a^(1/3) + O(a^(1/3) log a)",
         [](long double u, long double c) { return std::sqrt(u * u + c * c); }, inv_c, inv_c, c_log, 1, 1.0L},
        {"asymp_6", "2/a^(1/3) + O(a^(1/3))", [](long double u, long double c) { return u * std::sqrt(u * u + c * c); },
         inv_c, [](long double c) { return 2.0L / c; }, [](long double a) { return std::cbrt(a); }, 2, 2.0L},
        {"asymp_1", "1/a^(1/3) + O(a^(1/3) log a)",
         [](long double u, long double c) { return u * u / std::sqrt(u * u + 4.0L * c * c); }, inv_c, inv_c, c_log, 1,
         1.0L},
        {"asymp_3", "1/a^(1/3) + O(a^(1/3) log a)",
         [](long double u, long double c) { return (u * u + 4.0L * c * c) / std::sqrt(u * u + c * c); }, inv_c, inv_c,
         c_log, 1, 5.0L},
        {"asymp_8", "O(a^(2/3) log a)",
         [](long double u, long double c) { return c * c / (u + std::sqrt(u * u + c * c)); }, one, zero,
         [](long double a) { return std::cbrt(a * a) * std::abs(std::log(a)); }, 0, 1.0L},
        {"asymp_4", "O(a^(1/3) log a)",
         [](long double u, long double c) {
             const long double q = std::sqrt(u * u + 4.0L * c * c);
             return c * u / ((u + q) * q);
         },
         one, zero, c_log, 0, 1.0L},
        {"asymp_5", "O(1/a^(1/3))", [](long double u, long double c) { return u * log_hyp(u, c); }, inv_c, zero,
         [](long double a) { return 1.0L / std::cbrt(a); }, 2, 1.0L},
        {"asymp_9", "-1 + o(1)",
         [](long double u, long double c) { return (u - 1.0L) * log_hyp(u, c) - 1.0L; }, inv_c,
         [](long double) { return -1.0L; }, [](long double) { return 1.0L; }, 2, 2.0L},
    };

    std::vector<AsymptoticCheck> out(ids.size() + 2);
    parallel_for(ids.size(), [&](std::size_t k) {
        const Identity& id = ids[k];
        AsymptoticCheck& chk = out[k];
        chk.name = id.name;
        chk.order = id.order;
        for (double a : a_list) {
            const long double c = std::cbrt(static_cast<long double>(a));
            const long double lhs = lhs_value(id, a);
            const long double rem = lhs - id.leading(c);
            chk.points.push_back({a, static_cast<double>(lhs), static_cast<double>(rem),
                                  static_cast<double>(rem / id.weight(a))});
        }
        chk.limit = chk.points.back().scaled;
        if (std::string(id.name) == "asymp_9") {
            // Limit statement: the remainder itself must vanish; checked at the smallest a.
            chk.growth = 0.0;
            chk.pass = std::abs(chk.points.back().remainder) <= 1e-2;
            chk.note = "remainder at smallest a must be <= 1e-2";
        } else {
            chk.growth = growth_slope(chk.points);
            chk.pass = chk.growth <= 0.05;
            for (const auto& p : chk.points) chk.pass = chk.pass && std::isfinite(p.scaled);
            chk.note = "scaled remainder bounded: log-log growth <= 0.05";
        }
    });

    {
        // Integration by parts: int e^{-u} / sqrt(u^2 + c^2) = int e^{-u} log(u + sqrt(u^2 + c^2)) - (1/3) log a.
        AsymptoticCheck& chk = out[ids.size()];
        chk.name = "asymp_7_by_parts";
        chk.order = "exact identity";
        chk.pass = true;
        std::vector<double> pts = a_list;
        pts.insert(pts.begin(), 0.1);
        for (double a : pts) {
            const long double c = std::cbrt(static_cast<long double>(a));
            const long double lhs =
                laplace_integral([&](long double u) { return 1.0L / std::sqrt(u * u + c * c); }, 1.0L, c, 0, 1e6L).value;
            const long double rhs =
                laplace_integral([&](long double u) { return log_hyp(u, c); }, 1.0L, c, 1, 1.0L).value -
                std::log(static_cast<long double>(a)) / 3.0L;
            const double rel = static_cast<double>(std::abs(lhs - rhs) / std::abs(lhs));
            chk.points.push_back({a, static_cast<double>(lhs), static_cast<double>(lhs - rhs), rel});
            chk.pass = chk.pass && rel <= 1e-9;
        }
        chk.limit = chk.points.front().scaled;
        chk.note = "relative difference of the two sides <= 1e-9";
    }
    {
        AsymptoticCheck& chk = out[ids.size() + 1];
        chk.name = "closed_integral";
        chk.order = "= 1";
        boost::math::quadrature::exp_sinh<double> es;
        const double v = es.integrate([](double u) {
                if (u > 1e150) return 0.0;
            const double q = std::sqrt(u * u + 1.0);
            return 1.0 / ((u + q) * q);
        });
        chk.points.push_back({0.0, v, v - 1.0, v - 1.0});
        chk.limit = v;
        chk.pass = std::abs(v - 1.0) <= 1e-10;
        chk.note = "exp-sinh quadrature on [0, inf)";
    }
    return out;
}

double masked_lower_bound(double a) {
    require(a > 0.0, "masked lower bound needs a > 0");
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    auto slice = [](double tau) {
        if (tau <= 0.0) return 0.0;
        const double b1 = std::hypot(tau, 1.0) - 1.0, b2 = std::hypot(tau, 2.0);
        auto inner = [&](double rho) {
            const double h = mu_self_conv_masked({1.0, rho, tau});
            return h * h * 4.0 * pi * rho * rho;
        };
        double e = 0.0;
        return GK::integrate(inner, 0.0, b1, 15, 1e-13, &e) + GK::integrate(inner, b1, b2, 15, 1e-13, &e);
    };
    double e = 0.0;
    return GK::integrate([&](double t) { return std::exp(-a * t) * slice(t); }, 0.0,
                         std::numeric_limits<double>::infinity(), 20, 1e-11, &e);
}

}  // namespace hyperext
