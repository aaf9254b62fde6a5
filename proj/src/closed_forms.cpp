#include "hyperext/closed_forms.hpp"

#include <algorithm>
#include <cmath>

#include "hyperext/common.hpp"

namespace hyperext {

std::string to_string(Branch b) {
    switch (b) {
        case Branch::inner: return "inner";
        case Branch::middle: return "middle";
        case Branch::outer: return "outer";
        case Branch::outside: return "outside";
    }
    return "?";
}

std::string to_string(Regime r) { return r == Regime::small_xi ? "xi<=2s" : "xi>2s"; }

namespace {

// sqrt(1 + 4 s^2 / (tau^2 - rho^2)), clamped at 0 where rounding makes the argument negative.
double root_factor(double s, double rho, double tau) {
    double d = (tau - rho) * (tau + rho);
    return std::sqrt(std::max(0.0, 1.0 + 4.0 * s * s / d));
}

void check_point(const ConvPoint& p) {
    require(p.s >= 0.0 && p.rho >= 0.0 && std::isfinite(p.rho) && std::isfinite(p.tau),
            "convolution point needs s >= 0, rho >= 0 and finite coordinates");
}

}  // namespace

Density mu_self_conv(const ConvPoint& p) {
    check_point(p);
    const double s = p.s, rho = p.rho, tau = p.tau;
    Density d;
    d.tag.regime = rho <= 2.0 * s ? Regime::small_xi : Regime::large_xi;
    if (!(tau > 0.0)) return d;
    const double q = std::hypot(tau, s);
    const double b1 = q - s, b2 = std::hypot(tau, 2.0 * s), b3 = q + s;
    if (rho == 0.0) {
        d.tag.branch = Branch::inner;
        d.value = two_pi * std::sqrt(1.0 + 4.0 * s * s / (tau * tau));
    } else if (rho < b1) {
        d.tag.branch = Branch::inner;
        d.value = two_pi * root_factor(s, rho, tau);
    } else if (rho <= b2) {
        d.tag.branch = Branch::middle;
        d.value = two_pi * tau / rho;
    } else if (rho < b3) {
        d.tag.branch = Branch::outer;
        d.value = std::max(0.0, (two_pi / rho) * (tau - rho * root_factor(s, rho, tau)));
    }
    return d;
}

double mu_self_conv_by_cases(const ConvPoint& p) {
    check_point(p);
    const double s = p.s, rho = p.rho, tau = p.tau;
    if (!(tau > 0.0)) return 0.0;
    if (rho == 0.0) return two_pi * std::sqrt(1.0 + 4.0 * s * s / (tau * tau));
    const double upper = std::sqrt((rho + s) * (rho + s) - s * s);
    double acc = 0.0;
    if (rho <= 2.0 * s) {
        if (tau <= upper) acc += tau;
    } else {
        const double lower = std::sqrt((rho - s) * (rho - s) - s * s);
        const double mid = std::sqrt((rho - 2.0 * s) * (rho + 2.0 * s));
        if (lower <= tau && tau < mid) acc += tau - rho * root_factor(s, rho, tau);
        if (mid <= tau && tau <= upper) acc += tau;
    }
    if (tau > upper) acc += rho * root_factor(s, rho, tau);
    return std::max(0.0, two_pi / rho * acc);
}

double mu_self_conv_masked(const ConvPoint& p) {
    Density d = mu_self_conv(p);
    return d.tag.branch == Branch::outer ? 0.0 : d.value;
}

std::pair<double, double> mu_self_conv_sup(double s, double tau) {
    require(tau > 0.0, "mu_self_conv_sup needs tau > 0");
    require(s >= 0.0, "mass parameter s must be >= 0");
    return {two_pi * std::sqrt(1.0 + 4.0 * s * s / (tau * tau)), two_pi * (1.0 + 2.0 * s / tau)};
}

double mu_self_conv_sup_exact(double s, double tau) {
    require(tau > 0.0, "mu_self_conv_sup needs tau > 0");
    return two_pi * (std::hypot(tau, s) + s) / tau;
}

Density mu_cone_conv(const ConvPoint& p) {
    check_point(p);
    const double s = p.s, rho = p.rho, tau = p.tau;
    Density d;
    d.tag.regime = rho <= 2.0 * s ? Regime::small_xi : Regime::large_xi;
    if (tau < 0.0) return d;
    const double b2 = std::hypot(tau, s), b3 = tau + s;
    if (tau >= s && rho < tau - s) {
        d.tag.branch = Branch::inner;
        d.value = two_pi * (1.0 + s * s / ((tau - rho) * (tau + rho)));
    } else if (rho >= std::abs(tau - s) && rho < b2) {
        d.tag.branch = Branch::middle;
        const double w = tau + rho;
        d.value = rho == 0.0 ? two_pi : two_pi * (w - s) * (w + s) / (2.0 * rho * w);
    } else if (rho >= b2 && rho <= b3 && rho > tau) {
        d.tag.branch = Branch::outer;
        const double e = rho - tau;
        d.value = two_pi * (s - e) * (s + e) / (2.0 * rho * e);
    }
    d.value = std::max(0.0, d.value);
    return d;
}

double mu_cone_conv_breakpoint(double s) { return 0.5 * s * std::sqrt(2.0 * (std::sqrt(5.0) - 1.0)); }

double mu_cone_conv_sup(double s, double tau) {
    require(tau >= 0.0, "mu_cone_conv_sup needs tau >= 0");
    require(s >= 0.0, "mass parameter s must be >= 0");
    if (s == 0.0) return tau > 0.0 ? two_pi : 0.0;
    if (tau <= mu_cone_conv_breakpoint(s)) return two_pi * tau / std::hypot(tau, s);
    if (tau < s) {
        const double x = tau / s;
        return two_pi / (1.0 + std::sqrt((1.0 - x) * (1.0 + x)));
    }
    return two_pi * (1.0 + s / (2.0 * tau - s));
}

double exp_weighted_conv(double a, const ConvPoint& p) {
    require(a >= 0.0, "exp_weighted_conv needs a >= 0");
    const double v = mu_self_conv(p).value;
    return a == 0.0 ? v : std::exp(-0.5 * a * p.tau) * v;
}

bool support_predicate(const ConvPoint& p, SupportKind kind) {
    check_point(p);
    if (p.tau < 0.0) return false;
    if (kind == SupportKind::self) return p.rho <= std::hypot(p.tau, p.s) + p.s;
    if (p.rho > p.tau + p.s) return false;
    return p.tau >= p.s || p.rho >= p.s - p.tau;
}

double sphere_pair_l2(double R, double R2) {
    require(R > 0.0 && R2 > 0.0, "sphere radii must be positive");
    return std::sqrt(32.0 * pi * pi * pi * std::min(R, R2));
}

}  // namespace hyperext
