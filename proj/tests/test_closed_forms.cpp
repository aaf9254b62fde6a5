#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "hyperext/closed_forms.hpp"
#include "hyperext/common.hpp"
#include "hyperext/convolution.hpp"

using namespace hyperext;

namespace {

double rho_scan_max(const std::function<double(double)>& h, double hi, int n) {
    double best = 0.0;
    for (int i = 0; i <= n; ++i) best = std::max(best, h(hi * i / n));
    return best;
}

}  // namespace

TEST_CASE("three-branch form agrees with the case-split derivation") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    int compared = 0;
    for (int k = 0; k < 5000; ++k) {
        const double s = 0.2 + 3.0 * U(rng), tau = s * (0.01 + 8.0 * U(rng));
        const double rho = (std::hypot(tau, s) + s) * 1.1 * U(rng);
        const ConvPoint p{s, rho, tau};
        const double a = mu_self_conv(p).value, b = mu_self_conv_by_cases(p);
        if (a == 0.0 && b == 0.0) continue;
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
        ++compared;
    }
    CHECK(compared > 4000);
}

TEST_CASE("value on the time axis") {
    for (double s : {0.5, 1.0, 2.0})
        for (double tau : {0.1, 1.0, 7.0}) {
            const auto d = mu_self_conv({s, 0.0, tau});
            CHECK(d.value == doctest::Approx(two_pi * std::sqrt(1.0 + 4.0 * s * s / (tau * tau))).epsilon(1e-14));
            CHECK(d.tag.branch == Branch::inner);
        }
}

TEST_CASE("support predicate and vanishing outside the support") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const ConvPoint p{0.5 + U(rng), 6.0 * U(rng), 6.0 * U(rng) - 1.0};
        if (!support_predicate(p, SupportKind::self)) CHECK(mu_self_conv(p).value == 0.0);
        if (!support_predicate(p, SupportKind::cone)) CHECK(mu_cone_conv(p).value == 0.0);
        if (mu_self_conv(p).value > 0.0) CHECK(support_predicate(p, SupportKind::self));
    }
}

TEST_CASE("scaling: mu_s * mu_s (s rho, s tau) = mu * mu (rho, tau)") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 500; ++k) {
        const double rho = 4.0 * U(rng), tau = 0.05 + 4.0 * U(rng);
        const double ref = mu_self_conv({1.0, rho, tau}).value;
        for (double s : {0.5, 2.0, 7.0}) {
            const double v = mu_self_conv({s, s * rho, s * tau}).value;
            CHECK(std::abs(v - ref) <= 1e-10 * std::max(1.0, ref));
        }
    }
}

TEST_CASE("sup bracket over rho for tau in {0.5, 1, 2, 10, 1e6}") {
    for (double tau : {0.5, 1.0, 2.0, 10.0, 1e6}) {
        const auto [lo, hi] = mu_self_conv_sup(1.0, tau);
        const double outer = std::hypot(tau, 1.0) + 1.0;
        const double scan = rho_scan_max([&](double r) { return mu_self_conv({1.0, r, tau}).value; }, outer, 20000);
        CHECK(scan >= lo * (1.0 - 1e-12));
        CHECK(scan <= hi * (1.0 + 1e-12));
        CHECK(mu_self_conv_sup_exact(1.0, tau) >= scan * (1.0 - 1e-12));
        CHECK(mu_self_conv_sup_exact(1.0, tau) == doctest::Approx(scan).epsilon(1e-3));
        if (tau == 1e6) {
            // Relative: the upper end exceeds 2 pi by 4 pi / tau = 1.26e-5 in absolute terms.
            CHECK(std::abs(lo - two_pi) <= 1e-5 * two_pi);
            CHECK(std::abs(hi - two_pi) <= 1e-5 * two_pi);
            CHECK(std::abs(scan - two_pi) <= 1e-5 * two_pi);
        }
    }
}

TEST_CASE("sup of mu * sigma_c is 4 pi") {
    // Not attained: the value 2 pi (1 + s^2 / tau^2) at rho = 0 tends to 4 pi as tau -> s+. The tau grid is
    // uniform plus a geometric cluster above s.
    const double s = 1.0;
    std::vector<double> taus;
    for (int j = 1; j <= 300; ++j) taus.push_back(s * j / 100.0);
    for (int q = 4; q <= 28; ++q) taus.push_back(s * (1.0 + std::pow(10.0, -0.25 * q)));
    double best = 0.0;
    for (double tau : taus) {
        const double m = rho_scan_max([&](double r) { return mu_cone_conv({s, r, tau}).value; }, tau + s, 4000);
        CHECK(m <= 4.0 * pi * (1.0 + 1e-12));
        CHECK(mu_cone_conv_sup(s, tau) <= 4.0 * pi * (1.0 + 1e-12));
        best = std::max(best, m);
    }
    CHECK(best == doctest::Approx(4.0 * pi).epsilon(1e-4));
}

TEST_CASE("mixed sup formula agrees with a scan on both sides of the breakpoints") {
    const double s = 1.3, t0 = mu_cone_conv_breakpoint(s);
    for (double tau : {0.3 * t0, 0.9 * t0, 1.1 * t0, 0.5 * (t0 + s), 1.2 * s, 4.0 * s}) {
        const double scan =
            rho_scan_max([&](double r) { return mu_cone_conv({s, r, tau}).value; }, tau + s, 200000);
        CHECK(mu_cone_conv_sup(s, tau) == doctest::Approx(scan).epsilon(1e-4));
    }
}

TEST_CASE("masked variant is a nonnegative minorant") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (int k = 0; k < 2000; ++k) {
        const ConvPoint p{1.0, 5.0 * U(rng), 4.0 * U(rng)};
        const double m = mu_self_conv_masked(p), f = mu_self_conv(p).value;
        CHECK(m >= 0.0);
        CHECK(m <= f);
    }
}

TEST_CASE("exponential weight factors out of the trial self-convolution") {
    for (double a : {0.05, 0.7, 3.0})
        for (double tau : {0.2, 1.5, 6.0}) {
            const ConvPoint p{1.0, 0.7 * tau, tau};
            CHECK(exp_weighted_conv(a, p) ==
                  doctest::Approx(std::exp(-0.5 * a * tau) * mu_self_conv(p).value).epsilon(1e-14));
        }
}

TEST_CASE("sphere pair L2 norm against the kernel") {
    using boost::math::quadrature::gauss_kronrod;
    for (auto [R, R2] : {std::pair{1.0, 1.0}, std::pair{1.0, 2.5}, std::pair{3.0, 0.4}}) {
        const double lo = std::abs(R - R2), hi = R + R2;
        const double I = gauss_kronrod<double, 61>::integrate(
            [&](double x) {
                const double k = sphere_pair_kernel(R, R2, x);
                return k * k * 4.0 * pi * x * x;
            },
            lo, hi);
        CHECK(std::sqrt(I) == doctest::Approx(sphere_pair_l2(R, R2)).epsilon(1e-12));
    }
}
