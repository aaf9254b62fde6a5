#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "hyperext/closed_forms.hpp"
#include "hyperext/convolution.hpp"

using namespace hyperext;

namespace {

Profile constant_profile(double s, double r_lo, double r_hi, std::size_t n, double value = 1.0) {
    MassParam m(s);
    return Profile::sample_uniform_chart(m, m.psi(r_lo), m.psi(r_hi), n, [value](double) { return value; });
}

double field_at(const Profile& f, const Profile& g, double rho, double tau) {
    auto row = slice::build_row(slice::self_source(f, g), tau);
    return slice::field_value(row, rho);
}

}  // namespace

TEST_CASE("chart maps round trip") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> U(0.0, 50.0);
    for (double s : {0.0, 0.25, 1.0, 3.0}) {
        MassParam m(s);
        for (int k = 0; k < 200; ++k) {
            double r = s + U(rng);
            CHECK(m.phi(m.psi(r)) == doctest::Approx(r).epsilon(1e-15));
        }
        CHECK(m.phi(m.psi(s)) == s);
    }
}

TEST_CASE("sphere pair kernel") {
    CHECK(sphere_pair_kernel(1, 1, 1) == doctest::Approx(two_pi));
    CHECK(sphere_pair_kernel(1, 2, 4) == 0.0);
    CHECK(sphere_pair_kernel(2, 1, 2.5) == sphere_pair_kernel(1, 2, 2.5));
    CHECK_THROWS_AS(sphere_pair_kernel(1, 1, 0.0), DomainError);
    CHECK_THROWS_AS(sphere_pair_kernel(1, 1, -1.0), DomainError);
}

TEST_CASE("engine matches the closed form of mu*mu at an interior point") {
    auto f = constant_profile(1.0, 1.0, 40.0, 400);
    double h = field_at(f, f, 1.3, 2.7);
    double ref = mu_self_conv({1.0, 1.3, 2.7}).value;
    CHECK(h == doctest::Approx(ref).epsilon(1e-12));
}

TEST_CASE("mass of f mu * g mu is the product of the masses") {
    const MassParam m(1.0);
    auto f = Profile::sample_uniform_chart(m, 0.5, 6.0, 80, [](double r) { return std::exp(-0.3 * r) + 0.1 * r; });
    auto g = Profile::sample_uniform_chart(m, 1.0, 4.0, 50, [](double r) { return 1.0 / (1.0 + r * r); });
    const double expect = profile_integral(f) * profile_integral(g);
    CHECK(conv_mass(slice::self_source(f, g)).value == doctest::Approx(expect).epsilon(1e-6));
    CHECK(conv_mass(slice::self_source(f, f)).value ==
          doctest::Approx(profile_integral(f) * profile_integral(f)).epsilon(1e-6));
}

TEST_CASE("mass of the cross product (upper times lower sheet)") {
    const MassParam m(0.5);
    auto fp = Profile::sample_uniform_chart(m, 0.0, 3.0, 40, [](double r) { return 2.0 - 0.3 * r; });
    auto fm = Profile::sample_uniform_chart(m, 0.2, 5.0, 40, [](double r) { return std::exp(-r); });
    const double expect = profile_integral(fp) * profile_integral(fm);
    CHECK(conv_mass(slice::cross_source(fp, fm)).value == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("pointwise Cauchy-Schwarz at every grid node") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (double s : {0.5, 1.0, 2.0}) {
        const MassParam m(s);
        std::vector<double> vals(31);
        for (auto& v : vals) v = U(rng) - 0.3;
        std::size_t k = 0;
        auto f = Profile::sample_uniform_chart(m, 0.0, 6.0 * s, 30, [&](double) { return vals[k++]; });
        auto one = Profile::from_chart(m, {0.0, 6.0 * s}, {1.0, 1.0});
        const auto A = f.abs2_poly();
        auto sq = slice::poly_source(slice::Kind::self, A, s, A, s, true);
        const auto rho = linspace(0.01 * s, 14.0 * s, 60), tau = linspace(0.05 * s, 12.0 * s, 60);
        const Field ff = evaluate_field(slice::self_source(f, f), rho, tau);
        const Field qq = evaluate_field(sq, rho, tau);
        const Field mm = evaluate_field(slice::self_source(one, one), rho, tau);
        for (std::size_t i = 0; i < ff.values.size(); ++i)
            CHECK(ff.values[i] * ff.values[i] <= qq.values[i] * mm.values[i] * (1.0 + 1e-12) + 1e-300);
    }
}

TEST_CASE("step profiles: engine field agrees with a brute-force slice integral") {
    // h(rho, tau) = (2 pi / rho) int F(x) G(tau - x) over the admissible x, computed by dense midpoints.
    const MassParam m(1.0);
    auto f = Profile::from_chart(m, {0.0, 1.0, 2.5, 4.0}, {1.0, 0.5, 2.0, 0.0}, Interp::step);
    const double rho = 2.2, tau = 3.1;
    const double h = field_at(f, f, rho, tau);
    const int n = 400000;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = tau * (i + 0.5) / n;
        const double R1 = m.phi(x), R2 = m.phi(tau - x);
        if (std::abs(R1 - R2) <= rho && rho <= R1 + R2) acc += f.at_chart(x) * f.at_chart(tau - x);
    }
    const double brute = two_pi / rho * acc * tau / n;
    CHECK(h == doctest::Approx(brute).epsilon(2e-5));
}

TEST_CASE("Monte-Carlo sphere pair matches the 2 pi / |x| kernel") {
    const double R = 1.0, R2 = 1.7, rho0 = 1.5, w = 0.6;
    const auto est = mc_sphere_pair(R, R2, rho0, w, 400000, 3);
    double acc = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double x = (rho0 - w) + 2.0 * w * (i + 0.5) / n;
        const double y = (x - rho0) / w;
        acc += sphere_pair_kernel(R, R2, x) * std::exp(-1.0 / (1.0 - y * y)) * 4.0 * pi * x * x;
    }
    acc *= 2.0 * w / n;
    CHECK(std::abs(est.estimate - acc) <= 3.0 * est.std_error);
}

TEST_CASE("field CSV and binary round trips are exact") {
    const MassParam m(1.0);
    auto f = Profile::sample_uniform_chart(m, 0.0, 3.0, 20, [](double r) { return 1.0 / r; });
    const Field h = hyperbolic_conv(f, f, linspace(0.1, 5.0, 7), linspace(0.2, 5.5, 5));
    std::stringstream csv;
    write_field_csv(h, csv);
    const Field c = read_field_csv(csv);
    CHECK(c.rho == h.rho);
    CHECK(c.tau == h.tau);
    CHECK(c.values == h.values);
    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    write_field_binary(h, bin);
    const Field b = read_field_binary(bin);
    CHECK(b.values == h.values);
    std::stringstream bad("XXXX");
    CHECK_THROWS_AS(read_field_binary(bad), DomainError);
}

TEST_CASE("profile constructor preconditions") {
    const MassParam m(1.0);
    CHECK_THROWS_AS(Profile(m, {0.5, 2.0}, {1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(Profile(m, {2.0, 1.5}, {1.0, 1.0}), DomainError);
    CHECK_THROWS_AS(Profile(m, {1.0}, {1.0}), DomainError);
    CHECK_THROWS_AS(MassParam(-1.0), DomainError);
}

TEST_CASE("L2 norm of a step profile is exact") {
    const MassParam m(1.0);
    auto f = Profile::from_chart(m, {0.0, 2.0}, {3.0, 0.0}, Interp::step);
    // 4 pi int_0^2 9 sqrt(u^2 + 1) du
    const double exact = 4.0 * pi * 9.0 * 0.5 * (2.0 * std::sqrt(5.0) + std::asinh(2.0));
    CHECK(std::pow(lp_norm(f, 2.0), 2) == doctest::Approx(exact).epsilon(1e-13));
}
