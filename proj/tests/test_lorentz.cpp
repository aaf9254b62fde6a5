#include "doctest.h"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <random>

#include "hyperext/common.hpp"
#include "hyperext/lorentz.hpp"

using namespace hyperext;

namespace {

SpaceTimePoint random_point(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    return {{n(rng), n(rng), n(rng)}, n(rng)};
}

Vec3 random_axis(std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vec3 a{n(rng), n(rng), n(rng)};
    const double l = std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
    for (auto& x : a) x /= l;
    return a;
}

}  // namespace

TEST_CASE("boosts preserve the Minkowski form and have unit determinant") {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> U(-0.95, 0.95);
    for (int k = 0; k < 50; ++k) {
        const BoostParam bp{U(rng), random_axis(rng)};
        const Mat4 L = boost_matrix(bp);
        CHECK(determinant(L) == doctest::Approx(1.0).epsilon(1e-12));
        for (int j = 0; j < 10; ++j) {
            const auto p = random_point(rng), q = random_point(rng);
            const double b = minkowski_form(p, q);
            CHECK(minkowski_form(act(L, p), act(L, q)) == doctest::Approx(b).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("boost along e1 moves the hyperboloid vertex as expected") {
    // L^t e_t = (t, 0, 0, 1) / sqrt(1 - t^2) up to the sign convention of the first coordinate.
    const double t = 0.6;
    const auto q = hyperext::boost({t, {1.0, 0.0, 0.0}}, {{0.0, 0.0, 0.0}, 1.0});
    CHECK(std::abs(q.x[0]) == doctest::Approx(t / std::sqrt(1.0 - t * t)));
    CHECK(q.t == doctest::Approx(1.0 / std::sqrt(1.0 - t * t)));
    CHECK(q.x[1] == doctest::Approx(0.0));
    const auto scaled = hyperext::boost({t, {1.0, 0.0, 0.0}}, {{0.0, 0.0, 0.0}, 1.0}, true);
    CHECK(scaled.t == doctest::Approx(1.0));
}

TEST_CASE("boost along an arbitrary axis moves the vertex along that axis") {
    std::mt19937_64 rng(12);
    for (int k = 0; k < 20; ++k) {
        const Vec3 a = random_axis(rng);
        const auto q = hyperext::boost({0.5, a}, {{0.0, 0.0, 0.0}, 1.0});
        const double len = std::sqrt(q.x[0] * q.x[0] + q.x[1] * q.x[1] + q.x[2] * q.x[2]);
        const double dot = (q.x[0] * a[0] + q.x[1] * a[1] + q.x[2] * a[2]) / len;
        CHECK(std::abs(dot) == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("inverse boost and composition along one axis") {
    std::mt19937_64 rng(3);
    const Vec3 axis = random_axis(rng);
    const Mat4 P = multiply(boost_matrix({0.4, axis}), boost_matrix({-0.4, axis}));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(P[i][j] == doctest::Approx(i == j ? 1.0 : 0.0).scale(1.0).epsilon(1e-14));
    // Rapidities add: tanh(a) + tanh(b) composition.
    const double a = std::atanh(0.3), b = std::atanh(0.5);
    const Mat4 C = multiply(boost_matrix({0.3, axis}), boost_matrix({0.5, axis}));
    const Mat4 D = boost_matrix({std::tanh(a + b), axis});
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(C[i][j] == doctest::Approx(D[i][j]).scale(1.0).epsilon(1e-13));
}

TEST_CASE("rotation_to maps e1 onto the axis") {
    std::mt19937_64 rng(8);
    for (int k = 0; k < 20; ++k) {
        const Vec3 a = random_axis(rng);
        const Mat3 R = rotation_to(a);
        for (int i = 0; i < 3; ++i) CHECK(R[i][0] == doctest::Approx(a[i]).scale(1.0).epsilon(1e-14));
    }
    const Mat3 R = rotation_to({-1.0, 0.0, 0.0});
    CHECK(R[0][0] == doctest::Approx(-1.0));
}

TEST_CASE("boost parameter outside (-1, 1) is rejected") {
    CHECK_THROWS_AS(boost_matrix({1.0, {1.0, 0.0, 0.0}}), DomainError);
    CHECK_THROWS_AS(boost_matrix({-1.5, {1.0, 0.0, 0.0}}), DomainError);
}

TEST_CASE("cap measure against direct quadrature and the rescaling identity") {
    using boost::math::quadrature::gauss_kronrod;
    for (double s : {0.1, 0.5, 1.0, 3.0})
        for (double eps : {0.05, 0.7, 1.5}) {
            const CapSpec c{s, 1.3 * s, 2.9 * s, {0.0, 1.0, 0.0}, eps};
            // d mu = r^2 / psi_s(r) dr dOmega on the upper sheet.
            const double radial = gauss_kronrod<double, 61>::integrate(
                [&](double r) { return r * r / std::sqrt((r - s) * (r + s)); }, c.a, c.b);
            CHECK(cap_measure(c) == doctest::Approx(radial * spherical_cap_area(eps)).epsilon(1e-9));
            for (double t : {0.5, 2.0, 7.0}) {
                const CapSpec ct{t * s, t * c.a, t * c.b, c.axis, eps};
                CHECK(std::abs(cap_measure(ct) - t * t * cap_measure(c)) <= 1e-12 * t * t * cap_measure(c));
            }
        }
    CHECK(spherical_cap_area(pi) == doctest::Approx(4.0 * pi));
}

TEST_CASE("cap normalisation and ball certificates on a 20-case sweep") {
    int accepted = 0;
    for (double s : {0.05, 0.1, 0.2, 0.3, 0.35})
        for (double eps : {1.0, 1.2, 1.4, 1.5}) {
            const auto n = normalize_cap({s, 1.0, 2.0, {1.0, 0.0, 0.0}, eps});
            if (!n.accepted) {
                CHECK(n.rejected == "sin^2(eps) / s^2 >= 8");
                continue;
            }
            ++accepted;
            CHECK(n.pass);
            CHECK(n.shell_defect <= 1e-10);
        }
    CHECK(accepted >= 15);
    int certified = 0;
    for (double s : {0.5, 1.0, 4.0, 10.0})
        for (int k : {0, 2, 5, 8, 12}) {
            const auto bc = bounded_ball_certificate(s, k, 0.3);
            CHECK(bc.pass);
            CHECK(bc.max_first <= bc.first_bound * (1.0 + 1e-12));
            CHECK(bc.max_transverse <= bc.transverse_bound * (1.0 + 1e-12));
            certified += bc.pass;
        }
    CHECK(certified == 20);
}

TEST_CASE("normalisation rejects caps outside the hypotheses") {
    CHECK(normalize_cap({1.0, 1.0, 2.0, {1.0, 0.0, 0.0}, 0.5}).rejected == "s <= 1/2");
    CHECK(normalize_cap({0.1, 1.0, 3.0, {1.0, 0.0, 0.0}, 0.5}).rejected == "radial range [1, 2]");
    CHECK(normalize_cap({0.1, 1.0, 2.0, {1.0, 0.0, 0.0}, 2.0}).rejected == "eps in [0, pi/2]");
    CHECK(!normalize_cap({0.4, 1.0, 2.0, {1.0, 0.0, 0.0}, 0.3}).accepted);
}

TEST_CASE("dyadic cap measure approaches its asymptote") {
    for (double eps : {0.1, 0.5, 1.2}) {
        double prev = 1e300;
        for (int k = 2; k <= 20; k += 2) {
            const auto d = dyadic_cap_asymptotics(1.0, k, eps);
            const double dev = std::abs(d.ratio - 1.0);
            CHECK(dev <= prev);
            prev = dev;
        }
        CHECK(prev <= 1e-10);
    }
}

TEST_CASE("Lorentz invariance of the hyperboloid measure") {
    const auto f = gaussian_test({{0.3, -0.2, 0.1}, 0.4}, 1.0);
    std::mt19937_64 rng(17);
    for (double t : {0.3, 0.6, 0.9}) {
        const auto rep = lorentz_invariance_check(f, boost_matrix({t, random_axis(rng)}));
        CHECK(rep.converged);
        CHECK(rep.rel_err <= 1e-6);
    }
}
