#include "doctest.h"

#include <cmath>
#include <random>

#include "hyperext/extremizer.hpp"

using namespace hyperext;

namespace {

std::vector<double> random_nonneg(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = U(rng);
    return v;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

std::vector<double> axpy(const std::vector<double>& x, double h, const std::vector<double>& d) {
    std::vector<double> y(x);
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += h * d[i];
    return y;
}

CProfile random_complex_step(const MassParam& m, const std::vector<double>& u, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    std::vector<cplx> v(u.size());
    for (auto& x : v) x = {U(rng), U(rng)};
    return CProfile::from_chart(m, u, v, Interp::step);
}

}  // namespace

TEST_CASE("numerator gradient matches a five-point stencil") {
    // The numerator is a quartic form, so the five-point first derivative is exact up to rounding.
    std::mt19937_64 rng(1);
    QuarticFunctional F(MassParam(1.0), 12.0, 40);
    const auto v = random_nonneg(F.nodes(), rng);
    std::vector<double> g;
    F.numerator(v, &g);
    for (int k = 0; k < 5; ++k) {
        std::normal_distribution<double> n(0.0, 1.0);
        std::vector<double> d(F.nodes());
        for (auto& x : d) x = n(rng);
        const double h = 0.1;
        const double fd = (-F.numerator(axpy(v, 2 * h, d)) + 8 * F.numerator(axpy(v, h, d)) -
                           8 * F.numerator(axpy(v, -h, d)) + F.numerator(axpy(v, -2 * h, d))) /
                          (12 * h);
        CHECK(dot(g, d) == doctest::Approx(fd).epsilon(1e-10));
    }
    std::vector<double> gn;
    F.norm2(v, &gn);
    std::vector<double> d(F.nodes(), 0.0);
    d[7] = 1.0;
    const double fd = (F.norm2(axpy(v, 1e-3, d)) - F.norm2(axpy(v, -1e-3, d))) / 2e-3;
    CHECK(gn[7] == doctest::Approx(fd).epsilon(1e-10));
}

TEST_CASE("Q gradient against central differences") {
    std::mt19937_64 rng(2);
    QuarticFunctional F(MassParam(0.5), 10.0, 30);
    const auto v = random_nonneg(F.nodes(), rng);
    std::vector<double> g;
    F.q(v, &g);
    for (std::size_t i : {0u, 5u, 17u, 30u}) {
        std::vector<double> d(F.nodes(), 0.0);
        d[i] = 1.0;
        const double h = 1e-5;
        const double fd = (F.q(axpy(v, h, d)) - F.q(axpy(v, -h, d))) / (2 * h);
        CHECK(g[i] == doctest::Approx(fd).epsilon(1e-6).scale(1e-9));
    }
}

TEST_CASE("fast functional agrees with the slice engine") {
    std::mt19937_64 rng(3);
    for (double s : {0.5, 1.0, 2.0}) {
        QuarticFunctional F(MassParam(s), 10.0 * s, 60);
        const auto v = random_nonneg(F.nodes(), rng);
        const QReport e = q_ratio(F.profile(v));
        CHECK(e.converged);
        CHECK(e.value == doctest::Approx(F.q(v)).epsilon(1e-10));
        CHECK(std::pow(lp_norm(F.profile(v), 2.0), 2) == doctest::Approx(F.norm2(v)).epsilon(1e-12));
    }
}

TEST_CASE("dilation invariance of Q on matched grids") {
    std::mt19937_64 rng(4);
    QuarticFunctional F1(MassParam(1.0), 20.0, 100);
    const auto v = random_nonneg(F1.nodes(), rng);
    for (double s : {0.5, 2.0, 7.0}) {
        QuarticFunctional Fs(MassParam(s), 20.0 * s, 100);
        CHECK(std::abs(Fs.q(v) - F1.q(v)) <= 1e-10 * F1.q(v));
        CHECK(std::abs(q_ratio(Fs.profile(v)).value - F1.q(v)) <= 1e-10 * F1.q(v));
    }
}

TEST_CASE("cone functional stays at or below 2 pi and reaches it on exponentials") {
    QuarticFunctional F(MassParam(0.0), 40.0, 400);
    std::mt19937_64 rng(5);
    for (int k = 0; k < 5; ++k) CHECK(F.q(random_nonneg(F.nodes(), rng)) <= two_pi);
    const auto t = trial_family_scan(F);
    CHECK(t.q_star <= two_pi);
    CHECK(t.q_star == doctest::Approx(two_pi).epsilon(1e-7));
}

TEST_CASE("modulus does not decrease Q") {
    std::mt19937_64 rng(6);
    const MassParam m(1.0);
    std::vector<double> u;
    for (int k = 0; k <= 12; ++k) u.push_back(0.5 * k);
    for (int k = 0; k < 5; ++k) {
        const CProfile f = random_complex_step(m, u, rng);
        const double q = q_ratio(f).value, qa = q_ratio(f.modulus()).value;
        CHECK(qa >= q * (1.0 - 1e-12));
    }
}

TEST_CASE("symmetrisation preserves the step-profile norm and does not decrease the full ratio") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const MassParam m(1.0);
    EngineOptions o;
    o.rel_tol = 1e-11;
    for (int k = 0; k < 8; ++k) {
        std::vector<double> u;
        double x = U(rng);
        for (int j = 0; j <= 3 + k % 3; ++j, x += 0.3 + 1.4 * U(rng)) u.push_back(x);
        const SheetPair<cplx> f{random_complex_step(m, u, rng), random_complex_step(m, u, rng)};
        const auto fs = symmetrize(f);
        const FullQReport a = full_q_ratio(f, o), b = full_q_ratio(fs, o);
        CHECK(b.norm2 == doctest::Approx(a.norm2).epsilon(1e-14));
        CHECK(a.numerator <= b.numerator * (1.0 + 1e-12));
    }
}

TEST_CASE("even pairs: C = A and B = A in norm, numerator at least 6 AA") {
    QuarticFunctional F(MassParam(1.0), 12.0, 40);
    const Profile f = F.profile(trial_profile(F, 0.6));
    const FullQReport r = full_q_ratio(SheetPair<double>{f, f});
    CHECK(r.CC == doctest::Approx(r.AA).epsilon(1e-12));
    CHECK(r.BB == doctest::Approx(r.AA).epsilon(1e-8));
    CHECK(r.AB >= 0.0);
    CHECK(r.BC >= 0.0);
    CHECK(r.numerator >= 6.0 * r.AA);
    CHECK(r.value > 1.5 * two_pi);
}

TEST_CASE("one empty sheet reduces the full ratio to Q") {
    QuarticFunctional F(MassParam(1.0), 12.0, 40);
    const Profile f = F.profile(trial_profile(F, 0.6));
    const Profile zero = f.scaled(0.0);
    const FullQReport r = full_q_ratio(SheetPair<double>{f, zero});
    CHECK(r.value == doctest::Approx(q_ratio(f).value).epsilon(1e-12));
    CHECK(r.BB == 0.0);
    CHECK_THROWS_AS(full_q_ratio(SheetPair<double>{zero, zero}), DomainError);
}

TEST_CASE("radial maximisation on a small grid") {
    MaximizeOptions o;
    o.grid_size = 100;
    o.restarts = 3;
    const MaximizeResult r = maximize_radial(o);
    CHECK(r.q_star > two_pi);
    CHECK(r.q_star >= r.trial.q_star - 1e-4);
    CHECK(r.certified.value == doctest::Approx(r.q_star).epsilon(1e-8));
    CHECK(r.restart_spread <= 1e-6);
    for (double v : r.v_star) CHECK(v >= 0.0);
    CHECK(!r.trace.empty());
    const MaximizeResult again = maximize_radial(o);
    CHECK(again.q_star == r.q_star);
    CHECK(again.v_star == r.v_star);

    // Same problem at s = 2 with the radius scaled: same maximal value.
    MaximizeOptions o2 = o;
    o2.s = 2.0;
    o2.r_max = 2.0 * o.r_max;
    const MaximizeResult r2 = maximize_radial(o2);
    CHECK(r2.q_star == doctest::Approx(r.q_star).epsilon(1e-9));
}

TEST_CASE("dyadic shells have unit norm and the stated support") {
    for (double s : {0.5, 1.0, 2.0})
        for (auto kind : {ShellKind::bump, ShellKind::indicator})
            for (int k : {0, 3, 6}) {
                const Profile f = dyadic_shell(s, k, kind);
                CHECK(lp_norm(f, 2.0) == doctest::Approx(1.0).epsilon(1e-13));
                CHECK(f.radii().front() == doctest::Approx(std::ldexp(s, k)));
                CHECK(f.radii().back() == doctest::Approx(std::ldexp(s, k + 1)));
            }
}

TEST_CASE("concentrating shells carry equal mass") {
    for (int m : {1, 3, 7}) {
        const Profile f = concentrating_shells(m);
        CHECK(lp_norm(f, 2.0) == doctest::Approx(1.0).epsilon(1e-12));
        const DyadicRefinement d = dyadic_refinement_check(f);
        REQUIRE(d.piece_norms.size() == static_cast<std::size_t>(m));
        for (double p : d.piece_norms) CHECK(p == doctest::Approx(1.0 / std::sqrt(m)).epsilon(1e-12));
        CHECK(d.rhs3 == doctest::Approx(std::pow(m, -1.0 / 6.0)).epsilon(1e-9));
    }
}

TEST_CASE("tail bound on random step tails") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const MassParam m(1.0);
    for (double a : {1.5, 4.0, 10.0})
        for (int k = 0; k < 4; ++k) {
            std::vector<double> r{a}, v;
            for (int j = 0; j < 4; ++j) {
                v.push_back(U(rng));
                r.push_back(r.back() + a * (0.05 + 0.5 * U(rng)));
            }
            v.push_back(0.0);
            const TailBound t = tail_bound_check(a, Profile(m, r, v, Interp::step));
            CHECK(t.pass);
            CHECK(t.lhs <= t.cauchy_schwarz * (1.0 + 1e-9));
            CHECK(t.cauchy_schwarz <= t.bound * (1.0 + 1e-9));
        }
    CHECK_THROWS_AS(tail_bound_check(2.0, Profile(m, {1.5, 3.0}, {1.0, 0.0}, Interp::step)), DomainError);
}

TEST_CASE("cone limit distances decrease") {
    const ConeLimitScan c = cone_limit_scan({1.0, 2.0}, {1.0, 1.0}, Interp::step, {0.5, 0.25, 0.1, 0.05});
    CHECK(c.decreasing);
    CHECK(c.dominated);
    for (std::size_t i = 1; i < c.points.size(); ++i) CHECK(c.points[i].distance < c.points[i - 1].distance);
}
