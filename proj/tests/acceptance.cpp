// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "hyperext/closed_forms.hpp"
#include "hyperext/comparison.hpp"
#include "hyperext/extremizer.hpp"
#include "hyperext/lorentz.hpp"
#include "hyperext/validation.hpp"

using namespace hyperext;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void run(int id, const char* name, const std::function<void(Verdict&)>& body) {
    Verdict v;
    v.detail.precision(6);
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(v);
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail << " [exception: " << e.what() << "]";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!v.pass) ++failures;
    std::printf("%s  %d. %s:%s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.str().c_str(), secs);
    std::fflush(stdout);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double scan_max(const std::function<double(double)>& h, double hi, int n) {
    double best = 0.0;
    for (int i = 0; i <= n; ++i) best = std::max(best, h(hi * i / n));
    return best;
}

void oracle_equivalence(Verdict& v) {
    const auto t0 = std::chrono::steady_clock::now();
    const OracleSuite s = oracle_equivalence_suite(200, 1e-6, 0x5EED);
    const double t = seconds_since(t0);
    std::size_t bad_points = 0, bad_bumps = 0;
    for (const auto& c : s.points) bad_points += !c.pass;
    for (const auto& b : s.bumps) bad_bumps += !b.pass;
    v.detail << " 200 points max rel err " << s.max_rel_err << ", 10 bump tests max |z| " << s.max_z;
    v.require(s.points.size() == 200 && bad_points == 0, "engine vs closed form within 1e-6");
    v.require(s.bumps.size() == 10 && bad_bumps == 0, "Monte-Carlo within 3 standard errors");
    v.require(t < 120.0, "runtime < 2 min");
}

void sup_bounds(Verdict& v) {
    double worst_lo = 1e300, worst_hi = 1e300, far = 0.0;
    for (double tau : {0.5, 1.0, 2.0, 10.0, 1e6}) {
        const auto [lo, hi] = mu_self_conv_sup(1.0, tau);
        const double reach = std::hypot(tau, 1.0) + 1.0;
        const double m = scan_max([&](double r) { return mu_self_conv({1.0, r, tau}).value; }, reach, 200000);
        v.require(m >= lo * (1.0 - 1e-12) && m <= hi * (1.0 + 1e-12), "scan inside bracket at tau " + std::to_string(tau));
        worst_lo = std::min(worst_lo, m / lo - 1.0);
        worst_hi = std::min(worst_hi, 1.0 - m / hi);
        if (tau == 1e6) {
            far = std::max({std::abs(lo - two_pi), std::abs(hi - two_pi)}) / two_pi;
            v.require(far <= 1e-5, "tau = 1e6 ends within 1e-5 (relative) of 2 pi");
        }
    }
    v.detail << " scan margins above lower end >= " << worst_lo << ", below upper end >= " << worst_hi
             << "; tau = 1e6 ends within " << far << " (rel) of 2 pi";
}

void mixed_sup(Verdict& v) {
    const double s = 1.0;
    std::vector<double> taus;
    for (int j = 1; j <= 300; ++j) taus.push_back(s * j / 100.0);
    for (int q = 4; q <= 28; ++q) taus.push_back(s * (1.0 + std::pow(10.0, -0.25 * q)));
    double best = 0.0;
    for (double tau : taus)
        best = std::max(best, scan_max([&](double r) { return mu_cone_conv({s, r, tau}).value; }, tau + s, 4000));
    const double rel = std::abs(best - 4.0 * pi) / (4.0 * pi);
    v.detail << " grid sup " << best << " vs 4 pi, rel diff " << rel;
    v.require(rel <= 1e-4, "grid sup within 1e-4 of 4 pi");
    v.require(best <= 4.0 * pi * (1.0 + 1e-12), "no grid value above 4 pi");
}

void ratio_scan_check(Verdict& v) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto rows = ratio_scan(0.005, 0.25, 50);
    int below = 0;
    std::ostringstream bad;
    for (const auto& r : rows)
        if (!(r.ratio > two_pi)) {
            ++below;
            bad << (below > 1 ? "," : "") << r.a;
        }
    const double r3 = static_cast<double>(trial_ratio(1e-3));
    const double a4 = std::pow(1e-3, 4);
    const double eI = std::abs(a4 * I_of_a(1e-3).value / (32 * pi * pi * pi) - 1.0);
    const double eII = std::abs(a4 * II_of_a(1e-3).value / (16 * pi * pi) - 1.0);
    const double t = seconds_since(t0);
    v.detail << " " << below << " of 50 samples <= 2 pi";
    if (below) v.detail << " (a = " << bad.str() << "; ratio - 2 pi = " << rows.back().ratio - two_pi << " at 0.25)";
    v.detail << "; |ratio(1e-3) - 2 pi| = " << std::abs(r3 - two_pi) << "; a^4 I rel " << eI << ", a^4 II rel " << eII;
    v.require(below == 0, "every ratio > 2 pi");
    v.require(std::abs(r3 - two_pi) <= 0.02 * two_pi, "ratio(1e-3) within 2%");
    v.require(eI <= 1e-3 && eII <= 1e-3, "a^4 normalisations within 1e-3");
    v.require(t < 60.0, "runtime < 1 min");
}

void small_a_limits(Verdict& v) {
    for (const auto& l : derivative_limits()) {
        v.detail << " " << l.name << " = " << l.estimate << " (target " << l.target << ");";
        v.require(l.pass, l.name);
    }
    int passed = 0;
    double b9 = 0.0;
    const auto suite = asymptotic_integral_suite();
    for (const auto& c : suite) {
        passed += c.pass;
        v.require(c.pass, c.name);
        if (c.name == "asymp_9") b9 = c.limit;
    }
    v.detail << " asymptotic identities " << passed << "/" << suite.size() << " (log-integral limit remainder " << b9 << ")";
    v.require(std::abs(b9) <= 1e-2, "limit -1 within 1e-2");
}

void strict_comparison(Verdict& v) {
    const auto t0 = std::chrono::steady_clock::now();
    const MaximizeResult r = maximize_radial(MaximizeOptions{});
    const FullQReport f = full_q_ratio(SheetPair<double>{r.f_star, r.f_star});
    const double t = seconds_since(t0);
    v.detail.precision(10);
    v.detail << " q*/2pi = " << r.q_star / two_pi << ", trial best " << r.trial.q_star / two_pi << " at a = "
             << r.trial.a_star << ", restart spread " << r.restart_spread << "; full: num/6AA = "
             << f.numerator / (6.0 * f.AA) << ", Qbar/2pi = " << f.value / two_pi;
    v.require(r.q_star > two_pi, "q* > 2 pi");
    v.require(r.q_star >= r.trial.q_star - 1e-4, "q* >= trial max - 1e-4");
    const double tol = 1e-8 * f.AA;
    v.require(std::abs(f.CC - f.AA) <= tol, "||C|| = ||A||");
    v.require(f.BB >= f.AA - tol, "4||B||^2 >= 4||A||^2");
    v.require(f.AB >= 0.0 && f.BC >= 0.0, "cross terms nonnegative");
    v.require(f.numerator >= 6.0 * f.AA - tol, "numerator >= 6 ||A||^2");
    v.require(f.converged && r.certified.converged, "engine converged");
    v.require(t < 300.0, "runtime < 5 min");
}

void bilinear_decay(Verdict& v) {
    double cmin = 1e300, cmax = 0.0;
    for (double s : {0.5, 1.0, 2.0}) {
        const BilinearTable b = bilinear_dyadic_scan(s, 6, ShellKind::bump);
        v.detail << " s=" << s << ": slope " << b.slope << ", C " << b.constant << ";";
        v.require(b.slope <= -0.20, "slope <= -0.20 at s = " + std::to_string(s));
        cmin = std::min(cmin, b.constant);
        cmax = std::max(cmax, b.constant);
    }
    v.detail << " constant ratio " << cmax / cmin;
    v.require(cmax / cmin <= 1.2, "constants within factor 1.2");
}

void invariant_suites(Verdict& v) {
    std::mt19937_64 rng(0x5EED);
    std::uniform_real_distribution<double> U(0.0, 1.0);

    // Mass conservation and pointwise Cauchy-Schwarz.
    double mass_err = 0.0, cs_viol = 0.0;
    for (double s : {0.5, 1.0, 2.0}) {
        const MassParam m(s);
        std::vector<double> a(41), b(41);
        for (auto& x : a) x = U(rng);
        for (auto& x : b) x = U(rng) - 0.2;
        std::size_t i = 0, j = 0;
        const Profile f = Profile::sample_uniform_chart(m, 0.3 * s, 6.0 * s, 40, [&](double) { return a[i++]; });
        const Profile g = Profile::sample_uniform_chart(m, 0.0, 5.0 * s, 40, [&](double) { return b[j++]; });
        for (const auto& src : {slice::self_source(f, g), slice::cross_source(f, g)}) {
            const double want = profile_integral(f) * profile_integral(g);
            mass_err = std::max(mass_err, std::abs(conv_mass(src).value - want) / std::abs(want));
        }
        const Profile one = Profile::from_chart(m, {0.0, 6.0 * s}, {1.0, 1.0});
        const auto A = g.abs2_poly();
        const auto rho = linspace(0.01 * s, 14.0 * s, 50), tau = linspace(0.05 * s, 12.0 * s, 50);
        const Field ff = evaluate_field(slice::self_source(g, g), rho, tau);
        const Field qq = evaluate_field(slice::poly_source(slice::Kind::self, A, s, A, s, true), rho, tau);
        const Field mm = evaluate_field(slice::self_source(one, one), rho, tau);
        for (std::size_t k = 0; k < ff.values.size(); ++k) {
            const double lhs = ff.values[k] * ff.values[k], rhs = qq.values[k] * mm.values[k];
            if (lhs > rhs) cs_viol = std::max(cs_viol, (lhs - rhs) / std::max(rhs, 1e-300));
        }
    }
    v.require(mass_err <= 1e-6, "mass conservation");
    v.require(cs_viol <= 1e-12, "pointwise Cauchy-Schwarz");
    v.detail << " mass rel err " << mass_err << "; C-S worst " << cs_viol << ";";

    // Symmetrisation on random complex step pairs.
    {
        EngineOptions o;
        o.rel_tol = 1e-11;
        double worst = -1e300, norm_drift = 0.0;
        const MassParam m(1.0);
        for (int k = 0; k < 100; ++k) {
            std::vector<double> u;
            double x = U(rng);
            for (int c = 0; c <= 3 + k % 4; ++c, x += 0.3 + 1.4 * U(rng)) u.push_back(x);
            std::vector<cplx> p(u.size()), q(u.size());
            for (auto& z : p) z = {2 * U(rng) - 1, 2 * U(rng) - 1};
            for (auto& z : q) z = {2 * U(rng) - 1, 2 * U(rng) - 1};
            const SheetPair<cplx> f{CProfile::from_chart(m, u, p, Interp::step),
                                    CProfile::from_chart(m, u, q, Interp::step)};
            const FullQReport a = full_q_ratio(f, o), b = full_q_ratio(symmetrize(f), o);
            worst = std::max(worst, (a.numerator - b.numerator) / b.numerator);
            norm_drift = std::max(norm_drift, std::abs(a.norm2 - b.norm2) / a.norm2);
        }
        v.require(worst <= 1e-12, "symmetrisation inequality");
        v.require(norm_drift <= 1e-12, "symmetrisation preserves the norm");
        v.detail << " symmetrisation worst excess " << worst << ", norm drift " << norm_drift << ";";
    }

    // Lorentz invariance.
    {
        double worst = 0.0;
        const auto f = gaussian_test({{0.3, -0.2, 0.1}, 0.4}, 1.0);
        for (double t : {0.3, 0.6, 0.9}) {
            const auto rep = lorentz_invariance_check(f, boost_matrix({t, {0.48, 0.6, 0.64}}));
            worst = std::max(worst, rep.rel_err);
            v.require(rep.converged, "invariance quadrature converged");
        }
        v.require(worst <= 1e-6, "Lorentz invariance");
        v.detail << " Lorentz rel err " << worst << ";";
    }

    // Scaling identities: cap rescaling, closed-form dilation, dilation of Q.
    {
        double worst = 0.0;
        for (double t : {0.5, 2.0, 7.0}) {
            const CapSpec c{0.7, 1.1, 2.3, {0.0, 0.0, 1.0}, 0.9};
            const CapSpec ct{t * c.s, t * c.a, t * c.b, c.axis, c.eps};
            worst = std::max(worst, std::abs(cap_measure(ct) / (t * t * cap_measure(c)) - 1.0));
            for (int k = 0; k < 50; ++k) {
                const double rho = 4.0 * U(rng), tau = 0.05 + 4.0 * U(rng);
                const double ref = mu_self_conv({1.0, rho, tau}).value;
                worst = std::max(worst, std::abs(mu_self_conv({t, t * rho, t * tau}).value - ref) / std::max(1.0, ref));
            }
            QuarticFunctional F1(MassParam(1.0), 20.0, 100), Ft(MassParam(t), 20.0 * t, 100);
            std::vector<double> w(F1.nodes());
            for (auto& x : w) x = U(rng);
            worst = std::max(worst, std::abs(Ft.q(w) / F1.q(w) - 1.0));
        }
        v.require(worst <= 1e-10, "scaling identities");
        v.detail << " scaling worst " << worst << ";";
    }

    // Cap certificates: 20 normalisations and 20 bounded-ball certificates.
    {
        int ok = 0, total = 0;
        for (double s : {0.05, 0.1, 0.15, 0.2, 0.25})
            for (double eps : {0.9, 1.1, 1.3, 1.5}) {
                const auto n = normalize_cap({s, 1.0, 2.0, {1.0, 0.0, 0.0}, eps});
                ++total;
                ok += n.accepted && n.pass;
            }
        for (double s : {0.5, 1.0, 4.0, 10.0})
            for (int k : {0, 2, 5, 8, 12}) {
                ++total;
                ok += bounded_ball_certificate(s, k, 0.3).pass;
            }
        v.require(ok == total, "cap certificates");
        v.detail << " cap certificates " << ok << "/" << total << ";";
    }

    // Tail bound on random step tails.
    {
        int ok = 0;
        const MassParam m(1.0);
        for (int k = 0; k < 100; ++k) {
            const double a = 1.2 + 15.0 * U(rng);
            std::vector<double> r{a}, val;
            const int steps = 2 + static_cast<int>(5 * U(rng));
            for (int j = 0; j < steps; ++j) {
                val.push_back(U(rng));
                r.push_back(r.back() + a * (0.05 + 0.5 * U(rng)));
            }
            val.push_back(0.0);
            ok += tail_bound_check(a, Profile(m, r, val, Interp::step)).pass;
        }
        v.require(ok == 100, "tail bound");
        v.detail << " tail bound " << ok << "/100;";
    }

    // Cone limit.
    {
        const ConeLimitScan c = cone_limit_scan({1.0, 2.0}, {1.0, 1.0}, Interp::step, {0.5, 0.25, 0.1, 0.05});
        v.require(c.decreasing, "cone-limit distances decreasing");
        v.detail << " cone distances";
        for (const auto& p : c.points) v.detail << " " << p.distance;
    }
}

}  // namespace

int main() {
    run(1, "oracle equivalence", oracle_equivalence);
    run(2, "sup bounds of mu*mu", sup_bounds);
    run(3, "mixed sup 4 pi", mixed_sup);
    run(4, "ratio scan above 2 pi and small-a limits", ratio_scan_check);
    run(5, "derivative limits and integral asymptotics", small_a_limits);
    run(6, "strict comparison", strict_comparison);
    run(7, "bilinear dyadic decay", bilinear_decay);
    run(8, "invariant suites", invariant_suites);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
