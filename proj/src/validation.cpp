#include "hyperext/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "hyperext/closed_forms.hpp"
#include "hyperext/slice.hpp"

namespace hyperext {

namespace {

constexpr double s_cycle[3] = {0.5, 1.0, 2.0};

std::vector<double> self_breaks(double s, double tau) {
    const double q = std::hypot(tau, s);
    return {q - s, std::hypot(tau, 2.0 * s), q + s};
}

std::vector<double> cone_breaks(double s, double tau) {
    return {std::abs(tau - s), std::hypot(tau, s), tau + s};
}

bool near_any(double x, const std::vector<double>& pts, double scale) {
    return std::any_of(pts.begin(), pts.end(), [&](double p) { return std::abs(x - p) < 1e-4 * scale; });
}

}  // namespace

OracleSuite oracle_equivalence_suite(std::size_t samples, double tol, std::uint64_t seed, std::size_t bump_tests,
                                     std::size_t mc_samples) {
    require(tol > 0.0, "oracle tolerance must be positive");
    OracleSuite suite;
    if (samples == 0) return suite;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    // Constant profiles reaching past every sampled tau, so truncation never enters.
    std::vector<Profile> hyp, cone;
    for (double s : s_cycle) {
        hyp.push_back(Profile::from_chart(MassParam(s), {0.0, 8.0 * s}, {1.0, 1.0}));
        cone.push_back(Profile::from_chart(MassParam(0.0), {0.0, 8.0 * s}, {1.0, 1.0}));
    }
    suite.points.resize(samples);
    for (std::size_t i = 0; i < samples; ++i) {
        OracleCase& c = suite.points[i];
        const std::size_t si = i % 3;
        c.s = s_cycle[si];
        c.kind = (i / 3) % 2 == 0 ? "self" : "cone";
        for (;;) {
            c.tau = c.s * (0.1 + 5.9 * unif(rng));
            const auto br = c.kind == "self" ? self_breaks(c.s, c.tau) : cone_breaks(c.s, c.tau);
            c.rho = br.back() * unif(rng);
            if (c.rho <= 1e-3 * c.s || near_any(c.rho, br, c.s)) continue;
            const ConvPoint p{c.s, c.rho, c.tau};
            c.closed = c.kind == "self" ? mu_self_conv(p).value : mu_cone_conv(p).value;
            if (c.closed > 0.0) break;
        }
    }
    parallel_for(samples, [&](std::size_t i) {
        OracleCase& c = suite.points[i];
        const std::size_t si = i % 3;
        const auto src = c.kind == "self" ? slice::self_source(hyp[si], hyp[si]) : slice::self_source(hyp[si], cone[si]);
        c.engine = slice::field_value(slice::build_row(src, c.tau), c.rho);
        c.rel_err = std::abs(c.engine - c.closed) / std::abs(c.closed);
        c.pass = c.rel_err <= tol;
    });
    for (const auto& c : suite.points) {
        suite.max_rel_err = std::max(suite.max_rel_err, c.rel_err);
        suite.pass = suite.pass && c.pass;
    }

    suite.bumps.resize(bump_tests);
    for (std::size_t i = 0; i < bump_tests; ++i) {
        BumpCase& b = suite.bumps[i];
        b.s = s_cycle[i % 3];
        b.profile = i % 2 == 0 ? "mu" : "f_a";
        const double tau0 = b.s * (1.0 + 3.0 * unif(rng));
        const double outer = self_breaks(b.s, tau0).back();
        b.bump = Bump{outer * (0.15 + 0.6 * unif(rng)), 0.25 * b.s, tau0, 0.25 * b.s};
    }
    constexpr double a = 0.7;
    for (std::size_t i = 0; i < bump_tests; ++i) {
        BumpCase& b = suite.bumps[i];
        const MassParam m(b.s);
        const double U = 8.0 * b.s;
        const double a_s = a / b.s;
        const Profile f = b.profile == "mu"
                              ? Profile::from_chart(m, {0.0, U}, {1.0, 1.0})
                              : Profile::sample_uniform_chart(m, 0.0, U, 2000, [&](double r) {
                                    return std::exp(-0.5 * a_s * m.psi(r));
                                });
        auto h = [&](double rho, double tau) {
            const ConvPoint p{b.s, rho, tau};
            return b.profile == "mu" ? mu_self_conv(p).value : exp_weighted_conv(a_s, p);
        };
        b.quadrature = bump_pairing(h, b.bump, [&](double tau) { return self_breaks(b.s, tau); });
        const auto est = mc_pairing_oracle(f, f, b.bump, mc_samples, seed + 1000 + i);
        b.mc = est.estimate;
        b.std_error = est.std_error;
        b.z = std::abs(b.mc - b.quadrature) / std::max(b.std_error, 1e-300);
        b.pass = b.z <= 3.0;
        suite.max_z = std::max(suite.max_z, b.z);
        suite.pass = suite.pass && b.pass;
    }
    return suite;
}

}  // namespace hyperext
