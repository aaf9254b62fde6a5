#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hyperext/common.hpp"
#include "hyperext/radial.hpp"
#include "hyperext/slice.hpp"

namespace hyperext {

// Density of sigma_R * sigma_R2 at |x| = x; sigma_R has total mass 4 pi R.
double sphere_pair_kernel(double R, double R2, double x);

template <class T>
struct Conv2DField {
    std::vector<double> rho;
    std::vector<double> tau;
    std::vector<T> values;  // row-major: values[j * rho.size() + i] = h(rho[i], tau[j])

    T& at(std::size_t i, std::size_t j) { return values[j * rho.size() + i]; }
    const T& at(std::size_t i, std::size_t j) const { return values[j * rho.size() + i]; }
};

using Field = Conv2DField<double>;

// Empty field on a rectangular grid.
Field make_grid(std::vector<double> rho, std::vector<double> tau);
std::vector<double> linspace(double a, double b, std::size_t n);

// Pointwise evaluation of a slice source on a grid (parallel over tau rows).
template <class T>
Conv2DField<T> evaluate_field(const slice::Source<T>& src, const std::vector<double>& rho,
                              const std::vector<double>& tau);

// f mu_s * g mu_s; with different mass parameters on f and g this is the mixed product
// (for example g on s = 0 gives f mu_s * g sigma_c).
template <class T>
Conv2DField<T> hyperbolic_conv(const RadialProfile<T>& f, const RadialProfile<T>& g, const std::vector<double>& rho,
                               const std::vector<double>& tau);

// (f_plus mu_+) * (f_minus mu_-) for tau of either sign.
template <class T>
Conv2DField<T> cross_conv(const RadialProfile<T>& f_plus, const RadialProfile<T>& f_minus,
                          const std::vector<double>& rho, const std::vector<double>& tau);

// Options for the outer (rho, tau) integration of field functionals.
struct EngineOptions {
    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    int max_level = 4;
    int tau_order = 3;
    double max_panel = 0.5;
    bool fast_path = true;
    bool throw_on_failure = false;

    static EngineOptions from(const QuadratureSpec& q) {
        EngineOptions o;
        o.rel_tol = q.rel_tol;
        return o;
    }
};

struct IntegralReport {
    double value = 0.0;
    double error = 0.0;
    bool converged = false;
    int level = 0;
    std::size_t rows = 0;
};

// 16 pi^3 * integral of |g|^2, i.e. ||h||_2^2 over R^4.
template <class T>
IntegralReport conv_norm2(const slice::Source<T>& src, const EngineOptions& opt = {});
// 8 pi^2 * integral of rho g, i.e. the total mass of h.
template <class T>
IntegralReport conv_mass(const slice::Source<T>& src, const EngineOptions& opt = {});
// 16 pi^3 * integral of Re(g_a conj(g_b)).
template <class T>
IntegralReport conv_inner(const slice::Source<T>& a, const slice::Source<T>& b, const EngineOptions& opt = {});
// 16 pi^3 * integral of |g_a - g_b|^2.
template <class T>
IntegralReport conv_distance2(const slice::Source<T>& a, const slice::Source<T>& b, const EngineOptions& opt = {});

// Integral of f over H^3_s: 4 pi int F(u) phi_s(u) du.
template <class T>
T profile_integral(const RadialProfile<T>& f);

// (4 pi int |F(u)|^p phi_s(u) du)^{1/p}.
template <class T>
double lp_norm(const RadialProfile<T>& f, double p);

struct FieldNorm {
    double value = 0.0;
    double error = 0.0;
    bool touches_boundary = false;
};

// (int int |h|^2 4 pi rho^2 drho dtau)^{1/2} by the trapezoid rule, with a half-grid error estimate.
FieldNorm l2_field_norm(const Field& h);

// Smooth bump phi(rho, tau) = B((rho - rho0) / w_rho) B((tau - tau0) / w_tau), B(x) = exp(-1/(1 - x^2)).
struct Bump {
    double rho0 = 1.0, w_rho = 0.2, tau0 = 2.0, w_tau = 0.2;
    // Odd in tau about tau0 when true (antisymmetric test function).
    bool odd = false;
    double operator()(double rho, double tau) const;
};

struct MonteCarloEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    std::size_t samples = 0;
};

// <f mu_s * g mu_s, bump> by sampling pairs of points from the product measure. With cross = true the
// second factor lives on the lower sheet (time -u'), giving <f mu_+ * g mu_-, bump>.
MonteCarloEstimate mc_pairing_oracle(const Profile& f, const Profile& g, const Bump& bump, std::size_t samples,
                                     std::uint64_t seed, bool cross = false);

// <sigma_R * sigma_R2, bump(|x|)> for fixed spheres (bump depends on rho only).
MonteCarloEstimate mc_sphere_pair(double R, double R2, double rho0, double w_rho, std::size_t samples,
                                  std::uint64_t seed);

// Quadrature of <h, bump> = int int h bump 4 pi rho^2 for a closed-form density h(rho, tau). rho_breaks(tau)
// lists the rho values where h is not smooth; each piece is integrated with tanh-sinh.
double bump_pairing(const std::function<double(double, double)>& h, const Bump& bump,
                    const std::function<std::vector<double>(double)>& rho_breaks);

// CSV with header rho,tau,value (17 significant digits).
void write_field_csv(const Field& h, std::ostream& os);
Field read_field_csv(std::istream& is);
// Binary cache: "H3CF", u32 n_rho, u32 n_tau, f64 rho[n_rho], f64 tau[n_tau], f64 values (row-major, tau-major
// rows), all little-endian.
void write_field_binary(const Field& h, std::ostream& os);
Field read_field_binary(std::istream& is);

}  // namespace hyperext
