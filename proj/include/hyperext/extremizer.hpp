#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyperext/convolution.hpp"

namespace hyperext {

// ---------------------------------------------------------------------------------------------
// Q(f) = ||f mu_s * f mu_s||_2^2 / ||f||_{L^2(mu_s)}^4

struct QReport {
    double value = 0.0;
    double numerator = 0.0;     // ||f mu * f mu||_2^2
    double norm2 = 0.0;         // ||f||_{L^2(mu)}^2
    double quad_error = 0.0;    // absolute error estimate of value from the outer integration
    double boundary_value = 0.0;  // |f| at the last node relative to max |f|: truncation indicator
    bool converged = false;
};

template <class T>
QReport q_ratio(const RadialProfile<T>& f, const EngineOptions& opt = {});

// 2 pi Q^{1/4}: the L^4 extension ratio ||T f||_4 / ||f||_2 for this profile.
double extension_ratio(double q);

// Q on a uniform chart grid u_k = k U / n (k = 0..n) with linear interpolation, evaluated without the
// slice engine: for a fixed tau the rho-integral of g^2 is rewritten as a double integral of P(x) P(y)
// against the length of the common rho-range, which is min(S) - max(|D|). Symmetry about tau / 2 reduces
// it to one cumulative integral in z = |x - tau/2|, so the value is a fixed quadrature rule in the nodal
// values and its gradient is computed exactly by a reverse sweep.
class QuarticFunctional {
public:
    QuarticFunctional(MassParam m, double u_max, std::size_t cells, int tau_order = 6, int z_order = 5);

    std::size_t nodes() const { return cells_ + 1; }
    std::size_t cells() const { return cells_; }
    double u_max() const { return u_max_; }
    double s() const { return m_.s; }
    const std::vector<double>& chart() const { return u_; }
    // 4 pi int phi_i phi_s(u) du, the lumped L^2(mu) mass of each hat function.
    const std::vector<double>& lumped_mass() const { return lumped_; }

    double numerator(const std::vector<double>& v, std::vector<double>* grad = nullptr) const;
    double norm2(const std::vector<double>& v, std::vector<double>* grad = nullptr) const;
    double q(const std::vector<double>& v, std::vector<double>* grad = nullptr) const;

    Profile profile(const std::vector<double>& v) const;
    std::vector<double> sample(const std::function<double(double u)>& f_of_u) const;

private:
    MassParam m_;
    double u_max_;
    std::size_t cells_;
    double du_;
    std::vector<double> u_, lumped_;
    std::vector<double> tx_, tw_;             // tau rule on [0, 1]
    std::vector<double> zx_, zw_;             // z rule on [0, 1]
    std::vector<std::vector<double>> zint_;   // zint_[q][k] = int_0^{zx_q} l_k
    std::vector<double> mx_, mw_;             // rule for the L^2 norm

    double row(double tau, const std::vector<double>& v, std::vector<double>* grad, double weight) const;
};

// f_a(u) = exp(-a u / 2) sampled on the functional's grid.
std::vector<double> trial_profile(const QuarticFunctional& F, double a);

struct TrialScan {
    std::vector<double> a, q;
    double a_star = 0.0;
    double q_star = 0.0;
};

// Q(f_a) over a log-spaced list in [a_lo, a_hi], then a Brent refinement of the best bracket.
TrialScan trial_family_scan(const QuarticFunctional& F, double a_lo = 0.05, double a_hi = 4.0, int count = 32);

// ---------------------------------------------------------------------------------------------
// Radial maximisation

struct TraceEntry {
    int restart = 0;
    int level = 0;
    std::size_t cells = 0;
    int iter = 0;
    double q = 0.0;
    double step = 0.0;
    double grad_norm = 0.0;  // mass-weighted norm of the preconditioned gradient
};

struct RestartResult {
    std::string start;  // name of the initial profile
    double q_initial = 0.0;
    double q_final = 0.0;
    int iterations = 0;
    std::string stop_reason;  // "converged", "iteration cap", "stagnation"
};

struct MaximizeOptions {
    double s = 1.0;
    std::size_t grid_size = 400;
    double r_max = 40.0;
    int restarts = 5;
    int iters = 2000;
    std::uint64_t seed = 0x5EED;
    double rel_tol = 1e-9;
    int stagnation_window = 50;
    // Coarse levels halve the grid down to at least this many cells.
    std::size_t coarsest = 50;
};

struct MaximizeResult {
    Profile f_star;
    std::vector<double> v_star;
    double q_star = 0.0;          // fast functional on the final grid
    QReport certified;            // slice-engine evaluation of f_star
    TrialScan trial;              // baseline on the same grid
    std::vector<RestartResult> restarts;
    std::vector<TraceEntry> trace;
    double restart_spread = 0.0;  // (max - min) / max over restart final values
};

// Projected gradient ascent on Q over nonnegative profiles. Barzilai-Borwein steps preconditioned by the
// lumped mass, backtracking to keep every accepted step increasing, and a coarse-to-fine grid sequence.
// Starts: the best trial profile, a shell indicator, and log-normal profiles from the seed.
MaximizeResult maximize_radial(const MaximizeOptions& opt);

// ---------------------------------------------------------------------------------------------
// Two-sheeted hyperboloid

template <class T>
struct SheetPair {
    RadialProfile<T> f_plus, f_minus;
};

// f#(x, t) = ((|f(x, t)|^2 + |f(-x, -t)|^2) / 2)^{1/2}. Radial profiles on a common chart grid; the result
// is even under the sheet exchange. The L^2 norm is preserved exactly for step profiles and up to the
// interpolation error for linear ones.
template <class T>
SheetPair<double> symmetrize(const SheetPair<T>& f);

struct FullQReport {
    double value = 0.0;      // ||f mubar * f mubar||^2 / ||f||^4
    double numerator = 0.0;
    double norm2 = 0.0;      // ||f_+||^2 + ||f_-||^2
    // Expansion of ||A + 2B + C||^2 with A = f+ * f+, B = f+ * f-, C = f- * f-; <A, C> = 0 by support.
    double AA = 0.0, CC = 0.0, BB = 0.0, AB = 0.0, BC = 0.0;
    double quad_error = 0.0;
    bool converged = false;
};

template <class T>
FullQReport full_q_ratio(const SheetPair<T>& f, const EngineOptions& opt = {});

// ---------------------------------------------------------------------------------------------
// Dyadic diagnostics

enum class ShellKind { indicator, bump };

// Unit-norm profile supported on the radial shell [2^k s, 2^{k+1} s].
Profile dyadic_shell(double s, int k, ShellKind kind, std::size_t cells = 32);

struct BilinearTable {
    double s = 1.0;
    int k_max = 0;
    ShellKind kind = ShellKind::bump;
    std::size_t cells = 0;
    std::vector<std::vector<double>> norm;  // norm[k][k'] = ||f_k mu * f_k' mu||_2
    double slope = 0.0;       // least-squares slope of log2(mean norm at separation d) for d in [1, 6]
    double constant = 0.0;    // 2^intercept of that fit
    double refinement_change = 0.0;  // relative change of the extreme pair under doubled resolution
    bool refined = false;
};

BilinearTable bilinear_dyadic_scan(double s, int k_max, ShellKind kind, std::size_t cells = 32,
                                   const EngineOptions& opt = {});

struct DyadicRefinement {
    double lhs = 0.0;      // ||f mu * f mu||_2^{1/2}
    double norm = 0.0;     // ||f||_2
    double rhs3 = 0.0;     // (sum_k ||f_k||^3)^{1/3}
    double rhs_sup = 0.0;  // sup_k ||f_k||^{1/3} ||f||^{2/3}
    std::vector<double> piece_norms;
    double c3 = 0.0, c_sup = 0.0;  // lhs / rhs3, lhs / rhs_sup
};

// Dyadic pieces f_k = f 1{2^k <= r < 2^{k+1}} (s = 1). Requires the support in [1, r_max].
DyadicRefinement dyadic_refinement_check(const Profile& f, const EngineOptions& opt = {});

// Equal L^2 mass 1/m on each of the shells [2^k, 2^{k+1}), k < m (s = 1, step profile, unit norm).
Profile concentrating_shells(int shells);

struct ConcentratingScan {
    std::vector<int> shells;
    std::vector<double> lhs, rhs3, c3;  // lhs and rhs3 relative to ||f||_2
    bool decreasing = false;            // lhs strictly decreasing from 6 shells on
    double c3_drift = 0.0;              // largest relative step of c3 over the last three shells
    bool bounded = false;               // c3_drift <= 1e-2
};

ConcentratingScan concentrating_scan(int max_shells = 14, const EngineOptions& opt = {});

struct TailBound {
    double a = 0.0;
    double lhs = 0.0;           // ||f mu * f mu||^2
    double cauchy_schwarz = 0.0;  // int (mu * mu)(|f|^2 mu * |f|^2 mu)
    double bound = 0.0;         // 2 pi (1 + 1/sqrt(a^2 - 1)) ||f||^4
    double slack = 0.0;         // 1 - lhs / bound
    bool pass = false;
};

// Requires s = 1, a > 1, and f supported in radii >= a.
TailBound tail_bound_check(double a, const Profile& f, const EngineOptions& opt = {});

struct ConeLimitPoint {
    double s = 0.0;
    double distance = 0.0;     // ||f mu_s * f mu_s - f sigma_c * f sigma_c||_2
    double field_max = 0.0;    // max of the hyperboloid field on a sample grid
    double dominating = 0.0;   // 4 pi ||f||_inf^2 (1 + 1/a)
};

struct ConeLimitScan {
    std::vector<ConeLimitPoint> points;
    bool decreasing = false;
    bool dominated = false;
};

// f is a function of |y| given by radii / values / mode; it is re-sampled on every H^3_s and on the cone.
ConeLimitScan cone_limit_scan(const std::vector<double>& radii, const std::vector<double>& values, Interp mode,
                              const std::vector<double>& s_list, const EngineOptions& opt = {});

}  // namespace hyperext
