#pragma once

#include <functional>
#include <string>
#include <vector>

namespace hyperext {

// int_0^inf e^{-decay x} F(x) dx by composite Gauss-Legendre on panels that are geometric (ratio 2)
// from scale * 2^-12 out to 80 / decay. The panel layout moves smoothly with the parameters, so finite
// differences in a parameter see no adaptive-refinement noise. error = |GL30 - GL20|; tail_bound bounds
// the discarded part beyond 80 / decay using |F(x)| <= coef (1 + x)^degree.
struct LaplaceResult {
    long double value = 0.0L;
    double error = 0.0;
    double tail_bound = 0.0;
};

LaplaceResult laplace_integral(const std::function<long double(long double)>& F, long double decay,
                               long double scale, int degree, long double coef);

// Integrand of I: tau^2 sqrt(tau^2+4) - (2/3)(tau^2+4) sqrt(tau^2+1) + 8/3 + 2 tau log(tau + sqrt(tau^2+1)).
long double trial_numerator_density(long double tau);

struct IntegralValue {
    double value = 0.0;
    double rel_error = 0.0;    // primary rule estimate, tail bound included
    double second_rule = 0.0;  // adaptive Gauss-Kronrod in double with an exp-sinh tail
    bool converged = false;
};

IntegralValue I_of_a(double a);
IntegralValue II_of_a(double a);
// I(a) / II(a) in extended precision.
long double trial_ratio(long double a);
// N(a) / D(a) = (I / II)(a^{1/3}).
long double rescaled_ratio(long double a);

struct RatioSample {
    double a = 0.0;
    double I = 0.0, II = 0.0, ratio = 0.0;
    double err_I = 0.0, err_II = 0.0;
};

// Uniform scan of a over [a_min, a_max] (steps points, endpoints included).
std::vector<RatioSample> ratio_scan(double a_min, double a_max, int steps);

struct LimitEstimate {
    std::string name;
    double target = 0.0;
    double estimate = 0.0;    // constant term of the fit
    double error_bar = 0.0;   // spread of the constant term over leave-one-out fits
    double raw = 0.0;         // finite-difference value at the smallest schedule point
    double raw_at = 0.0;      // that schedule point
    double tolerance = 0.0;
    bool relative = false;    // tolerance relative to the target when true
    bool stable = false;      // error_bar below a quarter of the tolerance
    bool pass = false;
};

struct DerivativeSchedule {
    // b-derivatives of I/II at b_k = b0 2^-k, k < b_count, steps b/8, b/16, b/32.
    double b0 = 0.04;
    int b_count = 8;
    // a-derivative of N/D at a_k = a0 10^-k, k < a_count, steps a/8, a/16, a/32.
    double a0 = 1e-4;
    int a_count = 6;
};

// Limits of I/II and its first three derivatives as a -> 0 and of d/da (N/D). Each is extrapolated by a
// least-squares fit in b with the correction terms b^m log^2(1/b), b^m log(1/b), b^m.
std::vector<LimitEstimate> derivative_limits(const DerivativeSchedule& sched = {});

struct AsymptoticPoint {
    double a = 0.0;
    double lhs = 0.0;
    double remainder = 0.0;  // lhs - leading term
    double scaled = 0.0;     // remainder / weight
};

struct AsymptoticCheck {
    std::string name;
    std::string order;  // remainder order as text
    std::vector<AsymptoticPoint> points;
    double growth = 0.0;  // least-squares slope of log|scaled| against log(1/a)
    double limit = 0.0;   // scaled remainder at the smallest a
    bool pass = false;
    std::string note;
};

// The nine small-a integral asymptotics, the integration-by-parts identity and the closed integral
// int_0^inf du / ((u + sqrt(u^2+1)) sqrt(u^2+1)) = 1.
std::vector<AsymptoticCheck> asymptotic_integral_suite(const std::vector<double>& a_list = {});

// int int e^{-a tau} (masked mu*mu)^2 4 pi rho^2 d rho d tau by 2-D quadrature of the closed form (s = 1).
// Equals I(a); serves as an independent check of the 1-D integrand.
double masked_lower_bound(double a);

}  // namespace hyperext
