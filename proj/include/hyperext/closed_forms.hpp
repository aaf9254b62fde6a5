#pragma once

#include <string>
#include <utility>

namespace hyperext {

struct ConvPoint {
    double s = 1.0;
    double rho = 0.0;  // |xi| >= 0
    double tau = 0.0;
};

enum class Branch { inner, middle, outer, outside };
// Regime of the derivation: |xi| <= 2s or |xi| > 2s.
enum class Regime { small_xi, large_xi };

struct BranchTag {
    Branch branch = Branch::outside;
    Regime regime = Regime::small_xi;
};

struct Density {
    double value = 0.0;
    BranchTag tag;
};

std::string to_string(Branch b);
std::string to_string(Regime r);

// mu_s * mu_s as a density on R^4, three-branch form. Value 0 outside the closed support and on the outer
// support boundary; 2 pi sqrt(1 + 4 s^2 / tau^2) on rho = 0.
Density mu_self_conv(const ConvPoint& p);

// Same density from the case-split derivation (regimes |xi| <= 2s and > 2s); kept for differential testing.
double mu_self_conv_by_cases(const ConvPoint& p);

// Only the inner and middle indicators (the lower-bound variant used with the exponential trial family).
double mu_self_conv_masked(const ConvPoint& p);

// Bracket (2 pi sqrt(1 + 4 s^2/tau^2), 2 pi (1 + 2 s/tau)) for the sup over rho.
std::pair<double, double> mu_self_conv_sup(double s, double tau);
// Exact sup over rho: attained at the inner/middle boundary, 2 pi (sqrt(tau^2+s^2) + s) / tau.
double mu_self_conv_sup_exact(double s, double tau);

// mu_s * sigma_c (cone measure on the second factor).
Density mu_cone_conv(const ConvPoint& p);

// Sup over rho of mu_s * sigma_c at fixed tau >= 0. Regimes split at tau0 = (s/2) sqrt(2(sqrt5 - 1)) and s.
double mu_cone_conv_sup(double s, double tau);
double mu_cone_conv_breakpoint(double s);

// e^{-a tau/2} mu_s * mu_s: the self-convolution of f_a(y) = exp(-(a/2) psi_s(|y|)).
double exp_weighted_conv(double a, const ConvPoint& p);

enum class SupportKind { self, cone };
bool support_predicate(const ConvPoint& p, SupportKind kind);

// ||sigma_R * sigma_R2||_{L^2(R^3)} = sqrt(32 pi^3 min(R, R2)); for R = R2 this is R^{1/2} times the unit value.
double sphere_pair_l2(double R, double R2);

}  // namespace hyperext
