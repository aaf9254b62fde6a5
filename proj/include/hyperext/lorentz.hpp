#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace hyperext {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;
using Mat4 = std::array<std::array<double, 4>, 4>;

struct SpaceTimePoint {
    Vec3 x{0.0, 0.0, 0.0};
    double t = 0.0;
};

// B(p, q) = p_t q_t - p_x . q_x
double minkowski_form(const SpaceTimePoint& p, const SpaceTimePoint& q);

struct BoostParam {
    double t = 0.0;           // in (-1, 1)
    Vec3 axis{1.0, 0.0, 0.0};  // normalised on use
};

// Rotation R with R e1 = axis (the minimal rotation; identity for axis = e1).
Mat3 rotation_to(const Vec3& axis);
Mat4 embed(const Mat3& r);
Mat4 multiply(const Mat4& a, const Mat4& b);
double determinant(const Mat4& m);
SpaceTimePoint act(const Mat4& m, const SpaceTimePoint& p);

// L^t along e1 conjugated by rotation_to(axis); scaled multiplies by sqrt(1 - t^2).
Mat4 boost_matrix(const BoostParam& bp, bool scaled = false);
SpaceTimePoint boost(const BoostParam& bp, const SpaceTimePoint& p, bool scaled = false);

// Cap [a, b] x C(axis, eps) on H^3_s.
struct CapSpec {
    double s = 1.0;
    double a = 1.0, b = 2.0;
    Vec3 axis{1.0, 0.0, 0.0};
    double eps = 0.5;
};

// (s^2 ln(r + psi_s(r)) + r psi_s(r)) / 2, the radial primitive of r^2 / psi_s(r).
double cap_radial_primitive(double s, double r);
double spherical_cap_area(double eps);
double cap_measure(const CapSpec& c);

struct Hypothesis {
    std::string name;
    bool holds = false;
    double value = 0.0;
};

struct CapNormalization {
    bool accepted = false;
    std::string rejected;  // name of the first failed hypothesis
    std::vector<Hypothesis> hypotheses;
    double t = 0.0;
    double s_image = 0.0;         // s / sqrt(1 - t^2)
    double measure = 0.0;         // exact measure of the normalised cap
    double measure_floor = 0.0;   // pi / (1 + cos eps) when t = cos eps, else pi(1 - cos eps)
    double r_min = 0.0, r_max = 0.0;  // sampled radial range of the image
    double shell_defect = 0.0;        // max |t'^2 - |x'|^2 + s_image^2| over samples
    bool measure_ok = false;
    bool range_ok = false;
    bool pass = false;
};

// Boost normalisation of a cap on [1, 2]: t = cos eps for eps <= pi/3, t = 0 for eps in (pi/3, pi/2].
// Samples the image on an n x n (r, phi) grid.
CapNormalization normalize_cap(const CapSpec& c, int samples = 64);

struct DyadicCapAsymptotics {
    double exact = 0.0;
    double asymptote = 0.0;  // 3 pi s^2 4^k (1 - cos eps)
    double ratio = 0.0;      // exact / asymptote, NaN when both vanish
    double log_term = 0.0;   // ln((2^{k+1} + sqrt(4^{k+1} - 1)) / (2^k + sqrt(4^k - 1)))
};

DyadicCapAsymptotics dyadic_cap_asymptotics(double s, int k, double eps);

struct BallCertificate {
    double t = 0.0;
    double measure = 0.0;
    double max_radius = 0.0;
    double max_first = 0.0;
    double max_transverse = 0.0;
    double first_bound = 0.0;      // 4^{k+1} s (1 - cos eps) + 4 s
    double transverse_bound = 0.0;  // 2^{k+1} s sin eps
    double scale = 0.0;             // s + measure / s + sqrt(measure)
    double constant = 0.0;          // max_radius / scale
    bool pass = false;
};

// Calibrated constant of the bounded-ball estimate: every sampled case satisfies max_radius <= C * scale.
inline constexpr double ball_constant = 4.0;

// Image of a dyadic cap under L^{-t}, t = sqrt(1 - 4^{-(k+1)}), sampled on an n x n (r, phi) grid.
BallCertificate bounded_ball_certificate(double s, int k, double eps, int samples = 64);

struct InvarianceOptions {
    double rel_tol = 1e-10;
    int polar_panels = 8;    // Gauss-Legendre panels in cos(theta), 30 nodes each
    int azimuth_nodes = 128;  // trapezoid in the azimuth
};

struct InvarianceReport {
    double lhs = 0.0, rhs = 0.0;
    double rel_err = 0.0;
    double quad_err = 0.0;  // outer error estimate plus angular half-resolution difference
    bool converged = false;
};

// Integral of f over both sheets of the unit one-sheeted hyperboloid, in the chart u = psi_1(r).
double hyperboloid_integral(const std::function<double(const SpaceTimePoint&)>& f, const InvarianceOptions& opt,
                            double* error = nullptr);

// Compares the integrals of f and f o L over both sheets.
InvarianceReport lorentz_invariance_check(const std::function<double(const SpaceTimePoint&)>& f, const Mat4& L,
                                          const InvarianceOptions& opt = {});

// Smooth rapidly decaying test function exp(-|p - c|^2 / w^2) in Euclidean R^4.
std::function<double(const SpaceTimePoint&)> gaussian_test(const SpaceTimePoint& center, double width);

}  // namespace hyperext
