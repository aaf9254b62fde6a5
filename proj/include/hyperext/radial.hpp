#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "hyperext/common.hpp"

namespace hyperext {

using cplx = std::complex<double>;

struct MassParam {
    double s = 1.0;

    MassParam() = default;
    explicit MassParam(double s_) : s(s_) { require(s_ >= 0.0 && std::isfinite(s_), "mass parameter s must be >= 0"); }

    // psi_s(r) = sqrt(r^2 - s^2), r >= s. Factored to stay accurate near r = s.
    double psi(double r) const {
        require(r >= s, "psi_s needs r >= s");
        return std::sqrt((r - s) * (r + s));
    }
    // phi_s(t) = sqrt(t^2 + s^2).
    double phi(double t) const { return std::hypot(t, s); }
    // d phi / dt
    double dphi(double t) const {
        double p = phi(t);
        return p > 0.0 ? t / p : 1.0;
    }
};

inline double abs2(double v) { return v * v; }
inline double abs2(const cplx& v) { return std::norm(v); }
inline double real_part(double v) { return v; }
inline double real_part(const cplx& v) { return v.real(); }
inline double conj_of(double v) { return v; }
inline cplx conj_of(const cplx& v) { return std::conj(v); }

enum class Interp { linear, step };

// Piecewise polynomial of degree <= 2 in the chart variable u, zero outside [knots.front(), knots.back()].
// On cell i the value is c[i][0] + c[i][1] t + c[i][2] t^2 with t = u - knots[i].
template <class T>
struct PiecewisePoly {
    std::vector<double> knots;
    std::vector<std::array<T, 3>> c;

    std::size_t cells() const { return c.size(); }
    double lo() const { return knots.front(); }
    double hi() const { return knots.back(); }
    bool empty() const { return c.empty(); }

    // Index of the cell containing u (clamped); caller checks the support.
    std::size_t cell_of(double u) const {
        auto it = std::upper_bound(knots.begin(), knots.end(), u);
        std::size_t i = it == knots.begin() ? 0 : static_cast<std::size_t>(it - knots.begin()) - 1;
        return std::min(i, c.size() - 1);
    }

    T operator()(double u) const {
        if (c.empty() || u < lo() || u > hi()) return T{};
        std::size_t i = cell_of(u);
        double t = u - knots[i];
        return c[i][0] + t * (c[i][1] + t * c[i][2]);
    }
};

// Radial function on H^3_s sampled at radii r_0 < ... < r_N (all >= s), interpolated linearly in
// u = psi_s(r) (or piecewise constant with Interp::step, where the last value is unused).
template <class T>
class RadialProfile {
public:
    RadialProfile() = default;

    RadialProfile(MassParam m, std::vector<double> radii, std::vector<T> values, Interp mode = Interp::linear)
        : m_(m), r_(std::move(radii)), v_(std::move(values)), mode_(mode) {
        require(r_.size() >= 2 && r_.size() == v_.size(), "profile needs >= 2 nodes with matching values");
        u_.resize(r_.size());
        for (std::size_t i = 0; i < r_.size(); ++i) {
            require(std::isfinite(r_[i]) && r_[i] >= m_.s, "profile radii must be finite and >= s");
            require(std::isfinite(std::abs(v_[i])), "profile values must be finite");
            if (i > 0) require(r_[i] > r_[i - 1], "profile radii must be strictly increasing");
            u_[i] = m_.psi(r_[i]);
        }
    }

    // Nodes given in the chart variable u >= 0.
    static RadialProfile from_chart(MassParam m, const std::vector<double>& u, std::vector<T> values,
                                    Interp mode = Interp::linear) {
        std::vector<double> r(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) r[i] = m.phi(u[i]);
        RadialProfile p(m, std::move(r), std::move(values), mode);
        p.u_ = u;  // exact chart nodes, no round trip
        return p;
    }

    // Uniform chart grid on [u_lo, u_hi] with n cells, values from f(r).
    static RadialProfile sample_uniform_chart(MassParam m, double u_lo, double u_hi, std::size_t n,
                                              const std::function<T(double)>& f, Interp mode = Interp::linear) {
        require(n >= 1 && u_hi > u_lo && u_lo >= 0.0, "bad chart grid");
        std::vector<double> u(n + 1);
        std::vector<T> v(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            u[i] = i == n ? u_hi : u_lo + (u_hi - u_lo) * static_cast<double>(i) / static_cast<double>(n);
            v[i] = f(m.phi(u[i]));
        }
        return from_chart(m, u, std::move(v), mode);
    }

    const MassParam& mass() const { return m_; }
    double s() const { return m_.s; }
    const std::vector<double>& radii() const { return r_; }
    const std::vector<double>& chart() const { return u_; }
    const std::vector<T>& values() const { return v_; }
    Interp mode() const { return mode_; }
    std::size_t size() const { return r_.size(); }

    // Value at radius r (zero outside the grid).
    T operator()(double r) const {
        if (r < m_.s) return T{};
        return at_chart(m_.psi(r));
    }

    T at_chart(double u) const {
        if (u < u_.front() || u > u_.back()) return T{};
        auto it = std::upper_bound(u_.begin(), u_.end(), u);
        std::size_t i = it == u_.begin() ? 0 : static_cast<std::size_t>(it - u_.begin()) - 1;
        if (i + 1 >= u_.size()) return mode_ == Interp::step ? v_[u_.size() - 2] : v_.back();
        if (mode_ == Interp::step) return v_[i];
        double w = (u - u_[i]) / (u_[i + 1] - u_[i]);
        return v_[i] + w * (v_[i + 1] - v_[i]);
    }

    PiecewisePoly<T> poly() const {
        PiecewisePoly<T> p;
        p.knots = u_;
        p.c.resize(u_.size() - 1);
        for (std::size_t i = 0; i + 1 < u_.size(); ++i) {
            T slope = mode_ == Interp::step ? T{} : (v_[i + 1] - v_[i]) / (u_[i + 1] - u_[i]);
            p.c[i] = {v_[i], slope, T{}};
        }
        return p;
    }

    // |F|^2 as an exact degree-2 piecewise polynomial.
    PiecewisePoly<double> abs2_poly() const {
        PiecewisePoly<T> q = poly();
        PiecewisePoly<double> p;
        p.knots = q.knots;
        p.c.resize(q.c.size());
        for (std::size_t i = 0; i < q.c.size(); ++i) {
            const T a = q.c[i][0], b = q.c[i][1];
            p.c[i] = {abs2(a), 2.0 * real_part(a * conj_of(b)), abs2(b)};
        }
        return p;
    }

    RadialProfile scaled(T factor) const {
        RadialProfile p = *this;
        for (auto& v : p.v_) v *= factor;
        return p;
    }

    RadialProfile<double> modulus() const {
        std::vector<double> v(v_.size());
        for (std::size_t i = 0; i < v_.size(); ++i) v[i] = std::abs(v_[i]);
        return RadialProfile<double>::from_chart(m_, u_, std::move(v), mode_);
    }

private:
    MassParam m_{};
    std::vector<double> r_, u_;
    std::vector<T> v_;
    Interp mode_ = Interp::linear;
};

using Profile = RadialProfile<double>;
using CProfile = RadialProfile<cplx>;

}  // namespace hyperext
