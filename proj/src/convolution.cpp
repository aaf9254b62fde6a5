#include "hyperext/convolution.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <bit>
#include <cstring>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace hyperext {

double sphere_pair_kernel(double R, double R2, double x) {
    require(R > 0.0 && R2 > 0.0, "sphere radii must be positive");
    require(x > 0.0, "sphere_pair_kernel is singular at x <= 0");
    if (x < std::abs(R - R2) || x > R + R2) return 0.0;
    return two_pi / x;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = a;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i)
        v[i] = i + 1 == n ? b : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    return v;
}

Field make_grid(std::vector<double> rho, std::vector<double> tau) {
    Field h;
    h.rho = std::move(rho);
    h.tau = std::move(tau);
    h.values.assign(h.rho.size() * h.tau.size(), 0.0);
    return h;
}

template <class T>
Conv2DField<T> evaluate_field(const slice::Source<T>& src, const std::vector<double>& rho,
                              const std::vector<double>& tau) {
    for (double r : rho) require(r >= 0.0, "rho grid must be nonnegative");
    Conv2DField<T> h;
    h.rho = rho;
    h.tau = tau;
    h.values.assign(rho.size() * tau.size(), T{});
    parallel_for(tau.size(), [&](std::size_t j) {
        auto row = slice::build_row(src, tau[j]);
        for (std::size_t i = 0; i < rho.size(); ++i) h.at(i, j) = slice::field_value(row, rho[i]);
    });
    return h;
}

template <class T>
Conv2DField<T> hyperbolic_conv(const RadialProfile<T>& f, const RadialProfile<T>& g, const std::vector<double>& rho,
                               const std::vector<double>& tau) {
    return evaluate_field(slice::self_source(f, g), rho, tau);
}

template <class T>
Conv2DField<T> cross_conv(const RadialProfile<T>& f_plus, const RadialProfile<T>& f_minus,
                          const std::vector<double>& rho, const std::vector<double>& tau) {
    return evaluate_field(slice::cross_source(f_plus, f_minus), rho, tau);
}

namespace {

int inner_order(int level) {
    static constexpr int orders[] = {4, 6, 8, 10};
    return orders[std::min(level, 3)];
}

// Adaptive outer integration in tau: each level halves the base panels and raises the inner order;
// the difference between consecutive levels is the error estimate.
template <class RowFn>
IntegralReport integrate_rows(const std::vector<double>& breaks, const RowFn& row_value, const EngineOptions& opt) {
    IntegralReport rep;
    if (breaks.size() < 2) {
        rep.converged = true;
        return rep;
    }
    double prev = 0.0;
    for (int level = 0; level <= opt.max_level; ++level) {
        const GLRule& gl = gauss_legendre(opt.tau_order);
        const std::size_t split = std::size_t{1} << level;
        const std::size_t panels = (breaks.size() - 1) * split;
        const std::size_t nodes = panels * gl.x.size();
        std::vector<double> vals(nodes, 0.0);
        const int order = inner_order(level);
        parallel_for(panels, [&](std::size_t p) {
            const std::size_t b = p / split, k = p % split;
            const double w0 = breaks[b + 1] - breaks[b];
            const double a = breaks[b] + w0 * static_cast<double>(k) / static_cast<double>(split);
            const double w = w0 / static_cast<double>(split);
            for (std::size_t q = 0; q < gl.x.size(); ++q)
                vals[p * gl.x.size() + q] = w * gl.w[q] * row_value(a + w * gl.x[q], order);
        });
        double total = 0.0;
        for (double v : vals) total += v;
        rep.rows += nodes;
        rep.value = total;
        rep.level = level;
        if (!std::isfinite(total)) throw ConvergenceError("non-finite value in field functional");
        if (level > 0) {
            rep.error = std::abs(total - prev);
            if (rep.error <= std::max(opt.rel_tol * std::abs(total), opt.abs_tol)) {
                rep.converged = true;
                return rep;
            }
        }
        prev = total;
    }
    if (opt.throw_on_failure)
        throw ConvergenceError("field functional did not reach tolerance at max level");
    return rep;
}

template <class T, class Phi>
IntegralReport single_field(const slice::Source<T>& src, const Phi& phi, const EngineOptions& opt) {
    if (src.empty()) return IntegralReport{0.0, 0.0, true, 0, 0};
    auto breaks = slice::tau_breaks(src, static_cast<const slice::Source<T>*>(nullptr), opt.max_panel);
    const bool fast = opt.fast_path && src.symmetric && src.kind == slice::Kind::self;
    auto row_value = [&](double tau, int order) {
        auto row = slice::build_row(src, tau);
        if (fast) {
            return slice::rho_integral_symmetric(row, [&](double rho, const T& g) { return phi(rho, tau, g); }, order);
        }
        return slice::rho_integral_pair<T>(
            &row, nullptr, [&](double rho, const T& g, const T&) { return phi(rho, tau, g); }, order);
    };
    return integrate_rows(breaks, row_value, opt);
}

template <class T, class Phi>
IntegralReport pair_field(const slice::Source<T>& a, const slice::Source<T>& b, const Phi& phi,
                          const EngineOptions& opt) {
    if (a.empty() && b.empty()) return IntegralReport{0.0, 0.0, true, 0, 0};
    auto breaks = slice::tau_breaks(a, &b, opt.max_panel);
    auto row_value = [&](double tau, int order) {
        auto ra = slice::build_row(a, tau);
        auto rb = slice::build_row(b, tau);
        return slice::rho_integral_pair<T>(
            &ra, &rb, [&](double rho, const T& ga, const T& gb) { return phi(rho, tau, ga, gb); }, order);
    };
    return integrate_rows(breaks, row_value, opt);
}

IntegralReport scale(IntegralReport r, double c) {
    r.value *= c;
    r.error *= std::abs(c);
    return r;
}

}  // namespace

template <class T>
IntegralReport conv_norm2(const slice::Source<T>& src, const EngineOptions& opt) {
    auto phi = [](double, double, const T& g) { return abs2(g); };
    return scale(single_field(src, phi, opt), 16.0 * pi * pi * pi);
}

template <class T>
IntegralReport conv_mass(const slice::Source<T>& src, const EngineOptions& opt) {
    auto phi = [](double rho, double, const T& g) { return rho * real_part(g); };
    return scale(single_field(src, phi, opt), 8.0 * pi * pi);
}

template <class T>
IntegralReport conv_inner(const slice::Source<T>& a, const slice::Source<T>& b, const EngineOptions& opt) {
    auto phi = [](double, double, const T& ga, const T& gb) { return real_part(ga * conj_of(gb)); };
    return scale(pair_field(a, b, phi, opt), 16.0 * pi * pi * pi);
}

template <class T>
IntegralReport conv_distance2(const slice::Source<T>& a, const slice::Source<T>& b, const EngineOptions& opt) {
    auto phi = [](double, double, const T& ga, const T& gb) { return abs2(ga - gb); };
    return scale(pair_field(a, b, phi, opt), 16.0 * pi * pi * pi);
}

namespace {

template <class F>
double cell_quad(const F& f, double a, double b) {
    if (!(b > a)) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, 1e-14);
}

}  // namespace

template <class T>
T profile_integral(const RadialProfile<T>& f) {
    const auto& u = f.chart();
    const MassParam m = f.mass();
    auto poly = f.poly();
    T acc{};
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const auto c = poly.c[i];
        auto re = [&](double x) { return real_part(c[0] + (x - u[i]) * c[1]) * m.phi(x); };
        if constexpr (std::is_same_v<T, double>) {
            acc += cell_quad(re, u[i], u[i + 1]);
        } else {
            auto imf = [&](double x) { return std::imag(c[0] + (x - u[i]) * c[1]) * m.phi(x); };
            acc += T{cell_quad(re, u[i], u[i + 1]), cell_quad(imf, u[i], u[i + 1])};
        }
    }
    return 4.0 * pi * acc;
}

template <class T>
double lp_norm(const RadialProfile<T>& f, double p) {
    require(p >= 1.0 && std::isfinite(p), "lp_norm needs p >= 1");
    const auto& u = f.chart();
    const MassParam m = f.mass();
    auto poly = f.poly();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const auto c = poly.c[i];
        auto integrand = [&](double x) { return std::pow(std::abs(c[0] + (x - u[i]) * c[1]), p) * m.phi(x); };
        double a = u[i], b = u[i + 1];
        std::vector<double> cuts{a, b};
        if constexpr (std::is_same_v<T, double>) {
            if (c[1] != 0.0) {
                double z = u[i] - c[0] / c[1];
                if (z > a && z < b) cuts.insert(cuts.begin() + 1, z);
            }
        }
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) acc += cell_quad(integrand, cuts[k], cuts[k + 1]);
    }
    if (acc == 0.0) return 0.0;
    return std::pow(4.0 * pi * acc, 1.0 / p);
}

namespace {

double trapezoid_norm2(const Field& h, std::size_t stride) {
    const std::size_t nr = h.rho.size(), nt = h.tau.size();
    std::vector<std::size_t> ri, ti;
    for (std::size_t i = 0; i < nr; i += stride) ri.push_back(i);
    if (ri.back() != nr - 1) ri.push_back(nr - 1);
    for (std::size_t j = 0; j < nt; j += stride) ti.push_back(j);
    if (ti.back() != nt - 1) ti.push_back(nt - 1);
    auto weights = [](const std::vector<double>& grid, const std::vector<std::size_t>& idx) {
        std::vector<double> w(idx.size(), 0.0);
        for (std::size_t k = 0; k + 1 < idx.size(); ++k) {
            double d = grid[idx[k + 1]] - grid[idx[k]];
            w[k] += 0.5 * d;
            w[k + 1] += 0.5 * d;
        }
        return w;
    };
    auto wr = weights(h.rho, ri), wt = weights(h.tau, ti);
    double acc = 0.0;
    for (std::size_t b = 0; b < ti.size(); ++b) {
        double row = 0.0;
        for (std::size_t a = 0; a < ri.size(); ++a) {
            double rho = h.rho[ri[a]];
            if (rho == 0.0) continue;
            double v = h.at(ri[a], ti[b]);
            row += wr[a] * v * v * 4.0 * pi * rho * rho;
        }
        acc += wt[b] * row;
    }
    return acc;
}

}  // namespace

FieldNorm l2_field_norm(const Field& h) {
    FieldNorm out;
    if (h.rho.size() < 2 || h.tau.size() < 2) return out;
    double fine = trapezoid_norm2(h, 1);
    double coarse = trapezoid_norm2(h, 2);
    out.value = std::sqrt(std::max(fine, 0.0));
    double err2 = std::abs(fine - coarse) / 3.0;
    out.error = out.value > 0.0 ? err2 / (2.0 * out.value) : std::sqrt(err2);
    const std::size_t nr = h.rho.size(), nt = h.tau.size();
    for (std::size_t j = 0; j < nt && !out.touches_boundary; ++j)
        if (h.at(nr - 1, j) != 0.0) out.touches_boundary = true;
    for (std::size_t i = 0; i < nr && !out.touches_boundary; ++i)
        if (h.at(i, nt - 1) != 0.0 || (h.tau.front() > 0.0 && h.at(i, 0) != 0.0)) out.touches_boundary = true;
    return out;
}

namespace {

double bump1(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - x * x));
}

}  // namespace

double Bump::operator()(double rho, double tau) const {
    double xr = (rho - rho0) / w_rho, xt = (tau - tau0) / w_tau;
    double v = bump1(xr) * bump1(xt);
    return odd ? v * xt : v;
}

namespace {

struct ChunkStats {
    double sum = 0.0, sum2 = 0.0;
};

template <class Draw>
MonteCarloEstimate run_chunks(std::size_t samples, std::uint64_t seed, const Draw& draw) {
    MonteCarloEstimate out;
    out.samples = samples;
    if (samples == 0) return out;
    constexpr std::size_t chunk = 1u << 15;
    const std::size_t chunks = (samples + chunk - 1) / chunk;
    std::vector<ChunkStats> stats(chunks);
    parallel_for(chunks, [&](std::size_t c) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const std::size_t n = std::min(chunk, samples - c * chunk);
        ChunkStats st;
        for (std::size_t k = 0; k < n; ++k) {
            double w = draw(rng, unif);
            st.sum += w;
            st.sum2 += w * w;
        }
        stats[c] = st;
    });
    double sum = 0.0, sum2 = 0.0;
    for (const auto& st : stats) {
        sum += st.sum;
        sum2 += st.sum2;
    }
    const double n = static_cast<double>(samples);
    out.estimate = sum / n;
    double var = std::max(0.0, sum2 / n - out.estimate * out.estimate);
    out.std_error = std::sqrt(var / std::max(1.0, n - 1.0));
    return out;
}

}  // namespace

MonteCarloEstimate mc_pairing_oracle(const Profile& f, const Profile& g, const Bump& bump, std::size_t samples,
                                     std::uint64_t seed, bool cross) {
    require(f.s() == g.s(), "Monte-Carlo oracle needs a shared mass parameter");
    require(bump.w_rho > 0.0 && bump.w_tau > 0.0, "bump widths must be positive");
    const MassParam m = f.mass();
    const double u0 = f.chart().front(), u1 = f.chart().back();
    const double v0 = g.chart().front(), v1 = g.chart().back();
    const double L1 = u1 - u0;
    const double rlo = std::max(0.0, bump.rho0 - bump.w_rho), rhi = bump.rho0 + bump.w_rho;
    auto draw = [&](std::mt19937_64& rng, std::uniform_real_distribution<double>& unif) -> double {
        double u = u0 + L1 * unif(rng);
        double lo, hi;
        if (cross) {
            lo = std::max(v0, u - bump.tau0 - bump.w_tau);
            hi = std::min(v1, u - bump.tau0 + bump.w_tau);
        } else {
            lo = std::max(v0, bump.tau0 - bump.w_tau - u);
            hi = std::min(v1, bump.tau0 + bump.w_tau - u);
        }
        if (!(hi > lo)) {
            unif(rng);
            unif(rng);
            return 0.0;
        }
        double v = lo + (hi - lo) * unif(rng);
        double R = m.phi(u), R2 = m.phi(v);
        double clo = std::max(-1.0, (rlo * rlo - R * R - R2 * R2) / (2.0 * R * R2));
        double chi = std::min(1.0, (rhi * rhi - R * R - R2 * R2) / (2.0 * R * R2));
        if (!(chi > clo)) {
            unif(rng);
            return 0.0;
        }
        double c = clo + (chi - clo) * unif(rng);
        double rho = std::sqrt(std::max(0.0, R * R + R2 * R2 + 2.0 * R * R2 * c));
        double tau = cross ? u - v : u + v;
        double w = 16.0 * pi * pi * R * R2 * f.at_chart(u) * g.at_chart(v) * bump(rho, tau);
        return w * L1 * (hi - lo) * 0.5 * (chi - clo);
    };
    return run_chunks(samples, seed, draw);
}

MonteCarloEstimate mc_sphere_pair(double R, double R2, double rho0, double w_rho, std::size_t samples,
                                  std::uint64_t seed) {
    require(R > 0.0 && R2 > 0.0 && w_rho > 0.0, "bad sphere-pair Monte-Carlo arguments");
    const double rlo = std::max(0.0, rho0 - w_rho), rhi = rho0 + w_rho;
    const double clo = std::max(-1.0, (rlo * rlo - R * R - R2 * R2) / (2.0 * R * R2));
    const double chi = std::min(1.0, (rhi * rhi - R * R - R2 * R2) / (2.0 * R * R2));
    if (!(chi > clo)) return MonteCarloEstimate{0.0, 0.0, samples};
    auto draw = [&](std::mt19937_64& rng, std::uniform_real_distribution<double>& unif) -> double {
        double c = clo + (chi - clo) * unif(rng);
        double rho = std::sqrt(std::max(0.0, R * R + R2 * R2 + 2.0 * R * R2 * c));
        return 16.0 * pi * pi * R * R2 * bump1((rho - rho0) / w_rho) * 0.5 * (chi - clo);
    };
    return run_chunks(samples, seed, draw);
}

double bump_pairing(const std::function<double(double, double)>& h, const Bump& bump,
                    const std::function<std::vector<double>(double)>& rho_breaks) {
    boost::math::quadrature::tanh_sinh<double> ts(12);
    const double rlo = std::max(0.0, bump.rho0 - bump.w_rho), rhi = bump.rho0 + bump.w_rho;
    auto inner = [&](double tau) {
        std::vector<double> cuts{rlo, rhi};
        for (double b : rho_breaks(tau))
            if (b > rlo && b < rhi) cuts.push_back(b);
        std::sort(cuts.begin(), cuts.end());
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
            if (!(cuts[k + 1] > cuts[k])) continue;
            auto f = [&](double rho) { return h(rho, tau) * bump(rho, tau) * 4.0 * pi * rho * rho; };
            acc += ts.integrate(f, cuts[k], cuts[k + 1], 1e-12);
        }
        return acc;
    };
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(inner, bump.tau0 - bump.w_tau,
                                                                          bump.tau0 + bump.w_tau, 10, 1e-11);
}

void write_field_csv(const Field& h, std::ostream& os) {
    os << "rho,tau,value\n";
    os << std::setprecision(17);
    for (std::size_t j = 0; j < h.tau.size(); ++j)
        for (std::size_t i = 0; i < h.rho.size(); ++i) os << h.rho[i] << ',' << h.tau[j] << ',' << h.at(i, j) << '\n';
}

Field read_field_csv(std::istream& is) {
    std::string line;
    std::getline(is, line);
    require(line.rfind("rho,tau,value", 0) == 0, "field CSV must start with header rho,tau,value");
    std::vector<double> rs, ts, vs;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        double r, t, v;
        char c1, c2;
        require(static_cast<bool>(ls >> r >> c1 >> t >> c2 >> v), "malformed field CSV line");
        rs.push_back(r);
        ts.push_back(t);
        vs.push_back(v);
    }
    Field h;
    for (std::size_t k = 0; k < rs.size(); ++k) {
        if (k > 0 && ts[k] != ts[0]) break;
        h.rho.push_back(rs[k]);
    }
    require(!h.rho.empty() && rs.size() % h.rho.size() == 0, "field CSV is not a rectangular grid");
    for (std::size_t k = 0; k < rs.size(); k += h.rho.size()) h.tau.push_back(ts[k]);
    h.values = vs;
    return h;
}

namespace {

template <class U>
void put_le(std::ostream& os, U v) {
    static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
    unsigned char b[sizeof(U)];
    std::memcpy(b, &v, sizeof(U));
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(U));
    os.write(reinterpret_cast<const char*>(b), sizeof(U));
}

template <class U>
U get_le(std::istream& is) {
    unsigned char b[sizeof(U)];
    is.read(reinterpret_cast<char*>(b), sizeof(U));
    require(static_cast<bool>(is), "truncated binary field");
    if constexpr (std::endian::native == std::endian::big) std::reverse(b, b + sizeof(U));
    U v;
    std::memcpy(&v, b, sizeof(U));
    return v;
}

}  // namespace

void write_field_binary(const Field& h, std::ostream& os) {
    os.write("H3CF", 4);
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(h.rho.size()));
    put_le<std::uint32_t>(os, static_cast<std::uint32_t>(h.tau.size()));
    for (double r : h.rho) put_le<double>(os, r);
    for (double t : h.tau) put_le<double>(os, t);
    for (double v : h.values) put_le<double>(os, v);
}

Field read_field_binary(std::istream& is) {
    char magic[4];
    is.read(magic, 4);
    require(static_cast<bool>(is) && std::memcmp(magic, "H3CF", 4) == 0, "binary field must start with H3CF");
    Field h;
    const auto nr = get_le<std::uint32_t>(is), nt = get_le<std::uint32_t>(is);
    h.rho.resize(nr);
    h.tau.resize(nt);
    for (auto& r : h.rho) r = get_le<double>(is);
    for (auto& t : h.tau) t = get_le<double>(is);
    h.values.resize(static_cast<std::size_t>(nr) * nt);
    for (auto& v : h.values) v = get_le<double>(is);
    return h;
}

#define HYPEREXT_INSTANTIATE(T)                                                                                  \
    template Conv2DField<T> evaluate_field<T>(const slice::Source<T>&, const std::vector<double>&,             \
                                              const std::vector<double>&);                                     \
    template Conv2DField<T> hyperbolic_conv<T>(const RadialProfile<T>&, const RadialProfile<T>&,               \
                                               const std::vector<double>&, const std::vector<double>&);        \
    template Conv2DField<T> cross_conv<T>(const RadialProfile<T>&, const RadialProfile<T>&,                    \
                                          const std::vector<double>&, const std::vector<double>&);             \
    template IntegralReport conv_norm2<T>(const slice::Source<T>&, const EngineOptions&);                      \
    template IntegralReport conv_mass<T>(const slice::Source<T>&, const EngineOptions&);                       \
    template IntegralReport conv_inner<T>(const slice::Source<T>&, const slice::Source<T>&,                    \
                                          const EngineOptions&);                                               \
    template IntegralReport conv_distance2<T>(const slice::Source<T>&, const slice::Source<T>&,                \
                                              const EngineOptions&);                                           \
    template T profile_integral<T>(const RadialProfile<T>&);                                                   \
    template double lp_norm<T>(const RadialProfile<T>&, double);

HYPEREXT_INSTANTIATE(double)
HYPEREXT_INSTANTIATE(cplx)

}  // namespace hyperext
