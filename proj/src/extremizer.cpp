#include "hyperext/extremizer.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "hyperext/quadrature.hpp"
#include "hyperext/slice.hpp"

namespace hyperext {

template <class T>
QReport q_ratio(const RadialProfile<T>& f, const EngineOptions& opt) {
    const double n2 = std::pow(lp_norm(f, 2.0), 2);
    require(n2 > 0.0, "Q needs a nonzero profile");
    const IntegralReport num = conv_norm2(slice::self_source(f, f), opt);
    QReport r;
    r.numerator = num.value;
    r.norm2 = n2;
    r.value = num.value / (n2 * n2);
    r.quad_error = num.error / (n2 * n2);
    r.converged = num.converged;
    double vmax = 0.0;
    for (const auto& v : f.values()) vmax = std::max(vmax, std::abs(v));
    r.boundary_value = std::abs(f.values().back()) / vmax;
    return r;
}

template QReport q_ratio(const Profile&, const EngineOptions&);
template QReport q_ratio(const CProfile&, const EngineOptions&);

double extension_ratio(double q) { return two_pi * std::pow(q, 0.25); }

// ---------------------------------------------------------------------------------------------

QuarticFunctional::QuarticFunctional(MassParam m, double u_max, std::size_t cells, int tau_order, int z_order)
    : m_(m), u_max_(u_max), cells_(cells) {
    require(u_max > 0.0 && std::isfinite(u_max), "quartic functional needs u_max > 0");
    require(cells >= 2, "quartic functional needs at least two cells");
    du_ = u_max / static_cast<double>(cells);
    u_.resize(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) u_[k] = k == cells ? u_max : du_ * static_cast<double>(k);
    const GLRule& tr = gauss_legendre(tau_order);
    tx_ = tr.x;
    tw_ = tr.w;
    const GLRule& zr = gauss_legendre(z_order);
    zx_ = zr.x;
    zw_ = zr.w;
    const std::size_t m_z = zx_.size();
    auto lagrange = [&](std::size_t k, double t) {
        double p = 1.0;
        for (std::size_t j = 0; j < m_z; ++j)
            if (j != k) p *= (t - zx_[j]) / (zx_[k] - zx_[j]);
        return p;
    };
    zint_.assign(m_z, std::vector<double>(m_z, 0.0));
    for (std::size_t q = 0; q < m_z; ++q)
        for (std::size_t k = 0; k < m_z; ++k) {
            double acc = 0.0;
            for (std::size_t r = 0; r < m_z; ++r) acc += zw_[r] * lagrange(k, zx_[q] * zx_[r]);
            zint_[q][k] = zx_[q] * acc;
        }
    const GLRule& mr = gauss_legendre(6);
    mx_ = mr.x;
    mw_ = mr.w;
    lumped_.assign(cells + 1, 0.0);
    for (std::size_t k = 0; k < cells; ++k)
        for (std::size_t q = 0; q < mx_.size(); ++q) {
            const double t = mx_[q], w = 4.0 * pi * du_ * mw_[q] * m_.phi(u_[k] + du_ * t);
            lumped_[k] += w * (1.0 - t);
            lumped_[k + 1] += w * t;
        }
}

double QuarticFunctional::row(double tau, const std::vector<double>& v, std::vector<double>* grad,
                              double weight) const {
    const double c = 0.5 * tau;
    const double zmax = std::min(c, u_max_ - c);
    if (!(zmax > 0.0)) return 0.0;
    const double eps = 1e-13 * u_max_;
    std::vector<double> zb{0.0, zmax};
    {
        const long k0 = static_cast<long>(std::ceil((c - zmax) / du_));
        const long k1 = static_cast<long>(std::floor((c + zmax) / du_));
        for (long k = std::max(0L, k0); k <= std::min<long>(k1, static_cast<long>(cells_)); ++k) {
            const double d = std::abs(u_[static_cast<std::size_t>(k)] - c);
            if (d > eps && d < zmax - eps) zb.push_back(d);
        }
    }
    std::sort(zb.begin(), zb.end());
    zb.erase(std::unique(zb.begin(), zb.end(), [&](double a, double b) { return b - a <= eps; }), zb.end());

    const std::size_t m_z = zx_.size(), pieces = zb.size() - 1, n_nodes = pieces * m_z;
    struct Node {
        double P, S, D, w, Fp, Fm, tp, tm, A0, A1;
        std::size_t kp, km;
    };
    std::vector<Node> nd(n_nodes);
    auto cell_of = [&](double x) {
        long k = static_cast<long>(std::floor(x / du_));
        return static_cast<std::size_t>(std::clamp<long>(k, 0, static_cast<long>(cells_) - 1));
    };
    double total = 0.0, A0run = 0.0, A1run = 0.0;
    for (std::size_t p = 0; p < pieces; ++p) {
        const double za = zb[p], h = zb[p + 1] - zb[p], zmid = za + 0.5 * h;
        const std::size_t kp = cell_of(c + zmid), km = cell_of(c - zmid);
        Node* row = &nd[p * m_z];
        for (std::size_t q = 0; q < m_z; ++q) {
            Node& n = row[q];
            const double z = za + h * zx_[q], xp = c + z, xm = c - z;
            n.kp = kp;
            n.km = km;
            n.tp = (xp - u_[kp]) / du_;
            n.tm = (xm - u_[km]) / du_;
            n.Fp = v[kp] + n.tp * (v[kp + 1] - v[kp]);
            n.Fm = v[km] + n.tm * (v[km + 1] - v[km]);
            n.P = n.Fp * n.Fm;
            const double pp = m_.phi(xp), pm = m_.phi(xm);
            n.S = pp + pm;
            n.D = pp - pm;
            n.w = h * zw_[q];
        }
        for (std::size_t q = 0; q < m_z; ++q) {
            double a0 = 0.0, a1 = 0.0;
            for (std::size_t k = 0; k < m_z; ++k) {
                a0 += zint_[q][k] * row[k].P;
                a1 += zint_[q][k] * row[k].S * row[k].P;
            }
            row[q].A0 = A0run + h * a0;
            row[q].A1 = A1run + h * a1;
            total += row[q].w * row[q].P * (row[q].A1 - row[q].D * row[q].A0);
        }
        for (std::size_t q = 0; q < m_z; ++q) {
            A0run += row[q].w * row[q].P;
            A1run += row[q].w * row[q].S * row[q].P;
        }
    }
    if (grad) {
        std::vector<double>& g = *grad;
        double T0 = 0.0, T1 = 0.0;
        for (std::size_t p = pieces; p-- > 0;) {
            const double h = zb[p + 1] - zb[p];
            Node* row = &nd[p * m_z];
            for (std::size_t j = 0; j < m_z; ++j) {
                double r0 = 0.0, r1 = 0.0;
                for (std::size_t q = 0; q < m_z; ++q) {
                    const double wp = row[q].w * row[q].P;
                    r0 += zint_[q][j] * wp;
                    r1 += zint_[q][j] * wp * row[q].D;
                }
                const Node& n = row[j];
                const double R0 = n.w * T0 + h * r0, R1 = n.w * T1 + h * r1;
                const double dP = 8.0 * weight * (n.w * (n.A1 - n.D * n.A0) + n.S * R0 - R1);
                g[n.kp] += dP * (1.0 - n.tp) * n.Fm;
                g[n.kp + 1] += dP * n.tp * n.Fm;
                g[n.km] += dP * (1.0 - n.tm) * n.Fp;
                g[n.km + 1] += dP * n.tm * n.Fp;
            }
            for (std::size_t q = 0; q < m_z; ++q) {
                T0 += row[q].w * row[q].P;
                T1 += row[q].w * row[q].P * row[q].D;
            }
        }
    }
    return 8.0 * total;
}

double QuarticFunctional::numerator(const std::vector<double>& v, std::vector<double>* grad) const {
    require(v.size() == nodes(), "profile vector does not match the grid");
    const std::size_t panels = 2 * cells_;
    // Fixed chunking keeps the summation order, and so the result, independent of the thread count.
    const std::size_t chunks = std::min<std::size_t>(panels, 32);
    std::vector<double> part(chunks, 0.0);
    std::vector<std::vector<double>> gpart(grad ? chunks : 0, std::vector<double>(nodes(), 0.0));
    const double c16 = 16.0 * pi * pi * pi;
    parallel_for(chunks, [&](std::size_t ch) {
        double acc = 0.0;
        for (std::size_t p = ch; p < panels; p += chunks) {
            const double a = du_ * static_cast<double>(p);
            for (std::size_t q = 0; q < tx_.size(); ++q) {
                const double w = c16 * du_ * tw_[q];
                acc += w * row(a + du_ * tx_[q], v, grad ? &gpart[ch] : nullptr, w);
            }
        }
        part[ch] = acc;
    });
    if (grad) {
        grad->assign(nodes(), 0.0);
        for (const auto& gp : gpart)
            for (std::size_t k = 0; k < nodes(); ++k) (*grad)[k] += gp[k];
    }
    return std::accumulate(part.begin(), part.end(), 0.0);
}

double QuarticFunctional::norm2(const std::vector<double>& v, std::vector<double>* grad) const {
    require(v.size() == nodes(), "profile vector does not match the grid");
    if (grad) grad->assign(nodes(), 0.0);
    double acc = 0.0;
    for (std::size_t k = 0; k < cells_; ++k)
        for (std::size_t q = 0; q < mx_.size(); ++q) {
            const double t = mx_[q], w = 4.0 * pi * du_ * mw_[q] * m_.phi(u_[k] + du_ * t);
            const double F = v[k] + t * (v[k + 1] - v[k]);
            acc += w * F * F;
            if (grad) {
                (*grad)[k] += 2.0 * w * F * (1.0 - t);
                (*grad)[k + 1] += 2.0 * w * F * t;
            }
        }
    return acc;
}

double QuarticFunctional::q(const std::vector<double>& v, std::vector<double>* grad) const {
    std::vector<double> gn, gm;
    const double N = numerator(v, grad ? &gn : nullptr);
    const double M = norm2(v, grad ? &gm : nullptr);
    require(M > 0.0, "Q needs a nonzero profile");
    if (grad) {
        grad->resize(nodes());
        for (std::size_t k = 0; k < nodes(); ++k) (*grad)[k] = gn[k] / (M * M) - 2.0 * N * gm[k] / (M * M * M);
    }
    return N / (M * M);
}

Profile QuarticFunctional::profile(const std::vector<double>& v) const {
    require(v.size() == nodes(), "profile vector does not match the grid");
    return Profile::from_chart(m_, u_, v);
}

std::vector<double> QuarticFunctional::sample(const std::function<double(double)>& f_of_u) const {
    std::vector<double> v(nodes());
    for (std::size_t k = 0; k < nodes(); ++k) v[k] = f_of_u(u_[k]);
    return v;
}

std::vector<double> trial_profile(const QuarticFunctional& F, double a) {
    return F.sample([a](double u) { return std::exp(-0.5 * a * u); });
}

TrialScan trial_family_scan(const QuarticFunctional& F, double a_lo, double a_hi, int count) {
    require(a_lo > 0.0 && a_hi > a_lo && count >= 3, "trial scan needs 0 < a_lo < a_hi and >= 3 points");
    TrialScan t;
    t.a.resize(static_cast<std::size_t>(count));
    t.q.resize(t.a.size());
    for (std::size_t i = 0; i < t.a.size(); ++i) {
        t.a[i] = a_lo * std::pow(a_hi / a_lo, static_cast<double>(i) / (count - 1));
        t.q[i] = F.q(trial_profile(F, t.a[i]));
    }
    const std::size_t best = static_cast<std::size_t>(std::max_element(t.q.begin(), t.q.end()) - t.q.begin());
    t.a_star = t.a[best];
    t.q_star = t.q[best];
    if (best > 0 && best + 1 < t.a.size()) {
        auto neg = [&](double a) { return -F.q(trial_profile(F, a)); };
        auto r = boost::math::tools::brent_find_minima(neg, t.a[best - 1], t.a[best + 1], 30);
        if (-r.second > t.q_star) {
            t.a_star = r.first;
            t.q_star = -r.second;
        }
    }
    return t;
}

// ---------------------------------------------------------------------------------------------

namespace {

struct Start {
    std::string name;
    std::function<double(double)> f_of_u;
};

double mass_dot(const std::vector<double>& m, const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) acc += m[k] * a[k] * b[k];
    return acc;
}

std::vector<double> prolong(const std::vector<double>& v) {
    std::vector<double> out(2 * (v.size() - 1) + 1);
    for (std::size_t k = 0; k + 1 < v.size(); ++k) {
        out[2 * k] = v[k];
        out[2 * k + 1] = 0.5 * (v[k] + v[k + 1]);
    }
    out.back() = v.back();
    return out;
}

void normalize(const QuarticFunctional& F, std::vector<double>& v) {
    const double n = std::sqrt(F.norm2(v));
    require(n > 0.0, "optimizer iterate collapsed to zero");
    for (double& x : v) x /= n;
}

// One level of projected ascent. Returns the stop reason.
std::string ascend(const QuarticFunctional& F, std::vector<double>& v, double& q, const MaximizeOptions& opt,
                   int restart, int level, std::vector<TraceEntry>& trace, int& iterations) {
    const std::vector<double>& m = F.lumped_mass();
    normalize(F, v);
    std::vector<double> g;
    q = F.q(v, &g);
    auto precondition = [&](const std::vector<double>& grad) {
        std::vector<double> d(grad.size());
        for (std::size_t k = 0; k < d.size(); ++k) {
            d[k] = grad[k] / m[k];
            if (!std::isfinite(d[k]))
                throw ConvergenceError("non-finite gradient at node " + std::to_string(k) + " (u = " +
                                       std::to_string(F.chart()[k]) + ", value " + std::to_string(v[k]) + ")");
        }
        return d;
    };
    std::vector<double> d = precondition(g);
    double alpha = 0.1 / std::max(1e-300, std::sqrt(mass_dot(m, d, d)));
    std::vector<double> prev_v, prev_d;
    std::vector<double> history;  // recent accepted values
    int failures = 0;
    for (int it = 0; it < opt.iters; ++it) {
        if (!prev_v.empty()) {
            // Barzilai-Borwein on -Q in the lumped-mass metric.
            std::vector<double> sv(v.size()), yv(v.size());
            for (std::size_t k = 0; k < v.size(); ++k) {
                sv[k] = v[k] - prev_v[k];
                yv[k] = prev_d[k] - d[k];
            }
            const double sy = mass_dot(m, sv, yv), ss = mass_dot(m, sv, sv);
            if (sy > 0.0 && std::isfinite(ss / sy)) alpha = ss / sy;
        }
        bool accepted = false;
        std::vector<double> trial(v.size());
        double q_trial = q;
        for (int bt = 0; bt < 12; ++bt) {
            for (std::size_t k = 0; k < v.size(); ++k) trial[k] = std::max(0.0, v[k] + alpha * d[k]);
            if (F.norm2(trial) > 0.0) {
                normalize(F, trial);
                q_trial = F.q(trial);
                if (q_trial > q) {
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.25;
        }
        ++iterations;
        if (!accepted) {
            if (++failures >= opt.stagnation_window) return "stagnation";
            // Restart the step size from a fraction of the gradient scale.
            alpha = 1e-3 / std::max(1e-300, std::sqrt(mass_dot(m, d, d))) * std::pow(0.5, failures);
            prev_v.clear();
            continue;
        }
        failures = 0;
        prev_v = v;
        prev_d = d;
        v = trial;
        const double gain = (q_trial - q) / q;
        q = F.q(v, &g);
        d = precondition(g);
        trace.push_back({restart, level, F.cells(), it, q, alpha, std::sqrt(mass_dot(m, d, d))});
        history.push_back(gain);
        if (history.size() >= 5) {
            double recent = 0.0;
            for (std::size_t k = history.size() - 5; k < history.size(); ++k) recent += history[k];
            if (recent < opt.rel_tol) return "converged";
        }
    }
    return "iteration cap";
}

}  // namespace

MaximizeResult maximize_radial(const MaximizeOptions& opt) {
    require(opt.grid_size >= 64, "maximize_radial needs grid_size >= 64");
    require(opt.s > 0.0 && opt.r_max > opt.s, "maximize_radial needs 0 < s < r_max");
    require(opt.restarts >= 1 && opt.iters >= 1, "maximize_radial needs restarts >= 1 and iters >= 1");
    const MassParam m(opt.s);
    const double U = m.psi(opt.r_max);
    std::vector<std::size_t> sizes{opt.grid_size};
    while (sizes.front() % 2 == 0 && sizes.front() / 2 >= opt.coarsest) sizes.insert(sizes.begin(), sizes.front() / 2);
    std::vector<QuarticFunctional> levels;
    for (std::size_t n : sizes) levels.emplace_back(m, U, n);
    const QuarticFunctional& fine = levels.back();

    MaximizeResult res;
    res.trial = trial_family_scan(fine, 0.05 / opt.s, 4.0 / opt.s, 32);

    std::vector<Start> starts;
    const double a_star = res.trial.a_star;
    starts.push_back({"trial a=" + std::to_string(a_star), [a_star](double u) { return std::exp(-0.5 * a_star * u); }});
    starts.push_back({"shell u<=" + std::to_string(U / 8.0), [U](double u) { return u <= U / 8.0 ? 1.0 : 0.0; }});
    for (int r = 2; r < opt.restarts; ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(opt.seed), static_cast<std::uint32_t>(opt.seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        std::uniform_real_distribution<double> mu_d(-1.0, 2.0), sig_d(0.5, 1.5);
        const double mu = mu_d(rng), sig = sig_d(rng);
        char name[64];
        std::snprintf(name, sizeof name, "log-normal mu=%.3f sigma=%.3f", mu, sig);
        starts.push_back({name, [mu, sig, s = opt.s](double u) {
                              const double z = (std::log(u / s + 1.0) - mu) / sig;
                              return std::exp(-0.5 * z * z);
                          }});
    }
    starts.resize(static_cast<std::size_t>(opt.restarts));

    std::vector<RestartResult> results(starts.size());
    std::vector<std::vector<double>> finals(starts.size());
    std::vector<std::vector<TraceEntry>> traces(starts.size());
    parallel_for(starts.size(), [&](std::size_t r) {
        RestartResult& rr = results[r];
        rr.start = starts[r].name;
        std::vector<double> v = levels.front().sample(starts[r].f_of_u);
        rr.q_initial = fine.q(fine.sample(starts[r].f_of_u));
        double q = 0.0;
        for (std::size_t L = 0; L < levels.size(); ++L) {
            if (L > 0) v = prolong(v);
            rr.stop_reason = ascend(levels[L], v, q, opt, static_cast<int>(r), static_cast<int>(L), traces[r],
                                    rr.iterations);
        }
        rr.q_final = q;
        finals[r] = std::move(v);
    });
    for (auto& t : traces) res.trace.insert(res.trace.end(), t.begin(), t.end());
    res.restarts = results;
    std::size_t best = 0;
    double qmin = results[0].q_final;
    for (std::size_t r = 1; r < results.size(); ++r) {
        if (results[r].q_final > results[best].q_final) best = r;
        qmin = std::min(qmin, results[r].q_final);
    }
    res.q_star = results[best].q_final;
    res.v_star = finals[best];
    res.f_star = fine.profile(res.v_star);
    res.restart_spread = (res.q_star - qmin) / res.q_star;
    res.certified = q_ratio(res.f_star);
    return res;
}

// ---------------------------------------------------------------------------------------------

template <class T>
SheetPair<double> symmetrize(const SheetPair<T>& f) {
    const auto &p = f.f_plus, &m = f.f_minus;
    require(p.s() == m.s() && p.chart() == m.chart() && p.mode() == m.mode(),
            "symmetrize needs both sheets on a common grid");
    std::vector<double> v(p.size());
    for (std::size_t k = 0; k < v.size(); ++k)
        v[k] = std::sqrt(0.5 * (abs2(p.values()[k]) + abs2(m.values()[k])));
    Profile out = Profile::from_chart(p.mass(), p.chart(), std::move(v), p.mode());
    return {out, out};
}

template SheetPair<double> symmetrize(const SheetPair<double>&);
template SheetPair<double> symmetrize(const SheetPair<cplx>&);

namespace {

template <class T>
bool all_zero(const RadialProfile<T>& f) {
    return std::all_of(f.values().begin(), f.values().end(), [](const T& v) { return v == T{}; });
}

}  // namespace

template <class T>
FullQReport full_q_ratio(const SheetPair<T>& f, const EngineOptions& opt) {
    const auto &fp = f.f_plus, &fm = f.f_minus;
    FullQReport r;
    const bool minus = !all_zero(fm), plus = !all_zero(fp);
    r.norm2 = (plus ? std::pow(lp_norm(fp, 2.0), 2) : 0.0) + (minus ? std::pow(lp_norm(fm, 2.0), 2) : 0.0);
    require(r.norm2 > 0.0, "full Q needs a nonzero pair");
    bool conv = true;
    auto take = [&](const IntegralReport& rep) {
        r.quad_error += rep.error;
        conv = conv && rep.converged;
        return rep.value;
    };
    if (plus) r.AA = take(conv_norm2(slice::self_source(fp, fp), opt));
    if (minus) r.CC = take(conv_norm2(slice::self_source(fm, fm), opt));
    if (plus && minus) {
        const auto B = slice::cross_source(fp, fm);
        r.BB = take(conv_norm2(B, opt));
        r.AB = take(conv_inner(slice::self_source(fp, fp), B, opt));
        // <B, C>: reflecting tau turns B into the cross product with the sheets exchanged.
        r.BC = take(conv_inner(slice::cross_source(fm, fp), slice::self_source(fm, fm), opt));
    }
    r.numerator = r.AA + r.CC + 4.0 * r.BB + 4.0 * r.AB + 4.0 * r.BC;
    r.value = r.numerator / (r.norm2 * r.norm2);
    r.quad_error /= r.norm2 * r.norm2;
    r.converged = conv;
    return r;
}

template FullQReport full_q_ratio(const SheetPair<double>&, const EngineOptions&);
template FullQReport full_q_ratio(const SheetPair<cplx>&, const EngineOptions&);

// ---------------------------------------------------------------------------------------------

namespace {

double bump_shape(double x) { return std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0; }

// 4 pi int_{u_lo}^{u_hi} |F|^2 phi_s(u) du.
double partial_norm2(const Profile& f, double u_lo, double u_hi) {
    using boost::math::quadrature::gauss_kronrod;
    const auto& u = f.chart();
    const auto poly = f.poly();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < u.size(); ++i) {
        const double a = std::max(u[i], u_lo), b = std::min(u[i + 1], u_hi);
        if (!(b > a)) continue;
        const auto c = poly.c[i];
        auto g = [&](double x) {
            const double F = c[0] + (x - u[i]) * c[1];
            return F * F * f.mass().phi(x);
        };
        acc += gauss_kronrod<double, 31>::integrate(g, a, b, 15, 1e-15);
    }
    return 4.0 * pi * acc;
}

}  // namespace

Profile dyadic_shell(double s, int k, ShellKind kind, std::size_t cells) {
    require(s > 0.0 && k >= 0 && cells >= 2, "dyadic shell needs s > 0, k >= 0, cells >= 2");
    const MassParam m(s);
    const double r_lo = std::ldexp(s, k), r_hi = std::ldexp(s, k + 1);
    const double u_lo = m.psi(r_lo), u_hi = m.psi(r_hi);
    Profile p;
    if (kind == ShellKind::indicator) {
        p = Profile::sample_uniform_chart(m, u_lo, u_hi, cells, [](double) { return 1.0; }, Interp::step);
    } else {
        const double mid = 0.5 * (r_lo + r_hi), half = 0.5 * (r_hi - r_lo);
        p = Profile::sample_uniform_chart(
            m, u_lo, u_hi, cells, [&](double r) { return bump_shape((r - mid) / half); }, Interp::linear);
    }
    return p.scaled(1.0 / lp_norm(p, 2.0));
}

namespace {

std::vector<std::vector<double>> bilinear_table(double s, int k_max, ShellKind kind, std::size_t cells,
                                                const EngineOptions& opt) {
    const std::size_t n = static_cast<std::size_t>(k_max) + 1;
    std::vector<Profile> shells;
    for (int k = 0; k <= k_max; ++k) shells.push_back(dyadic_shell(s, k, kind, cells));
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) pairs.emplace_back(i, j);
    std::vector<std::vector<double>> t(n, std::vector<double>(n, 0.0));
    parallel_for(pairs.size(), [&](std::size_t p) {
        const auto [i, j] = pairs[p];
        const double v = std::sqrt(conv_norm2(slice::self_source(shells[i], shells[j]), opt).value);
        t[i][j] = v;
        t[j][i] = v;
    });
    return t;
}

}  // namespace

BilinearTable bilinear_dyadic_scan(double s, int k_max, ShellKind kind, std::size_t cells,
                                   const EngineOptions& opt) {
    require(k_max >= 4, "bilinear scan needs k_max >= 4");
    BilinearTable b;
    b.s = s;
    b.k_max = k_max;
    b.kind = kind;
    b.cells = cells;
    b.norm = bilinear_table(s, k_max, kind, cells, opt);
    // Resolution check on the widest-separated and the outermost pair.
    {
        const Profile f0 = dyadic_shell(s, 0, kind, 2 * cells), fk = dyadic_shell(s, k_max, kind, 2 * cells);
        const double far = std::sqrt(conv_norm2(slice::self_source(f0, fk), opt).value);
        const double top = std::sqrt(conv_norm2(slice::self_source(fk, fk), opt).value);
        const std::size_t K = static_cast<std::size_t>(k_max);
        b.refinement_change =
            std::max(std::abs(far - b.norm[0][K]) / far, std::abs(top - b.norm[K][K]) / top);
    }
    if (b.refinement_change > 1e-3) {
        b.cells = 2 * cells;
        b.norm = bilinear_table(s, k_max, kind, b.cells, opt);
        b.refined = true;
    }
    std::vector<double> xs, ys;
    for (int d = 1; d <= std::min(6, k_max); ++d) {
        double acc = 0.0;
        int cnt = 0;
        for (int k = 0; k + d <= k_max; ++k) {
            acc += std::log2(b.norm[static_cast<std::size_t>(k)][static_cast<std::size_t>(k + d)]);
            ++cnt;
        }
        xs.push_back(d);
        ys.push_back(acc / cnt);
    }
    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n, my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxy += (xs[i] - mx) * (ys[i] - my);
        sxx += (xs[i] - mx) * (xs[i] - mx);
    }
    b.slope = sxy / sxx;
    b.constant = std::exp2(my - b.slope * mx);
    return b;
}

DyadicRefinement dyadic_refinement_check(const Profile& f, const EngineOptions& opt) {
    require(f.s() == 1.0, "dyadic refinement uses s = 1");
    DyadicRefinement d;
    const double n2 = std::pow(lp_norm(f, 2.0), 2);
    require(n2 > 0.0, "dyadic refinement needs a nonzero profile");
    d.norm = std::sqrt(n2);
    d.lhs = std::pow(conv_norm2(slice::self_source(f, f), opt).value, 0.25);
    const MassParam m(1.0);
    const double r_end = f.radii().back();
    double sum3 = 0.0, sup = 0.0;
    for (int k = 0; std::ldexp(1.0, k) < r_end; ++k) {
        const double piece = std::sqrt(partial_norm2(f, m.psi(std::ldexp(1.0, k)), m.psi(std::ldexp(1.0, k + 1))));
        d.piece_norms.push_back(piece);
        sum3 += piece * piece * piece;
        sup = std::max(sup, piece);
    }
    d.rhs3 = std::cbrt(sum3);
    d.rhs_sup = std::cbrt(sup) * std::pow(d.norm, 2.0 / 3.0);
    d.c3 = d.lhs / d.rhs3;
    d.c_sup = d.lhs / d.rhs_sup;
    return d;
}

Profile concentrating_shells(int shells) {
    require(shells >= 1, "need at least one shell");
    const MassParam m(1.0);
    std::vector<double> radii, ones;
    for (int k = 0; k <= shells; ++k) {
        radii.push_back(std::ldexp(1.0, k));
        ones.push_back(k < shells ? 1.0 : 0.0);
    }
    const Profile unit(m, radii, ones, Interp::step);
    std::vector<double> values;
    for (int k = 0; k < shells; ++k)
        values.push_back(1.0 / std::sqrt(shells * partial_norm2(unit, m.psi(radii[k]), m.psi(radii[k + 1]))));
    values.push_back(0.0);
    return Profile(m, radii, values, Interp::step);
}

ConcentratingScan concentrating_scan(int max_shells, const EngineOptions& opt) {
    require(max_shells >= 8, "concentrating scan needs at least 8 shells");
    ConcentratingScan c;
    for (int m = 1; m <= max_shells; ++m) {
        const DyadicRefinement d = dyadic_refinement_check(concentrating_shells(m), opt);
        c.shells.push_back(m);
        c.lhs.push_back(d.lhs / d.norm);
        c.rhs3.push_back(d.rhs3 / d.norm);
        c.c3.push_back(d.c3);
    }
    // The bilinear gain only outweighs the growing number of interacting pairs after a few shells.
    c.decreasing = true;
    for (std::size_t i = 6; i < c.lhs.size(); ++i) c.decreasing = c.decreasing && c.lhs[i] < c.lhs[i - 1];
    const std::size_t n = c.c3.size();
    c.c3_drift = 0.0;
    for (std::size_t i = n - 3; i < n; ++i) c.c3_drift = std::max(c.c3_drift, std::abs(c.c3[i] - c.c3[i - 1]) / c.c3[i]);
    c.bounded = c.c3_drift <= 1e-2;
    return c;
}

TailBound tail_bound_check(double a, const Profile& f, const EngineOptions& opt) {
    require(f.s() == 1.0, "tail bound uses s = 1");
    require(a > 1.0, "tail bound needs a > 1");
    for (std::size_t k = 0; k < f.size(); ++k)
        require(f.radii()[k] >= a * (1.0 - 1e-12) || f.values()[k] == 0.0, "tail profile must vanish below a");
    TailBound t;
    t.a = a;
    const double n2 = std::pow(lp_norm(f, 2.0), 2);
    require(n2 > 0.0, "tail bound needs a nonzero profile");
    t.lhs = conv_norm2(slice::self_source(f, f), opt).value;
    const double reach = 2.0 * f.chart().back();
    const Profile one = Profile::from_chart(f.mass(), {0.0, reach}, {1.0, 1.0});
    const auto f2 = f.abs2_poly();
    t.cauchy_schwarz =
        conv_inner(slice::self_source(one, one), slice::poly_source(slice::Kind::self, f2, 1.0, f2, 1.0, true), opt)
            .value;
    t.bound = two_pi * (1.0 + 1.0 / std::sqrt(a * a - 1.0)) * n2 * n2;
    t.slack = 1.0 - t.lhs / t.bound;
    t.pass = t.lhs <= t.bound && t.lhs <= t.cauchy_schwarz * (1.0 + 1e-9);
    return t;
}

ConeLimitScan cone_limit_scan(const std::vector<double>& radii, const std::vector<double>& values, Interp mode,
                              const std::vector<double>& s_list, const EngineOptions& opt) {
    require(!radii.empty() && radii.front() > 0.0, "cone limit needs a profile supported away from 0");
    require(!s_list.empty(), "cone limit needs at least one s");
    const double a = radii.front();
    for (std::size_t i = 0; i < s_list.size(); ++i) {
        require(s_list[i] >= 0.0 && s_list[i] < a, "each s must lie in [0, a)");
        if (i > 0) require(s_list[i] < s_list[i - 1], "s_list must be decreasing");
    }
    const Profile cone(MassParam(0.0), radii, values, mode);
    const auto cone_src = slice::self_source(cone, cone);
    double fmax = 0.0;
    for (double v : values) fmax = std::max(fmax, std::abs(v));
    ConeLimitScan out;
    out.points.resize(s_list.size());
    parallel_for(s_list.size(), [&](std::size_t i) {
        const double s = s_list[i];
        ConeLimitPoint& p = out.points[i];
        p.s = s;
        p.dominating = 4.0 * pi * fmax * fmax * (1.0 + 1.0 / a);
        const Profile fs(MassParam(s), radii, values, mode);
        if (s > 0.0) p.distance = std::sqrt(std::max(0.0, conv_distance2(slice::self_source(fs, fs), cone_src, opt).value));
        const double u_lo = fs.chart().front(), u_hi = fs.chart().back();
        const auto rho = linspace(0.0, 2.0 * radii.back(), 65);
        auto tau = linspace(2.0 * u_lo, 2.0 * u_hi, 65);
        const Field h = hyperbolic_conv(fs, fs, rho, tau);
        for (double v : h.values)
            if (std::isfinite(v)) p.field_max = std::max(p.field_max, std::abs(v));
    });
    out.decreasing = true;
    out.dominated = true;
    for (std::size_t i = 0; i < out.points.size(); ++i) {
        if (i > 0 && !(out.points[i].distance < out.points[i - 1].distance)) out.decreasing = false;
        if (out.points[i].field_max > out.points[i].dominating) out.dominated = false;
    }
    return out;
}

}  // namespace hyperext
