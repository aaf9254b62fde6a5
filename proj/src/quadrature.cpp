#include "hyperext/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

#include "hyperext/common.hpp"

namespace hyperext {
namespace {

template <int N>
GLRule make_rule() {
    using G = boost::math::quadrature::gauss<double, N>;
    GLRule r;
    const auto& a = G::abscissa();
    const auto& w = G::weights();
    for (std::size_t i = a.size(); i-- > 0;) {
        if (a[i] == 0.0) continue;
        r.x.push_back(0.5 - 0.5 * a[i]);
        r.w.push_back(0.5 * w[i]);
    }
    if (N % 2 == 1) {
        r.x.push_back(0.5);
        r.w.push_back(0.5 * w[0]);
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] == 0.0) continue;
        r.x.push_back(0.5 + 0.5 * a[i]);
        r.w.push_back(0.5 * w[i]);
    }
    return r;
}

GLRule midpoint_rule() { return GLRule{{0.5}, {1.0}}; }

}  // namespace

const GLRule& gauss_legendre(int m) {
    static const GLRule r1 = midpoint_rule();
    static const GLRule r2 = make_rule<2>(), r3 = make_rule<3>(), r4 = make_rule<4>(),
                        r5 = make_rule<5>(), r6 = make_rule<6>(), r7 = make_rule<7>(),
                        r8 = make_rule<8>(), r9 = make_rule<9>(), r10 = make_rule<10>(),
                        r15 = make_rule<15>(), r20 = make_rule<20>(), r30 = make_rule<30>();
    switch (m) {
        case 1: return r1;
        case 2: return r2;
        case 3: return r3;
        case 4: return r4;
        case 5: return r5;
        case 6: return r6;
        case 7: return r7;
        case 8: return r8;
        case 9: return r9;
        case 10: return r10;
        case 15: return r15;
        case 20: return r20;
        case 30: return r30;
        default: throw DomainError("unsupported Gauss-Legendre order");
    }
}

}  // namespace hyperext
