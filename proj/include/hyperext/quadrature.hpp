#pragma once

#include <vector>

namespace hyperext {

// Gauss-Legendre rule mapped to [0, 1].
struct GLRule {
    std::vector<double> x;
    std::vector<double> w;
};

// Supported orders: 1..10, 15, 20, 30.
const GLRule& gauss_legendre(int m);

}  // namespace hyperext
