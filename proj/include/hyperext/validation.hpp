#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hyperext/convolution.hpp"

namespace hyperext {

struct OracleCase {
    std::string kind;  // "self" (mu_s * mu_s) or "cone" (mu_s * sigma_c)
    double s = 1.0, rho = 0.0, tau = 0.0;
    double closed = 0.0, engine = 0.0;
    double rel_err = 0.0;
    bool pass = false;
};

struct BumpCase {
    std::string profile;  // "mu" or "f_a"
    double s = 1.0;
    Bump bump;
    double quadrature = 0.0;  // closed form paired with the bump
    double mc = 0.0, std_error = 0.0;
    double z = 0.0;           // |mc - quadrature| / std_error
    bool pass = false;
};

struct OracleSuite {
    std::vector<OracleCase> points;
    std::vector<BumpCase> bumps;
    double max_rel_err = 0.0;
    double max_z = 0.0;
    bool pass = true;
};

// Closed forms against the slice engine at random support-interior points (s cycling through 0.5, 1, 2,
// kinds alternating), and against the Monte-Carlo pairing oracle on bump tests (pass within 3 standard
// errors). samples = 0 gives an empty, passing suite.
OracleSuite oracle_equivalence_suite(std::size_t samples, double tol, std::uint64_t seed, std::size_t bump_tests = 10,
                                     std::size_t mc_samples = 400'000);

}  // namespace hyperext
