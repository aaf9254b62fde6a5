#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>

namespace hyperext {

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Exit codes shared by the library error types and the CLI.
enum class ExitCode : int { pass = 0, tolerance = 1, usage = 2, nonconvergence = 3 };

class Error : public std::runtime_error {
public:
    Error(ExitCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
    ExitCode code() const noexcept { return code_; }

private:
    ExitCode code_;
};

// Bad arguments or violated preconditions.
struct DomainError : Error {
    explicit DomainError(const std::string& what) : Error(ExitCode::usage, what) {}
};

// A quadrature or iteration did not reach its tolerance.
struct ConvergenceError : Error {
    explicit ConvergenceError(const std::string& what) : Error(ExitCode::nonconvergence, what) {}
};

inline void require(bool ok, const std::string& what) {
    if (!ok) throw DomainError(what);
}

enum class Precision { fast, standard, paranoid };

struct QuadratureSpec {
    double rel_tol = 1e-8;
    int max_depth = 20;
    double r_max = 40.0;
    std::uint64_t seed = 0x5EED;
    std::size_t mc_samples = 10'000'000;

    static QuadratureSpec for_precision(Precision p);
};

// Number of worker threads: HYP_THREADS if set and positive, else hardware concurrency.
unsigned worker_count();

// Calls fn(i) for i in [0, n) across worker threads. Each index runs exactly once;
// callers write into per-index slots so results do not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace hyperext
