#ifndef HJBQRNET_COMMON_HPP
#define HJBQRNET_COMMON_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <string>

namespace hjbqrnet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mismatched vector/matrix sizes or non-finite inputs.
struct DimensionError : Error {
    using Error::Error;
};

/// Bad configuration value or malformed config file.
struct ConfigError : Error {
    using Error::Error;
};

/// Iteration failed to converge or produced garbage.
struct NumericalError : Error {
    using Error::Error;
};

/// Matrix singular to working precision.
struct SingularMatrixError : NumericalError {
    using NumericalError::NumericalError;
};

/// Problem structure outside what an algorithm supports.
struct UnsupportedProblemError : Error {
    using Error::Error;
};

/// Malformed data file; message carries the offending line number.
struct ParseError : Error {
    using Error::Error;
};

/// Data generation produced too few usable trajectories.
struct GenerationError : Error {
    using Error::Error;
};

/// Work or memory bound exceeded (e.g. runaway mesh refinement).
struct ResourceError : Error {
    using Error::Error;
};

/// Deterministic random stream. Wraps std::mt19937_64 but converts to
/// doubles by hand so output bytes do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Deterministically derive an independent stream, e.g. one per
    /// trajectory or per purpose tag.
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
        return mix(mix(seed) ^ (0x9e3779b97f4a7c15ULL + tag));
    }

private:
    // splitmix64 finalizer; spreads low-entropy seeds over the full range.
    static std::uint64_t mix(std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::mt19937_64 engine_;
};

/// Number of worker threads, capped by the HJB_QRNET_THREADS env var.
int worker_thread_count();

/// Runs body(i) for i in [0, count). Tasks are distributed over the worker
/// pool; each index is executed exactly once. The caller is responsible for
/// writing results into per-index slots so output does not depend on
/// scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Formats a double with 17 significant digits (exact binary round trip).
std::string format_g17(double value);

/// Strict double parser; throws ParseError on trailing junk or non-numeric
/// input ("inf"/"-inf"/"nan" are accepted spellings).
double parse_double(const std::string& token);

/// FNV-1a over a byte string, used for config/Riccati fingerprints.
std::uint64_t fnv1a(const std::string& bytes);

/// Requires v to have the given size and only finite entries.
void check_vector(const Vector& v, Eigen::Index size, const char* what);

}  // namespace hjbqrnet

#endif
