#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <vector>

namespace lasso {

/// Recorded in report metadata so runs can be reproduced elsewhere.
inline constexpr const char* kRngName = "mt19937_64 seeded by splitmix64(seed, stream)";

/// Stream ids. The matrix draws use one stream and everything else
/// (b, x_true, support, noise) the other, so changing m or k never
/// perturbs A.
inline constexpr std::uint64_t kStreamMatrix = 1;
inline constexpr std::uint64_t kStreamData = 2;

std::uint64_t splitmix64(std::uint64_t& state);

/// Portable generator: the engine is fully specified by the standard and
/// all transforms are done here rather than with <random> distributions,
/// whose output is implementation-defined.
class Rng {
public:
    Rng(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next() { return engine_(); }
    /// [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Standard normal by Box–Muller.
    double normal();
    /// Uniform integer in [0, bound).
    std::uint64_t below(std::uint64_t bound);
    /// k distinct indices from [0, n), in draw order (partial Fisher–Yates).
    std::vector<Eigen::Index> choose(Eigen::Index n, Eigen::Index k);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace lasso
