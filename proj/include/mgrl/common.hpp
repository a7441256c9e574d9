#ifndef MGRL_COMMON_HPP_
#define MGRL_COMMON_HPP_

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgrl {

using Scalar = double;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using IntVector = Eigen::VectorXi;

/// Numerical tolerances used across the library. DP equalities are checked at
/// kValueTol, probability-simplex sums at kSimplexTol.
namespace tol {
inline constexpr Scalar kSimplexTol = 1e-12;
inline constexpr Scalar kValueTol = 1e-9;
inline constexpr Scalar kStageEps = 1e-3;
inline constexpr int kStageMaxIters = 200000;
}  // namespace tol

/// Deterministic random generator. All distributions are derived from the raw
/// 64-bit engine output so that sampled streams do not depend on the standard
/// library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) { seed_engine(seed); }

  std::uint64_t next() {
    // xorshift-star over splitmix-initialized state; period 2^64-1 per lane.
    std::uint64_t x = state_;
    x ^= x >> 12;
    x ^= x << 25;
    x ^= x >> 27;
    state_ = x;
    return x * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform in [0, 1).
  Scalar uniform() { return static_cast<Scalar>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi).
  Scalar uniform(Scalar lo, Scalar hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Rejection sampling keeps the draw unbiased.
  int uniformInt(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::uniformInt: n must be positive");
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x = next();
    while (x >= limit) x = next();
    return static_cast<int>(x % bound);
  }

  /// Standard normal via Box-Muller; the second value is discarded so the
  /// stream position is a pure function of the call count.
  Scalar normal() {
    Scalar u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const Scalar u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

  Scalar normal(Scalar mean, Scalar stddev) { return mean + stddev * normal(); }

  /// Sample an index from a discrete distribution (entries >= 0, sum ~ 1).
  int categorical(const Vector& probs) {
    const Scalar u = uniform();
    Scalar acc = 0.0;
    for (int i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return i;
    }
    return static_cast<int>(probs.size()) - 1;
  }

  /// Derive an independent generator for a named stream.
  Rng fork(std::uint64_t stream) {
    return Rng(splitmix(state_ ^ (0x9E3779B97F4A7C15ULL * (stream + 1))));
  }

 private:
  static std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  void seed_engine(std::uint64_t seed) {
    state_ = splitmix(seed);
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t state_;
};

/// Joint-action indexing over per-player action sets. Flat indices are
/// row-major with the last player varying fastest.
struct ActionSpace {
  std::vector<int> sizes;

  ActionSpace() = default;
  explicit ActionSpace(std::vector<int> s) : sizes(std::move(s)) {}
  ActionSpace(int players, int perPlayer) : sizes(players, perPlayer) {}

  int players() const { return static_cast<int>(sizes.size()); }

  int jointCount() const {
    int n = 1;
    for (int s : sizes) n *= s;
    return n;
  }

  int maxPlayerActions() const {
    int m = 0;
    for (int s : sizes) m = std::max(m, s);
    return m;
  }

  int flatten(const std::vector<int>& actions) const {
    int idx = 0;
    for (int i = 0; i < players(); ++i) idx = idx * sizes[i] + actions[i];
    return idx;
  }

  void unflatten(int joint, std::vector<int>& actions) const {
    actions.resize(sizes.size());
    for (int i = players() - 1; i >= 0; --i) {
      actions[i] = joint % sizes[i];
      joint /= sizes[i];
    }
  }

  int playerAction(int joint, int player) const {
    for (int i = players() - 1; i > player; --i) joint /= sizes[i];
    return joint % sizes[player];
  }

  /// Flat index with one player's action substituted.
  int withAction(int joint, int player, int action) const {
    int stride = 1;
    for (int i = players() - 1; i > player; --i) stride *= sizes[i];
    const int old = playerAction(joint, player);
    return joint + (action - old) * stride;
  }

  bool operator==(const ActionSpace& other) const { return sizes == other.sizes; }
};

inline bool isDistribution(const Vector& v, Scalar tolSum = tol::kSimplexTol) {
  if ((v.array() < -tolSum).any()) return false;
  return std::abs(v.sum() - 1.0) <= tolSum;
}

}  // namespace mgrl

#endif  // MGRL_COMMON_HPP_
