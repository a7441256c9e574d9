#ifndef MGRL_TESTS_ORACLES_HPP_
#define MGRL_TESTS_ORACLES_HPP_

// Brute-force reference implementations used only by tests. Each oracle is
// written independently of the library code path it checks: enumeration and
// forward propagation here, closed forms and backward induction there.

#include "mgrl/block_env.hpp"
#include "mgrl/equilibrium.hpp"
#include "mgrl/latent_game.hpp"
#include "mgrl/policy.hpp"

namespace mgrl::oracle {

struct Budget {
  int maxPlayerActions = 5;
  int maxPlayers = 3;
  long maxDeterministicPolicies = 2'000'000;
};

/// Exact deviation gap by explicit enumeration of every pure deviation
/// (NE/CCE) or every swap map (CE).
Vector exhaustiveGap(const StageGame& game, const Vector& dist, Concept c,
                     const Budget& budget = {});

struct McEstimate {
  Scalar mean = 0.0;
  Scalar stderr_ = 0.0;
};

/// Unbiased rollout estimate of a player's value with standard error.
McEstimate mcValue(const BlockEnv& env, const JointPolicy& policy, int player, int samples,
                   Rng& rng);

/// Exact best-response value of one player by enumerating every
/// deterministic per-state policy and scoring it with forward probability
/// propagation.
Scalar exhaustiveBestResponse(const FiniteHorizonModel& model, const PolicyTable& policy,
                              int player, const Budget& budget = {});

/// Zero-sum 3x3 (or smaller) game value by brute maximin search over a
/// simplex grid of the row player's mixed strategies.
Scalar gridMinimaxValue(const Matrix& payoff, Scalar step = 1e-3);

/// Ridge regression prediction assembled densely from explicit feature
/// vectors: theta = (X^T X / n + lambda I)^{-1} X^T y / n.
Vector denseRidgeWeights(const Matrix& features, const Vector& targets, Scalar lambda);

}  // namespace mgrl::oracle

#endif  // MGRL_TESTS_ORACLES_HPP_
