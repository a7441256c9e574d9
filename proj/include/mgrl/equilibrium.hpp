#ifndef MGRL_EQUILIBRIUM_HPP_
#define MGRL_EQUILIBRIUM_HPP_

#include <vector>

#include "mgrl/common.hpp"
#include "mgrl/eval.hpp"

namespace mgrl {

/// A one-shot normal-form game: per-player payoff tensors over the joint
/// action space, with an explicit payoff magnitude bound for diagnostics.
struct StageGame {
  ActionSpace actions;
  std::vector<Vector> payoffs;  // payoffs[i][jointAction]
  Scalar bound = 1.0;           // max |payoff| the caller guarantees

  int players() const { return actions.players(); }
  int jointActions() const { return actions.jointCount(); }

  Scalar payoff(int player, int joint) const { return payoffs[player][joint]; }

  /// Expected payoff of `player` under a joint-action distribution.
  Scalar expectedPayoff(int player, const Vector& dist) const {
    return payoffs[player].dot(dist);
  }

  /// Dense payoff table, for debugging.
  std::string describe() const;
};

/// Output of a stage solver: a joint-action distribution (product of
/// marginals for NE), the exact certified deviation gap per player, and the
/// number of dynamics iterations used.
struct StageSolution {
  Vector dist;           // over joint actions, sums to 1
  std::vector<Vector> marginals;  // per player (product solutions)
  Vector gaps;           // certified per-player deviation gap
  int iterations = 0;
  bool converged = true;

  Scalar maxGap() const { return gaps.size() ? gaps.maxCoeff() : 0.0; }
};

/// Exact per-player deviation gap of a joint distribution: the best
/// unilateral pure deviation (NE/CCE) or the best strategy-modification map
/// (CE), by enumeration. Serves as the acceptance oracle for the solvers.
Vector deviationGap(const StageGame& game, const Vector& dist, Concept c);

/// Two-player zero-sum Nash by regret-matching self-play with averaged
/// marginals; the duality gap is certified by exact best responses. Rejects
/// games that are not zero-sum: computing Nash equilibria of general-sum
/// games is not supported, use CCE/CE.
StageSolution solveZeroSumNash(const StageGame& game, Scalar eps = tol::kStageEps,
                               int maxIters = tol::kStageMaxIters);

/// Coarse correlated equilibrium by external regret matching; the averaged
/// joint distribution is certified by deviationGap. `converged=false` when
/// the iteration budget runs out first.
StageSolution solveCce(const StageGame& game, Scalar eps = tol::kStageEps,
                       int maxIters = tol::kStageMaxIters);

/// Correlated equilibrium by internal (swap) regret matching.
StageSolution solveCe(const StageGame& game, Scalar eps = tol::kStageEps,
                      int maxIters = tol::kStageMaxIters);

/// Dispatch on concept; NE requires a two-player zero-sum game.
StageSolution solveStage(const StageGame& game, Concept c, Scalar eps = tol::kStageEps,
                         int maxIters = tol::kStageMaxIters);

}  // namespace mgrl

#endif  // MGRL_EQUILIBRIUM_HPP_
