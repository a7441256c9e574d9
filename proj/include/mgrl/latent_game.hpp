#ifndef MGRL_LATENT_GAME_HPP_
#define MGRL_LATENT_GAME_HPP_

#include <vector>

#include "mgrl/common.hpp"

namespace mgrl {

/// Finite-horizon tabular Markov game over latent states. Transitions at step
/// h map (state, joint action) to a distribution over next states; rewards
/// are per player in [-1, 1]. States exist at levels 1..H+1 (the level-H+1
/// states carry no rewards or transitions).
struct LatentGame {
  int horizon = 0;       // H
  int latentCount = 0;   // Z
  ActionSpace actions;   // per-player action sets

  // trans[h] is (Z*A) x Z, row z*A + a holds T_h(. | z, a); h in [0, H).
  std::vector<Matrix> trans;
  // rewards[h][i] is Z x A with entries in [-1, 1].
  std::vector<std::vector<Matrix>> rewards;
  Vector init;  // d1 over Z

  int players() const { return actions.players(); }
  int jointActions() const { return actions.jointCount(); }

  Scalar reward(int h, int player, int z, int jointA) const {
    return rewards[h][player](z, jointA);
  }

  const Matrix& transitionAt(int h) const { return trans[h]; }

  /// Checks simplex invariants and reward bounds; throws on violation.
  void validate() const;
};

/// A per-step finite game view used by exact dynamic programming: state
/// spaces may differ across steps (latent states, observation symbols, or
/// evaluation states), transitions may be sub-distributions (learned models
/// lose mass to regularization).
struct FiniteHorizonModel {
  int horizon = 0;
  ActionSpace actions;
  std::vector<int> stateCount;       // size H+1; stateCount[h] = |S_{h+1}| states entering step h+1
  std::vector<Matrix> trans;         // trans[h]: (stateCount[h]*A) x stateCount[h+1]
  std::vector<std::vector<Matrix>> rewards;  // rewards[h][i]: stateCount[h] x A
  Vector init;                       // over stateCount[0]

  int players() const { return actions.players(); }
  int jointActions() const { return actions.jointCount(); }

  /// Throws if shapes are inconsistent or rows exceed unit mass.
  void validate() const;

  static FiniteHorizonModel fromLatentGame(const LatentGame& game);
};

/// A materialized policy over a FiniteHorizonModel: table[h] is
/// (stateCount[h] x A), each row a distribution over joint actions.
struct PolicyTable {
  std::vector<Matrix> table;

  static PolicyTable uniform(const FiniteHorizonModel& model);

  /// Marginal distribution of one player's action under the joint row.
  static Vector playerMarginal(const Vector& joint, const ActionSpace& actions, int player);
};

}  // namespace mgrl

#endif  // MGRL_LATENT_GAME_HPP_
