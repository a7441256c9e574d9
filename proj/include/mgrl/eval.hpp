#ifndef MGRL_EVAL_HPP_
#define MGRL_EVAL_HPP_

#include <vector>

#include "mgrl/block_env.hpp"
#include "mgrl/common.hpp"
#include "mgrl/latent_game.hpp"
#include "mgrl/policy.hpp"

namespace mgrl {

/// Equilibrium concepts evaluated by the library. Nash and coarse correlated
/// equilibria share the unilateral-deviation gap; correlated equilibria use
/// strategy-modification (swap) deviations.
enum class Concept { NE, CCE, CE };

Concept conceptFromString(const std::string& name);
std::string conceptName(Concept c);

struct ValueResult {
  Vector perPlayer;               // v_i = E_{d1}[V_{1,i}]
  std::vector<Matrix> values;     // values[h]: stateCount[h] x players
};

/// Exact backward-induction values of `policy` under the model's transitions
/// and rewards. Transition rows may be sub-distributions.
ValueResult valueOfPolicy(const FiniteHorizonModel& model, const PolicyTable& policy);

struct BestResponseResult {
  Scalar value = 0.0;             // v_i^{dagger, pi_{-i}}
  std::vector<Matrix> values;     // V^{dagger}[h]: stateCount[h] x 1
  std::vector<IntVector> greedy;  // greedy own action per state per step
};

/// Value of the best response of `player` against the conditional marginal
/// of the other players (own action marginalized out of correlated rows).
BestResponseResult bestResponseValue(const FiniteHorizonModel& model, const PolicyTable& policy,
                                     int player);

/// Maximum value of `player` over all strategy modifications
/// (state, recommended action) -> substituted action, applied to `policy`.
Scalar swapDeviationValue(const FiniteHorizonModel& model, const PolicyTable& policy, int player);

/// max_i of the deviation gain for the given concept; nonnegative up to
/// tolerance, zero iff `policy` is an exact equilibrium of that concept.
Scalar exploitability(const FiniteHorizonModel& model, const PolicyTable& policy, Concept c);

/// Evaluates a JointPolicy against the true environment via its evaluation
/// view (the privileged, decoder-aware handle).
Scalar exploitability(const BlockEnv& env, const JointPolicy& policy, Concept c);

/// Per-player values of a JointPolicy in the true environment.
Vector policyValues(const BlockEnv& env, const JointPolicy& policy);

}  // namespace mgrl

#endif  // MGRL_EVAL_HPP_
