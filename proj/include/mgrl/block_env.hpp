#ifndef MGRL_BLOCK_ENV_HPP_
#define MGRL_BLOCK_ENV_HPP_

#include <optional>
#include <string>
#include <vector>

#include "mgrl/common.hpp"
#include "mgrl/latent_game.hpp"

namespace mgrl {

enum class ObsMode { Finite, Hadamard };

/// One observation emitted at a step. Finite mode uses a symbol index into
/// the step's observation set; Hadamard mode uses a dense vector.
struct Observation {
  int step = 0;     // 0-based level index in [0, H]
  int symbol = -1;  // finite mode only
  Vector dense;     // hadamard mode only

  bool isFinite() const { return symbol >= 0; }
};

/// Stable key identifying an observation, used by policy caches.
std::string observationKey(const Observation& obs);

/// Per-player local-state factorization of a latent game: each player's next
/// local state depends on the local states of its neighborhood and its own
/// action; the joint transition is the product of the factors.
struct FactoredStructure {
  int localStates = 0;                          // per-player local state count
  std::vector<std::vector<int>> neighborhoods;  // sorted ascending, i in Z_i
  // factors[h][i]: (localStates^{|Z_i|} * |A_i|) x localStates, rows on the simplex.
  std::vector<std::vector<Matrix>> factors;

  int players() const { return static_cast<int>(neighborhoods.size()); }

  /// Mixed-radix flattening of all local states (player 0 slowest).
  int flattenJoint(const std::vector<int>& locals) const;
  void unflattenJoint(int joint, std::vector<int>& locals) const;

  /// Row index into factors[h][i] for the given joint latent and own action.
  int factorRow(int player, int jointLatent, int ownAction, const ActionSpace& actions) const;

  /// Expands the product transition into a dense (Z*A) x Z matrix.
  Matrix expandJointTransition(int h, const ActionSpace& actions) const;
};

/// Block Markov game simulator: a latent game plus a per-step emission
/// process with disjoint supports, and the ground-truth decoder. Learners
/// interact through observations only; the latent fields are consulted by
/// evaluation code alone.
struct BlockEnv {
  LatentGame latent;
  ObsMode mode = ObsMode::Finite;

  // Finite mode: latent z emits uniformly over its k dedicated symbols;
  // symbol layout is z*k + j at every level.
  int symbolsPerLatent = 1;

  // Hadamard mode: observation = Had * (onehot(z) (+) onehot(level) (+) pad
  // + N(0, sigma^2) per entry); dimension 2^ceil(log2(H + Z + 1)).
  Scalar noiseSigma = 0.1;
  int obsDim = 0;
  Matrix hadamard;

  std::optional<FactoredStructure> factored;

  int horizon() const { return latent.horizon; }
  int latentCount() const { return latent.latentCount; }
  int players() const { return latent.players(); }
  const ActionSpace& actions() const { return latent.actions; }

  /// Number of distinct symbols per level (finite mode).
  int symbolCount() const { return latent.latentCount * symbolsPerLatent; }

  /// Emission probability of a finite symbol given the latent state.
  Scalar emissionProb(int symbol, int z) const;

  /// Draws an observation at 0-based level `level` from latent state z.
  Observation emit(int level, int z, Rng& rng) const;

  /// Noiseless centroid observation for a latent state (hadamard mode).
  Observation centroid(int level, int z) const;

  /// Ground-truth decoder psi*. Simulator-private: evaluation only.
  int decodeTrue(const Observation& obs) const;

  /// Declared reward interface: the per-player reward at an observation,
  /// resolved through the true decoder. Available to planners as a known
  /// function of (state, joint action).
  Scalar reward(int h, int player, const Observation& obs, int jointA) const;

  void validate() const;
};

/// A finite evaluation state space for exact DP against a BlockEnv. Finite
/// mode enumerates observation symbols weighted by emission probability;
/// hadamard mode uses one noiseless centroid per latent state (policies
/// produced here are constant on each emission support outside noise sets of
/// negligible mass, so the DP is exact to well below value tolerances).
struct EvalView {
  const BlockEnv* env = nullptr;
  int statesPerLevel = 0;
  // observation objects to query policies with: obsAt[level][state]
  std::vector<std::vector<Observation>> obsAt;

  int latentOf(int state) const;          // eval state -> latent
  Scalar weightOf(int state) const;       // emission weight within its latent

  static EvalView make(const BlockEnv& env);

  /// Assembles the finite-horizon model over evaluation states using the
  /// true transitions and rewards.
  FiniteHorizonModel model() const;
};

/// One step of a recorded episode. The latent fields are simulator-private;
/// only evaluation code may read them.
struct TrajectoryStep {
  int level = 0;
  Observation obs;
  int latent = 0;
  int jointAction = 0;
  Vector rewards;
  Observation nextObs;
  int nextLatent = 0;
};

using Trajectory = std::vector<TrajectoryStep>;

/// A live episode against the simulator. Holds the private latent state;
/// callers see observations only.
class EpisodeSim {
 public:
  EpisodeSim(const BlockEnv& env, Rng& rng)
      : env_(&env), rng_(&rng), level_(0), latent_(rng.categorical(env.latent.init)) {}

  int level() const { return level_; }
  bool done() const { return level_ >= env_->horizon(); }

  /// The observation at the current level. Emitted once per visit.
  const Observation& observe() {
    if (!emitted_) {
      obs_ = env_->emit(level_, latent_, *rng_);
      emitted_ = true;
    }
    return obs_;
  }

  /// Per-player rewards for taking `jointA` now; advances to the next level.
  Vector step(int jointA) {
    observe();
    Vector r(env_->players());
    for (int i = 0; i < env_->players(); ++i) {
      r[i] = env_->latent.reward(level_, i, latent_, jointA);
    }
    latent_ = rng_->categorical(
        env_->latent.trans[level_].row(latent_ * env_->latent.jointActions() + jointA).transpose());
    ++level_;
    emitted_ = false;
    return r;
  }

  int privateLatent() const { return latent_; }

 private:
  const BlockEnv* env_;
  Rng* rng_;
  int level_;
  int latent_;
  bool emitted_ = false;
  Observation obs_;
};

/// Rolls the environment forward to the given 0-based step under `policy`
/// (a callable (level, Observation) -> joint distribution) and returns the
/// live simulator positioned at that step. The latent state never escapes.
template <typename PolicyFn>
EpisodeSim rollIn(const BlockEnv& env, PolicyFn&& policy, int step, Rng& rng) {
  if (step < 0 || step >= env.horizon()) {
    throw std::out_of_range("rollIn: step out of range");
  }
  EpisodeSim sim(env, rng);
  for (int t = 0; t < step; ++t) {
    const Vector dist = policy(t, sim.observe());
    sim.step(rng.categorical(dist));
  }
  return sim;
}

/// Plays one full episode and records the trajectory.
template <typename PolicyFn>
Trajectory simulateEpisode(const BlockEnv& env, PolicyFn&& policy, Rng& rng) {
  Trajectory traj;
  EpisodeSim sim(env, rng);
  for (int t = 0; t < env.horizon(); ++t) {
    TrajectoryStep rec;
    rec.level = t;
    rec.obs = sim.observe();
    rec.latent = sim.privateLatent();
    const Vector dist = policy(t, rec.obs);
    rec.jointAction = rng.categorical(dist);
    rec.rewards = sim.step(rec.jointAction);
    rec.nextLatent = sim.privateLatent();
    rec.nextObs = sim.observe();
    traj.push_back(std::move(rec));
  }
  return traj;
}

}  // namespace mgrl

#endif  // MGRL_BLOCK_ENV_HPP_
