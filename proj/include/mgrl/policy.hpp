#ifndef MGRL_POLICY_HPP_
#define MGRL_POLICY_HPP_

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "mgrl/block_env.hpp"
#include "mgrl/common.hpp"
#include "mgrl/latent_game.hpp"

namespace mgrl {

/// A joint policy over observations: per step, an observation-conditioned
/// distribution over joint actions. Conditionals are materialized lazily and
/// cached per observation key; product-kind policies factor exactly into
/// per-player marginals. Queries need external synchronization if shared.
class JointPolicy {
 public:
  enum class Kind { Product, Correlated };

  JointPolicy() = default;

  /// `eval` maps (0-based step, observation) -> distribution over joint actions.
  JointPolicy(Kind kind, int horizon, ActionSpace actions,
              std::function<Vector(int, const Observation&)> eval)
      : kind_(kind), horizon_(horizon), actions_(std::move(actions)),
        eval_(std::move(eval)), cache_(std::make_shared<Cache>()) {}

  /// Uniform over joint actions at every state.
  static JointPolicy uniform(int horizon, const ActionSpace& actions);

  /// A policy backed by an explicit table over the evaluation states of a
  /// view; observations outside the table fall back to uniform.
  static JointPolicy fromTable(Kind kind, const EvalView& view, std::vector<Matrix> table);

  Kind kind() const { return kind_; }
  int horizon() const { return horizon_; }
  const ActionSpace& actions() const { return actions_; }
  int provenanceEpisode() const { return provenanceEpisode_; }
  void setProvenanceEpisode(int n) { provenanceEpisode_ = n; }

  bool defined() const { return static_cast<bool>(eval_); }

  /// Cached conditional distribution at (step, obs).
  const Vector& at(int step, const Observation& obs) const;

  /// Materializes the policy on the evaluation states of a view.
  PolicyTable materialize(const EvalView& view) const;

 private:
  struct Cache {
    std::vector<std::map<std::string, Vector>> perStep;
  };

  Kind kind_ = Kind::Correlated;
  int horizon_ = 0;
  ActionSpace actions_;
  std::function<Vector(int, const Observation&)> eval_;
  std::shared_ptr<Cache> cache_;
  int provenanceEpisode_ = -1;
};

}  // namespace mgrl

#endif  // MGRL_POLICY_HPP_
