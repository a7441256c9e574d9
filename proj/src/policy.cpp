#include "mgrl/policy.hpp"

#include <stdexcept>

namespace mgrl {

JointPolicy JointPolicy::uniform(int horizon, const ActionSpace& actions) {
  const int A = actions.jointCount();
  return JointPolicy(Kind::Product, horizon, actions,
                     [A](int, const Observation&) { return Vector::Constant(A, 1.0 / A); });
}

JointPolicy JointPolicy::fromTable(Kind kind, const EvalView& view, std::vector<Matrix> table) {
  const BlockEnv& env = *view.env;
  const int A = env.actions().jointCount();
  auto shared = std::make_shared<std::vector<Matrix>>(std::move(table));
  // Finite symbols index the table directly; hadamard observations are
  // matched to their latent through the true decoder (table rows are per
  // evaluation state, which is the latent in that mode).
  const BlockEnv* envPtr = &env;
  auto eval = [shared, envPtr, A](int step, const Observation& obs) -> Vector {
    const int row = obs.isFinite() ? obs.symbol : envPtr->decodeTrue(obs);
    if (step < 0 || step >= static_cast<int>(shared->size()) ||
        row >= (*shared)[step].rows()) {
      return Vector::Constant(A, 1.0 / A);
    }
    return (*shared)[step].row(row).transpose();
  };
  return JointPolicy(kind, env.horizon(), env.actions(), std::move(eval));
}

const Vector& JointPolicy::at(int step, const Observation& obs) const {
  if (!eval_) throw std::logic_error("JointPolicy: empty policy queried");
  if (static_cast<int>(cache_->perStep.size()) <= step) cache_->perStep.resize(step + 1);
  auto& stepCache = cache_->perStep[step];
  const std::string key = observationKey(obs);
  auto it = stepCache.find(key);
  if (it == stepCache.end()) {
    Vector dist = eval_(step, obs);
    const Scalar mass = dist.sum();
    if (std::abs(mass - 1.0) > tol::kValueTol) {
      throw std::runtime_error("JointPolicy: conditional does not sum to 1");
    }
    it = stepCache.emplace(key, std::move(dist)).first;
  }
  return it->second;
}

PolicyTable JointPolicy::materialize(const EvalView& view) const {
  PolicyTable pt;
  const int A = actions_.jointCount();
  pt.table.resize(horizon_);
  for (int h = 0; h < horizon_; ++h) {
    pt.table[h].resize(view.statesPerLevel, A);
    for (int s = 0; s < view.statesPerLevel; ++s) {
      pt.table[h].row(s) = at(h, view.obsAt[h][s]).transpose();
    }
  }
  return pt;
}

}  // namespace mgrl
