#include "mgrl/block_env.hpp"

#include <cstring>
#include <stdexcept>

namespace mgrl {

std::string observationKey(const Observation& obs) {
  if (obs.isFinite()) {
    return "f" + std::to_string(obs.step) + ":" + std::to_string(obs.symbol);
  }
  std::string key;
  key.reserve(2 + sizeof(double) * obs.dense.size());
  key.push_back('d');
  key.push_back(static_cast<char>('0' + obs.step % 64));
  const char* raw = reinterpret_cast<const char*>(obs.dense.data());
  key.append(raw, raw + sizeof(double) * obs.dense.size());
  return key;
}

int FactoredStructure::flattenJoint(const std::vector<int>& locals) const {
  int idx = 0;
  for (int i = 0; i < players(); ++i) idx = idx * localStates + locals[i];
  return idx;
}

void FactoredStructure::unflattenJoint(int joint, std::vector<int>& locals) const {
  locals.resize(players());
  for (int i = players() - 1; i >= 0; --i) {
    locals[i] = joint % localStates;
    joint /= localStates;
  }
}

int FactoredStructure::factorRow(int player, int jointLatent, int ownAction,
                                 const ActionSpace& actions) const {
  std::vector<int> locals;
  unflattenJoint(jointLatent, locals);
  int nbhd = 0;
  for (int j : neighborhoods[player]) nbhd = nbhd * localStates + locals[j];
  return nbhd * actions.sizes[player] + ownAction;
}

Matrix FactoredStructure::expandJointTransition(int h, const ActionSpace& actions) const {
  const int M = players();
  int jointZ = 1;
  for (int i = 0; i < M; ++i) jointZ *= localStates;
  const int A = actions.jointCount();
  Matrix out = Matrix::Ones(jointZ * A, jointZ);
  std::vector<int> acts, nextLocals;
  for (int z = 0; z < jointZ; ++z) {
    for (int a = 0; a < A; ++a) {
      actions.unflatten(a, acts);
      for (int zn = 0; zn < jointZ; ++zn) {
        unflattenJoint(zn, nextLocals);
        Scalar p = 1.0;
        for (int i = 0; i < M; ++i) {
          p *= factors[h][i](factorRow(i, z, acts[i], actions), nextLocals[i]);
        }
        out(z * A + a, zn) = p;
      }
    }
  }
  return out;
}

Scalar BlockEnv::emissionProb(int symbol, int z) const {
  if (mode != ObsMode::Finite) throw std::logic_error("emissionProb: finite mode only");
  return symbol / symbolsPerLatent == z ? 1.0 / symbolsPerLatent : 0.0;
}

Observation BlockEnv::emit(int level, int z, Rng& rng) const {
  Observation obs;
  obs.step = level;
  if (mode == ObsMode::Finite) {
    obs.symbol = z * symbolsPerLatent + rng.uniformInt(symbolsPerLatent);
    return obs;
  }
  Vector pre = Vector::Zero(obsDim);
  pre[z] = 1.0;
  pre[latentCount() + level] = 1.0;
  for (int i = 0; i < obsDim; ++i) pre[i] += rng.normal(0.0, noiseSigma);
  obs.dense = hadamard * pre;
  return obs;
}

Observation BlockEnv::centroid(int level, int z) const {
  if (mode != ObsMode::Hadamard) throw std::logic_error("centroid: hadamard mode only");
  Observation obs;
  obs.step = level;
  Vector pre = Vector::Zero(obsDim);
  pre[z] = 1.0;
  pre[latentCount() + level] = 1.0;
  obs.dense = hadamard * pre;
  return obs;
}

int BlockEnv::decodeTrue(const Observation& obs) const {
  if (mode == ObsMode::Finite) return obs.symbol / symbolsPerLatent;
  // Columns of a Sylvester Hadamard matrix are orthogonal, so the nearest
  // centroid in observation space is the nearest in pre-image space; that
  // reduces to the largest latent coordinate of Had^T o / dim.
  const Vector pre = hadamard.transpose() * obs.dense / static_cast<Scalar>(obsDim);
  int best = 0;
  for (int z = 1; z < latentCount(); ++z) {
    if (pre[z] > pre[best]) best = z;
  }
  return best;
}

Scalar BlockEnv::reward(int h, int player, const Observation& obs, int jointA) const {
  return latent.reward(h, player, decodeTrue(obs), jointA);
}

void BlockEnv::validate() const {
  latent.validate();
  if (mode == ObsMode::Finite) {
    if (symbolsPerLatent < 1) throw std::runtime_error("BlockEnv: symbolsPerLatent must be >= 1");
  } else {
    if (obsDim <= 0 || (obsDim & (obsDim - 1)) != 0) {
      throw std::runtime_error("BlockEnv: hadamard dimension must be a power of two");
    }
    if (obsDim < latentCount() + horizon() + 1) {
      throw std::runtime_error("BlockEnv: hadamard dimension too small");
    }
  }
  if (factored) {
    const auto& f = *factored;
    int jointZ = 1;
    for (int i = 0; i < f.players(); ++i) jointZ *= f.localStates;
    if (jointZ != latentCount()) throw std::runtime_error("BlockEnv: factored state count mismatch");
    for (int i = 0; i < f.players(); ++i) {
      bool selfIn = false;
      for (int j : f.neighborhoods[i]) selfIn |= (j == i);
      if (!selfIn) throw std::runtime_error("BlockEnv: player missing from own neighborhood");
    }
  }
}

int EvalView::latentOf(int state) const {
  if (env->mode == ObsMode::Finite) return state / env->symbolsPerLatent;
  return state;
}

Scalar EvalView::weightOf(int state) const {
  (void)state;
  if (env->mode == ObsMode::Finite) return 1.0 / env->symbolsPerLatent;
  return 1.0;
}

EvalView EvalView::make(const BlockEnv& env) {
  EvalView view;
  view.env = &env;
  view.statesPerLevel =
      env.mode == ObsMode::Finite ? env.symbolCount() : env.latentCount();
  view.obsAt.resize(env.horizon() + 1);
  for (int level = 0; level <= env.horizon(); ++level) {
    view.obsAt[level].resize(view.statesPerLevel);
    for (int s = 0; s < view.statesPerLevel; ++s) {
      if (env.mode == ObsMode::Finite) {
        Observation obs;
        obs.step = level;
        obs.symbol = s;
        view.obsAt[level][s] = obs;
      } else {
        view.obsAt[level][s] = env.centroid(level, s);
      }
    }
  }
  return view;
}

FiniteHorizonModel EvalView::model() const {
  const BlockEnv& e = *env;
  FiniteHorizonModel m;
  m.horizon = e.horizon();
  m.actions = e.actions();
  m.stateCount.assign(e.horizon() + 1, statesPerLevel);
  const int A = e.latent.jointActions();
  m.trans.resize(m.horizon);
  m.rewards.resize(m.horizon);
  for (int h = 0; h < m.horizon; ++h) {
    m.trans[h].resize(statesPerLevel * A, statesPerLevel);
    for (int s = 0; s < statesPerLevel; ++s) {
      const int z = latentOf(s);
      for (int a = 0; a < A; ++a) {
        for (int sn = 0; sn < statesPerLevel; ++sn) {
          m.trans[h](s * A + a, sn) = e.latent.trans[h](z * A + a, latentOf(sn)) * weightOf(sn);
        }
      }
    }
    m.rewards[h].resize(e.players());
    for (int i = 0; i < e.players(); ++i) {
      m.rewards[h][i].resize(statesPerLevel, A);
      for (int s = 0; s < statesPerLevel; ++s) {
        for (int a = 0; a < A; ++a) {
          m.rewards[h][i](s, a) = e.latent.reward(h, i, latentOf(s), a);
        }
      }
    }
  }
  m.init.resize(statesPerLevel);
  for (int s = 0; s < statesPerLevel; ++s) {
    m.init[s] = e.latent.init[latentOf(s)] * weightOf(s);
  }
  return m;
}

}  // namespace mgrl
