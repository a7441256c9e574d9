#ifndef MGRL_TESTS_TEST_UTIL_HPP_
#define MGRL_TESTS_TEST_UTIL_HPP_

#include "mgrl/envs.hpp"
#include "mgrl/equilibrium.hpp"
#include "mgrl/latent_game.hpp"

namespace mgrl::test {

/// Matching pennies as a one-step latent game (single state).
inline LatentGame matchingPennies() {
  LatentGame g;
  g.horizon = 1;
  g.latentCount = 1;
  g.actions = ActionSpace(2, 2);
  g.trans = {Matrix::Zero(4, 1)};
  g.trans[0].col(0).setOnes();
  Matrix u(1, 4);
  u << 1, -1, -1, 1;  // joint order (0,0),(0,1),(1,0),(1,1)
  g.rewards = {{u, -u}};
  g.init = Vector::Ones(1);
  g.validate();
  return g;
}

inline StageGame matchingPenniesStage() {
  StageGame s;
  s.actions = ActionSpace(2, 2);
  s.payoffs.resize(2);
  s.payoffs[0] = Vector(4);
  s.payoffs[0] << 1, -1, -1, 1;
  s.payoffs[1] = -s.payoffs[0];
  return s;
}

inline StageGame randomStage(int players, int actions, Rng& rng, Scalar range = 1.0,
                             bool zeroSum = false) {
  StageGame s;
  s.actions = ActionSpace(players, actions);
  s.payoffs.resize(players);
  const int A = s.jointActions();
  for (int i = 0; i < players; ++i) {
    s.payoffs[i].resize(A);
    for (int a = 0; a < A; ++a) s.payoffs[i][a] = rng.uniform(-range, range);
  }
  if (zeroSum) s.payoffs[1] = -s.payoffs[0];
  s.bound = range;
  return s;
}

inline Vector randomDistribution(int n, Rng& rng) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = -std::log(1.0 - rng.uniform());
  return v / v.sum();
}

inline EnvSpec smallBlockSpec(std::uint64_t seed, ObsMode mode = ObsMode::Finite) {
  EnvSpec spec;
  spec.family = EnvFamily::Block;
  spec.horizon = 3;
  spec.latents = 3;
  spec.players = 2;
  spec.actionsPerPlayer = 3;
  spec.symbolsPerLatent = 2;
  spec.obsMode = mode;
  spec.seed = seed;
  return spec;
}

}  // namespace mgrl::test

#endif  // MGRL_TESTS_TEST_UTIL_HPP_
