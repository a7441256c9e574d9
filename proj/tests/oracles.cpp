#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace mgrl::oracle {

Vector exhaustiveGap(const StageGame& game, const Vector& dist, Concept c,
                     const Budget& budget) {
  const int M = game.players();
  if (M > budget.maxPlayers) throw std::runtime_error("exhaustiveGap: too many players");
  for (int s : game.actions.sizes) {
    if (s > budget.maxPlayerActions) throw std::runtime_error("exhaustiveGap: too many actions");
  }
  const int A = game.jointActions();
  Vector gaps(M);
  std::vector<int> acts;
  for (int i = 0; i < M; ++i) {
    const int Ai = game.actions.sizes[i];
    Scalar base = 0.0;
    for (int a = 0; a < A; ++a) base += dist[a] * game.payoff(i, a);

    Scalar best = -std::numeric_limits<Scalar>::infinity();
    if (c == Concept::CE) {
      // Every swap map [Ai] -> [Ai], odometer enumeration.
      std::vector<int> swapMap(Ai, 0);
      while (true) {
        Scalar v = 0.0;
        for (int a = 0; a < A; ++a) {
          if (dist[a] == 0.0) continue;
          game.actions.unflatten(a, acts);
          acts[i] = swapMap[acts[i]];
          v += dist[a] * game.payoff(i, game.actions.flatten(acts));
        }
        if (v > best) best = v;
        int pos = Ai - 1;
        while (pos >= 0 && ++swapMap[pos] == Ai) swapMap[pos--] = 0;
        if (pos < 0) break;
      }
    } else {
      for (int fixed = 0; fixed < Ai; ++fixed) {
        Scalar v = 0.0;
        for (int a = 0; a < A; ++a) {
          if (dist[a] == 0.0) continue;
          game.actions.unflatten(a, acts);
          acts[i] = fixed;
          v += dist[a] * game.payoff(i, game.actions.flatten(acts));
        }
        if (v > best) best = v;
      }
    }
    gaps[i] = best - base;
  }
  return gaps;
}

McEstimate mcValue(const BlockEnv& env, const JointPolicy& policy, int player, int samples,
                   Rng& rng) {
  if (samples < 1000) throw std::invalid_argument("mcValue: use at least 1000 samples");
  Scalar sum = 0.0, sumSq = 0.0;
  for (int s = 0; s < samples; ++s) {
    EpisodeSim sim(env, rng);
    Scalar ret = 0.0;
    for (int t = 0; t < env.horizon(); ++t) {
      const Vector dist = policy.at(t, sim.observe());
      ret += sim.step(rng.categorical(dist))[player];
    }
    sum += ret;
    sumSq += ret * ret;
  }
  const Scalar mean = sum / samples;
  const Scalar var = std::max(0.0, sumSq / samples - mean * mean);
  return {mean, std::sqrt(var / samples)};
}

namespace {

// Value of the deviator's deterministic policy by forward propagation of the
// state distribution; opponents follow the conditional marginal of `policy`.
Scalar forwardValue(const FiniteHorizonModel& model, const PolicyTable& policy, int player,
                    const std::vector<IntVector>& det) {
  const int A = model.jointActions();
  Vector flow = model.init;
  Scalar value = 0.0;
  for (int h = 0; h < model.horizon; ++h) {
    const int S = model.stateCount[h];
    Vector next = Vector::Zero(model.stateCount[h + 1]);
    for (int s = 0; s < S; ++s) {
      if (flow[s] == 0.0) continue;
      for (int a = 0; a < A; ++a) {
        const Scalar w = policy.table[h](s, a);
        if (w == 0.0) continue;
        const int played = model.actions.withAction(a, player, det[h][s]);
        value += flow[s] * w * model.rewards[h][player](s, played);
        next += flow[s] * w * model.trans[h].row(s * A + played).transpose();
      }
    }
    flow.swap(next);
  }
  return value;
}

}  // namespace

Scalar exhaustiveBestResponse(const FiniteHorizonModel& model, const PolicyTable& policy,
                              int player, const Budget& budget) {
  const int Ai = model.actions.sizes[player];
  long count = 1;
  for (int h = 0; h < model.horizon; ++h) {
    for (int s = 0; s < model.stateCount[h]; ++s) {
      count *= Ai;
      if (count > budget.maxDeterministicPolicies) {
        throw std::runtime_error("exhaustiveBestResponse: policy space exceeds budget");
      }
    }
  }
  std::vector<IntVector> det(model.horizon);
  for (int h = 0; h < model.horizon; ++h) det[h] = IntVector::Zero(model.stateCount[h]);

  Scalar best = -std::numeric_limits<Scalar>::infinity();
  while (true) {
    best = std::max(best, forwardValue(model, policy, player, det));
    // Odometer over all (step, state) slots.
    int h = model.horizon - 1, s = -1;
    bool carried = true;
    for (h = model.horizon - 1; h >= 0 && carried; --h) {
      for (s = model.stateCount[h] - 1; s >= 0 && carried; --s) {
        if (++det[h][s] < Ai) {
          carried = false;
        } else {
          det[h][s] = 0;
        }
      }
    }
    if (carried) break;
  }
  return best;
}

Scalar gridMinimaxValue(const Matrix& payoff, Scalar step) {
  const int rows = static_cast<int>(payoff.rows());
  if (rows > 3) throw std::runtime_error("gridMinimaxValue: at most 3 row actions");
  const int n = static_cast<int>(std::round(1.0 / step));
  Scalar best = -std::numeric_limits<Scalar>::infinity();
  Vector x(rows);
  for (int i = 0; i <= n; ++i) {
    const int jMax = rows >= 2 ? n - i : 0;
    for (int j = 0; j <= jMax; ++j) {
      x.setZero();
      x[0] = static_cast<Scalar>(i) / n;
      if (rows >= 2) x[1] = static_cast<Scalar>(j) / n;
      if (rows >= 3) x[2] = 1.0 - x[0] - x[1];
      const Scalar worst = (payoff.transpose() * x).minCoeff();
      if (worst > best) best = worst;
    }
  }
  return best;
}

Vector denseRidgeWeights(const Matrix& features, const Vector& targets, Scalar lambda) {
  const int n = static_cast<int>(features.rows());
  const int d = static_cast<int>(features.cols());
  const Matrix gram = features.transpose() * features / n + lambda * Matrix::Identity(d, d);
  const Vector rhs = features.transpose() * targets / n;
  return gram.fullPivLu().solve(rhs);
}

}  // namespace mgrl::oracle
