#include "mgrl/equilibrium.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mgrl {

namespace {

// Expected payoff of each of player i's actions against the other players'
// current mixed strategies: u[a_i] = E_{a_{-i}}[payoff_i(a_i, a_{-i})].
Vector actionValuesFor(const StageGame& game, const std::vector<Vector>& strategies, int i) {
  const int M = game.players();
  const int A = game.jointActions();
  Vector out = Vector::Zero(game.actions.sizes[i]);
  std::vector<int> acts;
  for (int a = 0; a < A; ++a) {
    game.actions.unflatten(a, acts);
    Scalar wi = 1.0;
    for (int j = 0; j < M; ++j) {
      if (j != i) wi *= strategies[j][acts[j]];
    }
    if (wi != 0.0) out[acts[i]] += wi * game.payoff(i, a);
  }
  return out;
}

Vector strategyFromRegret(const Vector& regret) {
  Vector pos = regret.cwiseMax(0.0);
  const Scalar total = pos.sum();
  if (total <= 0.0) return Vector::Constant(regret.size(), 1.0 / regret.size());
  return pos / total;
}

// Predictive regret-matching-plus state: the strategy plays against the
// accumulated regret plus the last instantaneous regret as a prediction.
struct PrmState {
  Vector regret;
  Vector prediction;

  explicit PrmState(int n) : regret(Vector::Zero(n)), prediction(Vector::Zero(n)) {}

  Vector strategy() const { return strategyFromRegret(regret + prediction); }

  void observe(const Vector& utilities, const Vector& played) {
    const Vector inst = utilities.array() - played.dot(utilities);
    regret = (regret + inst).cwiseMax(0.0);
    prediction = inst;
  }
};

// Stationary distribution of the swap-regret chain: p = p M with
// M[a,a'] = R+[a,a']/mu off-diagonal and the remainder on the diagonal.
// Power iteration from uniform stays on the simplex and is deterministic.
Vector stationaryFromSwapRegret(const Matrix& regret) {
  const int n = static_cast<int>(regret.rows());
  Matrix pos = regret.cwiseMax(0.0);
  pos.diagonal().setZero();
  const Scalar rowMax = pos.rowwise().sum().maxCoeff();
  if (rowMax <= 0.0) return Vector::Constant(n, 1.0 / n);
  const Scalar mu = rowMax * (1.0 + 1e-3);
  Matrix chain = pos / mu;
  for (int a = 0; a < n; ++a) chain(a, a) = 1.0 - chain.row(a).sum() + chain(a, a);
  Vector p = Vector::Constant(n, 1.0 / n);
  for (int it = 0; it < 256; ++it) {
    Vector next = chain.transpose() * p;
    next /= next.sum();
    const Scalar delta = (next - p).cwiseAbs().maxCoeff();
    p = next;
    if (delta <= 1e-14) break;
  }
  return p;
}

void accumulateJoint(const StageGame& game, const std::vector<Vector>& strategies, Vector& acc) {
  const int A = game.jointActions();
  std::vector<int> acts;
  for (int a = 0; a < A; ++a) {
    game.actions.unflatten(a, acts);
    Scalar w = 1.0;
    for (int j = 0; j < game.players(); ++j) w *= strategies[j][acts[j]];
    acc[a] += w;
  }
}

bool shouldCheck(int t, int maxIters) {
  return t <= 8 || t % 32 == 0 || t == maxIters;
}

}  // namespace

std::string StageGame::describe() const {
  std::ostringstream os;
  os << players() << "-player stage game, joint actions " << jointActions() << "\n";
  std::vector<int> acts;
  for (int a = 0; a < jointActions(); ++a) {
    actions.unflatten(a, acts);
    os << "(";
    for (size_t j = 0; j < acts.size(); ++j) os << (j ? "," : "") << acts[j];
    os << "):";
    for (int i = 0; i < players(); ++i) os << " " << payoff(i, a);
    os << "\n";
  }
  return os.str();
}

Vector deviationGap(const StageGame& game, const Vector& dist, Concept c) {
  const int M = game.players();
  const int A = game.jointActions();
  Vector gaps(M);
  for (int i = 0; i < M; ++i) {
    const int Ai = game.actions.sizes[i];
    const Scalar base = game.expectedPayoff(i, dist);
    if (c == Concept::CE) {
      // Best swap map decomposes per recommended action.
      Scalar gain = 0.0;
      for (int rec = 0; rec < Ai; ++rec) {
        Scalar best = 0.0;  // identity substitution yields 0
        for (int sub = 0; sub < Ai; ++sub) {
          Scalar g = 0.0;
          for (int a = 0; a < A; ++a) {
            if (game.actions.playerAction(a, i) != rec) continue;
            const Scalar w = dist[a];
            if (w == 0.0) continue;
            g += w * (game.payoff(i, game.actions.withAction(a, i, sub)) - game.payoff(i, a));
          }
          if (g > best) best = g;
        }
        gain += best;
      }
      gaps[i] = gain;
    } else {
      Scalar best = -std::numeric_limits<Scalar>::infinity();
      for (int ai = 0; ai < Ai; ++ai) {
        Scalar v = 0.0;
        for (int a = 0; a < A; ++a) {
          if (dist[a] == 0.0) continue;
          v += dist[a] * game.payoff(i, game.actions.withAction(a, i, ai));
        }
        if (v > best) best = v;
      }
      gaps[i] = best - base;
    }
  }
  return gaps;
}

StageSolution solveZeroSumNash(const StageGame& game, Scalar eps, int maxIters) {
  if (game.players() != 2) {
    throw std::invalid_argument("solveZeroSumNash: exactly two players required; use CCE/CE");
  }
  const int A1 = game.actions.sizes[0];
  const int A2 = game.actions.sizes[1];
  Matrix U(A1, A2);
  for (int a1 = 0; a1 < A1; ++a1) {
    for (int a2 = 0; a2 < A2; ++a2) {
      const int joint = a1 * A2 + a2;
      U(a1, a2) = game.payoff(0, joint);
      if (std::abs(game.payoff(1, joint) + U(a1, a2)) > 1e-12) {
        throw std::invalid_argument(
            "solveZeroSumNash: game is not zero-sum; general-sum Nash is not supported, "
            "use CCE/CE");
      }
    }
  }

  // Predictive regret matching with alternating updates and quadratic
  // averaging; gap certified against exact best responses.
  PrmState row(A1), col(A2);
  Vector p1 = row.strategy(), p2 = col.strategy();
  Vector avg1 = Vector::Zero(A1), avg2 = Vector::Zero(A2);
  StageSolution sol;
  for (int t = 1; t <= maxIters; ++t) {
    const Vector u1 = U * p2;
    row.observe(u1, p1);
    p1 = row.strategy();
    const Vector u2 = -(U.transpose() * p1);
    col.observe(u2, p2);
    p2 = col.strategy();
    const Scalar w = static_cast<Scalar>(t) * t;
    avg1 += w * p1;
    avg2 += w * p2;

    if (shouldCheck(t, maxIters)) {
      const Vector x = avg1 / avg1.sum();
      const Vector y = avg2 / avg2.sum();
      const Scalar value = x.dot(U * y);
      const Scalar brRow = (U * y).maxCoeff();
      const Scalar brCol = (U.transpose() * x).minCoeff();
      const Scalar dualityGap = brRow - brCol;
      if (dualityGap <= eps || t == maxIters) {
        sol.marginals = {x, y};
        sol.dist = Vector::Zero(A1 * A2);
        for (int a1 = 0; a1 < A1; ++a1) {
          for (int a2 = 0; a2 < A2; ++a2) sol.dist[a1 * A2 + a2] = x[a1] * y[a2];
        }
        sol.gaps = Vector(2);
        sol.gaps[0] = brRow - value;
        sol.gaps[1] = value - brCol;
        sol.iterations = t;
        sol.converged = dualityGap <= eps;
        return sol;
      }
    }
  }
  throw std::logic_error("solveZeroSumNash: unreachable");
}

namespace {

// Predictive internal (swap) regret state; the strategy is the stationary
// distribution of the positive-part regret chain.
struct SwapPrmState {
  Matrix regret;
  Matrix prediction;

  explicit SwapPrmState(int n)
      : regret(Matrix::Zero(n, n)), prediction(Matrix::Zero(n, n)) {}

  Vector strategy() const { return stationaryFromSwapRegret(regret + prediction); }

  void observe(const Vector& utilities, const Vector& played) {
    const int n = static_cast<int>(utilities.size());
    for (int rec = 0; rec < n; ++rec) {
      for (int sub = 0; sub < n; ++sub) {
        prediction(rec, sub) = played[rec] * (utilities[sub] - utilities[rec]);
      }
    }
    regret = (regret + prediction).cwiseMax(0.0);
  }
};

StageSolution solveByRegretMatching(const StageGame& game, Concept c, Scalar eps,
                                    int maxIters) {
  const int M = game.players();
  const int A = game.jointActions();
  const bool swap = c == Concept::CE;

  std::vector<PrmState> ext;
  std::vector<SwapPrmState> internal;
  std::vector<Vector> strategies(M);
  for (int i = 0; i < M; ++i) {
    ext.emplace_back(game.actions.sizes[i]);
    internal.emplace_back(game.actions.sizes[i]);
    strategies[i] = swap ? internal[i].strategy() : ext[i].strategy();
  }

  Vector accum = Vector::Zero(A);
  Vector weighted(A);
  StageSolution sol;
  for (int t = 1; t <= maxIters; ++t) {
    // Alternating updates: each player responds to the already-updated
    // strategies of lower-indexed players.
    for (int i = 0; i < M; ++i) {
      const Vector values = actionValuesFor(game, strategies, i);
      if (swap) {
        internal[i].observe(values, strategies[i]);
        strategies[i] = internal[i].strategy();
      } else {
        ext[i].observe(values, strategies[i]);
        strategies[i] = ext[i].strategy();
      }
    }
    weighted.setZero();
    accumulateJoint(game, strategies, weighted);
    accum += (static_cast<Scalar>(t) * t) * weighted;

    if (shouldCheck(t, maxIters)) {
      const Vector dist = accum / accum.sum();
      const Vector gaps = deviationGap(game, dist, c);
      if (gaps.maxCoeff() <= eps || t == maxIters) {
        sol.dist = dist;
        sol.gaps = gaps;
        sol.iterations = t;
        sol.converged = gaps.maxCoeff() <= eps;
        return sol;
      }
    }
  }
  throw std::logic_error("solveByRegretMatching: unreachable");
}

}  // namespace

StageSolution solveCce(const StageGame& game, Scalar eps, int maxIters) {
  return solveByRegretMatching(game, Concept::CCE, eps, maxIters);
}

StageSolution solveCe(const StageGame& game, Scalar eps, int maxIters) {
  return solveByRegretMatching(game, Concept::CE, eps, maxIters);
}

StageSolution solveStage(const StageGame& game, Concept c, Scalar eps, int maxIters) {
  switch (c) {
    case Concept::NE: return solveZeroSumNash(game, eps, maxIters);
    case Concept::CCE: return solveCce(game, eps, maxIters);
    default: return solveCe(game, eps, maxIters);
  }
}

}  // namespace mgrl
