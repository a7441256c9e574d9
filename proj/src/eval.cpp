#include "mgrl/eval.hpp"

#include <limits>
#include <stdexcept>

namespace mgrl {

Concept conceptFromString(const std::string& name) {
  if (name == "ne") return Concept::NE;
  if (name == "cce") return Concept::CCE;
  if (name == "ce") return Concept::CE;
  throw std::invalid_argument("unknown concept: " + name);
}

std::string conceptName(Concept c) {
  switch (c) {
    case Concept::NE: return "ne";
    case Concept::CCE: return "cce";
    default: return "ce";
  }
}

ValueResult valueOfPolicy(const FiniteHorizonModel& model, const PolicyTable& policy) {
  const int A = model.jointActions();
  const int M = model.players();
  ValueResult out;
  out.values.resize(model.horizon + 1);
  out.values[model.horizon] = Matrix::Zero(model.stateCount[model.horizon], M);
  for (int h = model.horizon - 1; h >= 0; --h) {
    const int S = model.stateCount[h];
    if (policy.table[h].rows() != S || policy.table[h].cols() != A) {
      throw std::runtime_error("valueOfPolicy: policy shape mismatch at step " + std::to_string(h));
    }
    // continuation[s*A+a, i] = sum_{s'} P(s'|s,a) V_{h+1,i}(s')
    const Matrix continuation = model.trans[h] * out.values[h + 1];
    out.values[h] = Matrix::Zero(S, M);
    for (int s = 0; s < S; ++s) {
      for (int i = 0; i < M; ++i) {
        Scalar v = 0.0;
        for (int a = 0; a < A; ++a) {
          v += policy.table[h](s, a) * (model.rewards[h][i](s, a) + continuation(s * A + a, i));
        }
        out.values[h](s, i) = v;
      }
    }
  }
  out.perPlayer = out.values[0].transpose() * model.init;
  return out;
}

BestResponseResult bestResponseValue(const FiniteHorizonModel& model, const PolicyTable& policy,
                                     int player) {
  const int A = model.jointActions();
  const int Ai = model.actions.sizes[player];
  BestResponseResult out;
  out.values.resize(model.horizon + 1);
  out.greedy.resize(model.horizon);
  out.values[model.horizon] = Matrix::Zero(model.stateCount[model.horizon], 1);
  for (int h = model.horizon - 1; h >= 0; --h) {
    const int S = model.stateCount[h];
    const Matrix continuation = model.trans[h] * out.values[h + 1];
    out.values[h] = Matrix::Zero(S, 1);
    out.greedy[h] = IntVector::Zero(S);
    for (int s = 0; s < S; ++s) {
      // Opponent profile weights: marginalize the deviator's own action out
      // of the correlated row, then score each own action against it.
      Scalar best = -std::numeric_limits<Scalar>::infinity();
      int bestAction = 0;
      for (int ai = 0; ai < Ai; ++ai) {
        Scalar q = 0.0;
        for (int a = 0; a < A; ++a) {
          const Scalar w = policy.table[h](s, a);
          if (w == 0.0) continue;
          const int swapped = model.actions.withAction(a, player, ai);
          q += w * (model.rewards[h][player](s, swapped) + continuation(s * A + swapped, 0));
        }
        if (q > best) {  // lowest-index maximizer wins ties
          best = q;
          bestAction = ai;
        }
      }
      out.values[h](s, 0) = best;
      out.greedy[h][s] = bestAction;
    }
  }
  out.value = (out.values[0].col(0).transpose() * model.init)(0, 0);
  return out;
}

Scalar swapDeviationValue(const FiniteHorizonModel& model, const PolicyTable& policy, int player) {
  const int A = model.jointActions();
  const int Ai = model.actions.sizes[player];
  Matrix next = Matrix::Zero(model.stateCount[model.horizon], 1);
  Matrix cur;
  for (int h = model.horizon - 1; h >= 0; --h) {
    const int S = model.stateCount[h];
    const Matrix continuation = model.trans[h] * next;
    cur = Matrix::Zero(S, 1);
    for (int s = 0; s < S; ++s) {
      // V(s) = sum over recommended own actions of the best substituted
      // action's expected payoff against the conditional opponent profile.
      Scalar v = 0.0;
      for (int rec = 0; rec < Ai; ++rec) {
        Scalar best = -std::numeric_limits<Scalar>::infinity();
        bool recommended = false;
        for (int sub = 0; sub < Ai; ++sub) {
          Scalar q = 0.0;
          for (int a = 0; a < A; ++a) {
            if (model.actions.playerAction(a, player) != rec) continue;
            const Scalar w = policy.table[h](s, a);
            if (w == 0.0) continue;
            recommended = true;
            const int swapped = model.actions.withAction(a, player, sub);
            q += w * (model.rewards[h][player](s, swapped) + continuation(s * A + swapped, 0));
          }
          if (q > best) best = q;
        }
        if (recommended) v += best;
      }
      cur(s, 0) = v;
    }
    next = cur;
  }
  return (next.col(0).transpose() * model.init)(0, 0);
}

Scalar exploitability(const FiniteHorizonModel& model, const PolicyTable& policy, Concept c) {
  const ValueResult base = valueOfPolicy(model, policy);
  Scalar gap = -std::numeric_limits<Scalar>::infinity();
  for (int i = 0; i < model.players(); ++i) {
    const Scalar deviation = c == Concept::CE
                                 ? swapDeviationValue(model, policy, i)
                                 : bestResponseValue(model, policy, i).value;
    gap = std::max(gap, deviation - base.perPlayer[i]);
  }
  return gap;
}

Scalar exploitability(const BlockEnv& env, const JointPolicy& policy, Concept c) {
  const EvalView view = EvalView::make(env);
  return exploitability(view.model(), policy.materialize(view), c);
}

Vector policyValues(const BlockEnv& env, const JointPolicy& policy) {
  const EvalView view = EvalView::make(env);
  return valueOfPolicy(view.model(), policy.materialize(view)).perPlayer;
}

}  // namespace mgrl
