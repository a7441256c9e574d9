#include "mgrl/planner.hpp"

#include <cmath>
#include <stdexcept>

namespace mgrl {

Variant variantFromString(const std::string& s) {
  if (s == "mb") return Variant::ModelBased;
  if (s == "mf") return Variant::ModelFree;
  if (s == "factored") return Variant::Factored;
  throw std::invalid_argument("unknown variant: " + s);
}

std::string variantName(Variant v) {
  switch (v) {
    case Variant::ModelBased: return "mb";
    case Variant::ModelFree: return "mf";
    default: return "factored";
  }
}

Covariance::Covariance(int dim, Scalar lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("Covariance: lambda must be positive");
  sigma_ = lambda * Matrix::Identity(dim, dim);
}

void Covariance::add(const Vector& phi) {
  sigma_.noalias() += phi * phi.transpose();
  dirty_ = true;
}

void Covariance::addOneHot(int index, Scalar weight) {
  sigma_(index, index) += weight;
  dirty_ = true;
}

void Covariance::refresh() const {
  if (dirty_) {
    ldlt_.compute(sigma_);
    dirty_ = false;
  }
}

Scalar Covariance::ellipticalNorm(const Vector& phi) const {
  refresh();
  return std::sqrt(phi.dot(ldlt_.solve(phi)));
}

Scalar Covariance::ellipticalNormOneHot(int index) const {
  refresh();
  Vector e = Vector::Zero(dim());
  e[index] = 1.0;
  return std::sqrt(e.dot(ldlt_.solve(e)));
}

Scalar bonusValue(const Covariance& cov, const Vector& phi, Scalar alpha, Scalar horizon) {
  return std::min(alpha * cov.ellipticalNorm(phi), horizon);
}

Scalar BonusParams::alpha(Variant v, const ScheduleContext& ctx) const {
  if (mode == BonusMode::Constant) return constAlpha;
  const Scalar H = ctx.horizon, d = ctx.featureDim, A = ctx.jointActions;
  const Scalar At = ctx.maxPlayerActions, M = ctx.players, N = ctx.episodes;
  const Scalar cls = std::max<Scalar>(ctx.classSize, 2.0);
  switch (v) {
    case Variant::ModelBased:
      return cAlpha * H * d * std::sqrt(A * std::log(cls * H * N / delta));
    case Variant::ModelFree:
      return cAlpha * H * A * d * std::sqrt(M * std::log(d * N * H * A * M * cls / delta));
    default:
      return cAlpha * H * At * std::pow(d, ctx.neighborhood) *
             std::sqrt(ctx.neighborhood * std::log(cls * H * N * M / delta));
  }
}

Scalar BonusParams::zeta(Variant v, int episode, const ScheduleContext& ctx) const {
  const Scalar n = std::max(episode, 1);
  const Scalar H = ctx.horizon, d = ctx.featureDim, A = ctx.jointActions;
  const Scalar M = ctx.players, N = ctx.episodes;
  const Scalar cls = std::max<Scalar>(ctx.classSize, 2.0);
  if (mode == BonusMode::Constant) return cZeta * std::log(H * N) / n;
  switch (v) {
    case Variant::ModelBased:
      return cZeta * std::log(cls * H * N / delta) / n;
    case Variant::ModelFree:
      return cZeta * d * d * A * std::log(d * N * H * A * M * cls / delta) / n;
    default:
      return cZeta * std::log(cls * H * N * M / delta) / n;
  }
}

Scalar gapSlack(Variant v, const ScheduleContext& ctx, Scalar zeta) {
  if (v == Variant::Factored) {
    return 2.0 * ctx.horizon * ctx.players * std::sqrt(ctx.maxPlayerActions * zeta);
  }
  return 2.0 * ctx.horizon * std::sqrt(ctx.jointActions * zeta);
}

Scalar computeGap(const Vector& vOpt, const Vector& vPes, Scalar slack) {
  return (vOpt - vPes).maxCoeff() + slack;
}

PlanResult mbPlan(const BlockEnv& env, const std::vector<PlanStepInput>& steps, Concept c,
                  Scalar stageEps, int stageMaxIters) {
  if (env.mode != ObsMode::Finite) {
    throw std::runtime_error("mbPlan: model-based planning requires finite observations");
  }
  const int H = env.horizon();
  const int S = env.symbolCount();
  const int A = env.actions().jointCount();
  const int M = env.players();
  const Scalar horizon = static_cast<Scalar>(H);

  PlanResult result;
  auto dists = std::make_shared<std::vector<Matrix>>(H);
  Matrix vOpt = Matrix::Zero(S, M), vPes = Matrix::Zero(S, M);
  std::vector<Vector> payoffs(M);

  for (int h = H - 1; h >= 0; --h) {
    const PlanStepInput& in = steps[h];
    // continuation(k, i) = sum_{o'} Phat(o'|k) V_{h+1,i}(o'), k = z*A + a.
    const Matrix contOpt = in.nextObs * vOpt;
    const Matrix contPes = in.nextObs * vPes;
    Matrix newOpt = Matrix::Zero(S, M), newPes = Matrix::Zero(S, M);
    (*dists)[h].resize(S, A);
    for (int s = 0; s < S; ++s) {
      const int z = in.decoderMap[s];
      Observation obs;
      obs.step = h;
      obs.symbol = s;
      Matrix qOpt(A, M), qPes(A, M);
      for (int a = 0; a < A; ++a) {
        const int k = z * A + a;
        const Scalar beta = in.bonus(s, a);
        for (int i = 0; i < M; ++i) {
          const Scalar r = env.reward(h, i, obs, a);
          qOpt(a, i) = r + beta + contOpt(k, i);
          qPes(a, i) = r - beta + contPes(k, i);
        }
      }
      StageGame stage;
      stage.actions = env.actions();
      stage.bound = horizon * (horizon + 1.0);
      stage.payoffs.resize(M);
      for (int i = 0; i < M; ++i) stage.payoffs[i] = qOpt.col(i);
      const StageSolution sol = solveStage(stage, c, stageEps, stageMaxIters);
      result.stageConverged = result.stageConverged && sol.converged;
      result.stageIterationsMax = std::max(result.stageIterationsMax, sol.iterations);
      (*dists)[h].row(s) = sol.dist.transpose();
      for (int i = 0; i < M; ++i) {
        newOpt(s, i) = sol.dist.dot(qOpt.col(i));
        newPes(s, i) = sol.dist.dot(qPes.col(i));
      }
      result.maxSandwichViolation =
          std::max(result.maxSandwichViolation, (newPes.row(s) - newOpt.row(s)).maxCoeff());
    }
    vOpt.swap(newOpt);
    vPes.swap(newPes);
  }

  Vector initObs(S);
  for (int s = 0; s < S; ++s) {
    initObs[s] = env.latent.init[s / env.symbolsPerLatent] / env.symbolsPerLatent;
  }
  result.vOpt = vOpt.transpose() * initObs;
  result.vPes = vPes.transpose() * initObs;

  const auto kind =
      c == Concept::NE ? JointPolicy::Kind::Product : JointPolicy::Kind::Correlated;
  const int jointA = A;
  result.policy = JointPolicy(kind, H, env.actions(),
                              [dists, jointA](int h, const Observation& obs) -> Vector {
                                if (!obs.isFinite() || h >= static_cast<int>(dists->size()) ||
                                    obs.symbol >= (*dists)[h].rows()) {
                                  return Vector::Constant(jointA, 1.0 / jointA);
                                }
                                return (*dists)[h].row(obs.symbol).transpose();
                              });
  return result;
}

LsviStateEval evalLsviState(const LsviPolicyData& data, int h, const Observation& obs) {
  const BlockEnv& env = *data.env;
  const int A = env.actions().jointCount();
  const int M = env.players();
  const LsviStepWeights& w = data.steps[h];
  const int raw = rawStateIndex(env, obs);
  const int z = w.decoder.decode(raw);
  const int zTrue = env.decodeTrue(obs);  // reward channel only

  Matrix qOpt(A, M), qPes(A, M);
  for (int a = 0; a < A; ++a) {
    const int k = z * A + a;
    const Scalar beta = w.bonusPerBucket[k];
    for (int i = 0; i < M; ++i) {
      const Scalar r = env.latent.reward(h, i, zTrue, a);
      qOpt(a, i) = std::clamp(r + w.thetaOpt(k, i) + beta, -data.clip, data.clip);
      qPes(a, i) = std::clamp(r + w.thetaPes(k, i) - beta, -data.clip, data.clip);
    }
  }
  StageGame stage;
  stage.actions = env.actions();
  stage.bound = data.clip;
  stage.payoffs.resize(M);
  for (int i = 0; i < M; ++i) stage.payoffs[i] = qOpt.col(i);
  const StageSolution sol = solveStage(stage, data.concept_, data.stageEps, data.stageMaxIters);

  LsviStateEval out;
  out.dist = sol.dist;
  out.vOpt.resize(M);
  out.vPes.resize(M);
  for (int i = 0; i < M; ++i) {
    out.vOpt[i] = sol.dist.dot(qOpt.col(i));
    out.vPes[i] = sol.dist.dot(qPes.col(i));
  }
  out.iterations = sol.iterations;
  out.converged = sol.converged;
  return out;
}

LsviPlanOutput lsviPlan(const BlockEnv& env, const Dataset& dataset,
                        const std::vector<CandidateDecoder>& selectedDecoders, Scalar lambda,
                        Scalar alpha, Concept c, Scalar stageEps, int stageMaxIters) {
  const int H = env.horizon();
  const int A = env.actions().jointCount();
  const int M = env.players();
  const int Z = env.latentCount();
  const int d = Z * A;

  auto data = std::make_shared<LsviPolicyData>();
  data->env = &env;
  data->concept_ = c;
  data->stageEps = stageEps;
  data->stageMaxIters = stageMaxIters;
  data->clip = 2.0 * H;  // H (B_r + 1) with rewards in [-1, 1]
  data->steps.resize(H);

  LsviPlanOutput out;
  out.simplexMinEntry = Vector::Zero(H);
  out.simplexMaxMass = Vector::Zero(H);

  for (int h = H - 1; h >= 0; --h) {
    const StepData& step = dataset.steps[h];
    const int n = static_cast<int>(step.main.size() + step.tilde.size());
    if (n == 0) {
      throw std::runtime_error("lsviPlan: empty buffer at step " + std::to_string(h) +
                               "; collect data before planning");
    }
    const RidgeTransition rt =
        nonparametricTransition(env, selectedDecoders[h], step, Z, lambda);
    rt.simplexReport(&out.simplexMinEntry[h], &out.simplexMaxMass[h]);

    // Bonus covariance over the main buffer only.
    Covariance bonusCov(d, lambda);
    for (const Triple& t : step.main) {
      bonusCov.addOneHot(selectedDecoders[h].decode(rawStateIndex(env, t.obs)) * A +
                         t.jointAction);
    }
    LsviStepWeights& w = data->steps[h];
    w.decoder = selectedDecoders[h];
    w.bonusPerBucket.resize(d);
    for (int k = 0; k < d; ++k) {
      w.bonusPerBucket[k] = std::min(alpha * bonusCov.ellipticalNormOneHot(k),
                                     static_cast<Scalar>(H));
    }

    // Regression targets: next-state values under the already-computed
    // step h+1 weights (zero at the horizon).
    Matrix targetOpt = Matrix::Zero(n, M), targetPes = Matrix::Zero(n, M);
    if (h + 1 < H) {
      for (int j = 0; j < n; ++j) {
        const Triple& t = j < static_cast<int>(step.main.size())
                              ? step.main[j]
                              : step.tilde[j - step.main.size()];
        const LsviStateEval ev = evalLsviState(*data, h + 1, t.next);
        targetOpt.row(j) = ev.vOpt.transpose();
        targetPes.row(j) = ev.vPes.transpose();
        out.plan.stageConverged = out.plan.stageConverged && ev.converged;
        out.plan.stageIterationsMax = std::max(out.plan.stageIterationsMax, ev.iterations);
        out.plan.maxSandwichViolation =
            std::max(out.plan.maxSandwichViolation, (ev.vPes - ev.vOpt).maxCoeff());
      }
    }
    w.thetaOpt.resize(d, M);
    w.thetaPes.resize(d, M);
    for (int i = 0; i < M; ++i) {
      w.thetaOpt.col(i) = rt.weights(targetOpt.col(i));
      w.thetaPes.col(i) = rt.weights(targetPes.col(i));
    }
  }

  // Initial values: integrate V_1 against d1 through the emission process.
  out.plan.vOpt = Vector::Zero(M);
  out.plan.vPes = Vector::Zero(M);
  if (env.mode == ObsMode::Finite) {
    for (int s = 0; s < env.symbolCount(); ++s) {
      Observation obs;
      obs.step = 0;
      obs.symbol = s;
      const LsviStateEval ev = evalLsviState(*data, 0, obs);
      const Scalar weight = env.latent.init[s / env.symbolsPerLatent] / env.symbolsPerLatent;
      out.plan.vOpt += weight * ev.vOpt;
      out.plan.vPes += weight * ev.vPes;
      out.plan.maxSandwichViolation =
          std::max(out.plan.maxSandwichViolation, (ev.vPes - ev.vOpt).maxCoeff());
    }
  } else {
    for (int z = 0; z < Z; ++z) {
      const LsviStateEval ev = evalLsviState(*data, 0, env.centroid(0, z));
      out.plan.vOpt += env.latent.init[z] * ev.vOpt;
      out.plan.vPes += env.latent.init[z] * ev.vPes;
      out.plan.maxSandwichViolation =
          std::max(out.plan.maxSandwichViolation, (ev.vPes - ev.vOpt).maxCoeff());
    }
  }

  const auto kind =
      c == Concept::NE ? JointPolicy::Kind::Product : JointPolicy::Kind::Correlated;
  std::shared_ptr<LsviPolicyData> payload = data;
  out.plan.policy = JointPolicy(kind, H, env.actions(),
                                [payload](int h, const Observation& obs) {
                                  return evalLsviState(*payload, h, obs).dist;
                                });
  out.data = payload;
  return out;
}

Scalar factoredBonus(const std::vector<Vector>& kronFeatures,
                     const std::vector<Covariance>& covariances, Scalar alpha, Scalar horizon) {
  Scalar total = 0.0;
  for (size_t i = 0; i < kronFeatures.size(); ++i) {
    total += std::min(alpha * covariances[i].ellipticalNorm(kronFeatures[i]), horizon);
  }
  return total;
}

}  // namespace mgrl
