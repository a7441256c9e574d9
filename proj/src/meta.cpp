#include "mgrl/meta.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mgrl/eval.hpp"

namespace mgrl {

namespace {

double msSince(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

ScheduleContext makeContext(const GeneratedEnv& g, const RunConfig& config, Scalar classSize,
                            int featureDim, int neighborhood) {
  ScheduleContext ctx;
  ctx.horizon = g.env.horizon();
  ctx.featureDim = featureDim;
  ctx.jointActions = g.env.actions().jointCount();
  ctx.maxPlayerActions = g.env.actions().maxPlayerActions();
  ctx.players = g.env.players();
  ctx.episodes = config.episodes;
  ctx.classSize = classSize;
  ctx.neighborhood = neighborhood;
  return ctx;
}

struct BestTracker {
  int episode = 0;
  Scalar delta = std::numeric_limits<Scalar>::infinity();
  JointPolicy policy;

  void offer(int n, Scalar d, const JointPolicy& p) {
    if (d < delta) {
      delta = d;
      episode = n;
      policy = p;
    }
  }
};

/// Shared episode bookkeeping: gap, cadence evaluation, logging.
void finishEpisode(const GeneratedEnv& g, const RunConfig& config, int n, const PlanResult& plan,
                   Scalar delta, const std::chrono::steady_clock::time_point& t0,
                   BestTracker& best, RunResult& out) {
  JointPolicy policy = plan.policy;
  policy.setProvenanceEpisode(n);
  best.offer(n, delta, policy);

  EpisodeRecord rec;
  rec.episode = n;
  rec.delta = delta;
  rec.vOpt = plan.vOpt;
  rec.vPes = plan.vPes;
  rec.bufferSize = n;
  rec.sandwichViolation = plan.maxSandwichViolation;
  out.maxSandwichViolation = std::max(out.maxSandwichViolation, plan.maxSandwichViolation);
  if (config.evalEvery > 0 && n % config.evalEvery == 0) {
    rec.exploit = exploitability(g.env, policy, config.concept_);
  }
  rec.wallMs = msSince(t0);
  out.log.push_back(std::move(rec));
}

void finalizeRun(const GeneratedEnv& g, const RunConfig& config, BestTracker& best,
                 RunResult& out) {
  out.finalPolicy = best.policy;
  out.bestEpisode = best.episode;
  out.bestDelta = best.delta;
  out.finalExploit = exploitability(g.env, out.finalPolicy, config.concept_);
}

}  // namespace

void collectTriples(const BlockEnv& env, const JointPolicy& prev, int h, Rng& rng,
                    StepData& out) {
  const int A = env.actions().jointCount();
  const auto policyFn = [&prev](int t, const Observation& obs) { return prev.at(t, obs); };

  {
    EpisodeSim sim = rollIn(env, policyFn, h, rng);
    Triple t;
    t.obs = sim.observe();
    t.jointAction = rng.uniformInt(A);
    sim.step(t.jointAction);
    t.next = sim.observe();
    out.main.push_back(std::move(t));
  }
  {
    // Companion buffer: state reached by one uniform step past level h-1;
    // at h = 0 that degenerates to a fresh draw from the initial state.
    EpisodeSim sim = h == 0 ? EpisodeSim(env, rng) : rollIn(env, policyFn, h - 1, rng);
    if (h > 0) {
      sim.observe();
      sim.step(rng.uniformInt(A));
    }
    Triple t;
    t.obs = sim.observe();
    t.jointAction = rng.uniformInt(A);
    sim.step(t.jointAction);
    t.next = sim.observe();
    out.tilde.push_back(std::move(t));
  }
}

RunResult runModelBased(const GeneratedEnv& g, const RunConfig& config) {
  const BlockEnv& env = g.env;
  if (env.mode != ObsMode::Finite) {
    throw std::runtime_error("runModelBased: finite-categorical observations required");
  }
  if (g.mbClass.perStep.empty()) {
    throw std::runtime_error("runModelBased: environment carries no model class");
  }
  const int H = env.horizon();
  const int A = env.actions().jointCount();
  const int Z = env.latentCount();
  const int S = env.symbolCount();
  const int d = Z * A;

  Scalar classSize = 0;
  for (const auto& per : g.mbClass.perStep) classSize = std::max<Scalar>(classSize, per.size());
  const ScheduleContext ctx = makeContext(g, config, classSize, d, 1);
  const Scalar alpha = config.bonus.alpha(Variant::ModelBased, ctx);

  Rng rng(config.seed);
  Dataset data(H);
  JointPolicy prev = JointPolicy::uniform(H, env.actions());
  RunResult out;
  BestTracker best;

  std::vector<int> selected(H, 0);
  for (int n = 1; n <= config.episodes; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int h = H - 1; h >= 0; --h) {
      collectTriples(env, prev, h, rng, data.steps[h]);
      selected[h] = mleFit(env, g.mbClass.perStep[h], data.steps[h]).selected;
    }

    std::vector<PlanStepInput> steps(H);
    for (int h = 0; h < H; ++h) {
      const MbCandidate& cand = g.mbClass.perStep[h][selected[h]];
      steps[h].decoderMap = cand.decoder.map;
      steps[h].nextObs = cand.nextObs;
      Covariance cov(d, config.bonus.lambda);
      for (const Triple& t : data.steps[h].main) {
        cov.addOneHot(cand.decoder.decode(t.obs.symbol) * A + t.jointAction);
      }
      Vector perBucket(d);
      for (int k = 0; k < d; ++k) {
        perBucket[k] = std::min(alpha * cov.ellipticalNormOneHot(k), static_cast<Scalar>(H));
      }
      steps[h].bonus.resize(S, A);
      for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
          steps[h].bonus(s, a) = perBucket[cand.decoder.decode(s) * A + a];
        }
      }
    }
    PlanResult plan = mbPlan(env, steps, config.concept_, config.stageEps, config.stageMaxIters);
    const Scalar zeta = config.bonus.zeta(Variant::ModelBased, n, ctx);
    const Scalar delta = computeGap(plan.vOpt, plan.vPes, gapSlack(Variant::ModelBased, ctx, zeta));
    prev = plan.policy;
    finishEpisode(g, config, n, plan, delta, t0, best, out);
  }
  finalizeRun(g, config, best, out);
  return out;
}

RunResult runModelFree(const GeneratedEnv& g, const RunConfig& config) {
  const BlockEnv& env = g.env;
  if (g.mfClass.perLevel.empty()) {
    throw std::runtime_error("runModelFree: environment carries no feature class");
  }
  const int H = env.horizon();
  const int Z = env.latentCount();
  const int A = env.actions().jointCount();

  Scalar classSize = 0;
  for (const auto& per : g.mfClass.perLevel) classSize = std::max<Scalar>(classSize, per.size());
  const ScheduleContext ctx = makeContext(g, config, classSize, Z * A, 1);
  const Scalar alpha = config.bonus.alpha(Variant::ModelFree, ctx);
  const DiscriminatorClass discriminators =
      buildDiscriminators(g.mfClass, Z, g.spec.classes.maxDiscriminatorsPerStep);

  Rng rng(config.seed);
  Dataset data(H);
  JointPolicy prev = JointPolicy::uniform(H, env.actions());
  RunResult out;
  out.minSimplexEntry = std::numeric_limits<Scalar>::infinity();
  BestTracker best;

  std::vector<CandidateDecoder> chosen(H);
  for (int n = 1; n <= config.episodes; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int h = H - 1; h >= 0; --h) {
      collectTriples(env, prev, h, rng, data.steps[h]);
      const auto& features = g.mfClass.perLevel[h];
      const auto decodedNext = decodeNextStates(env, g.mfClass.perLevel[h + 1], data.steps[h]);
      // The ridge weight is specified on the raw-sum scale; the fitting loss
      // is mean-normalized, so the per-sample weight decays as 1/|D|.
      const Scalar fitLambda = config.bonus.replearnLambda / (2.0 * n);
      const MinimaxResult fit =
          config.useIterativeFit
              ? iterativeFit(env, features, discriminators.perStep[h], decodedNext,
                             data.steps[h], Z, fitLambda, config.replearnRounds)
              : minimaxFit(env, features, discriminators.perStep[h], decodedNext, data.steps[h],
                           Z, fitLambda);
      chosen[h] = features[fit.selected];
    }

    LsviPlanOutput lsvi = lsviPlan(env, data, chosen, config.bonus.lambda, alpha,
                                   config.concept_, config.stageEps, config.stageMaxIters);
    const Scalar zeta = config.bonus.zeta(Variant::ModelFree, n, ctx);
    const Scalar delta =
        computeGap(lsvi.plan.vOpt, lsvi.plan.vPes, gapSlack(Variant::ModelFree, ctx, zeta));
    prev = lsvi.plan.policy;
    finishEpisode(g, config, n, lsvi.plan, delta, t0, best, out);
    out.log.back().simplexMinEntry = lsvi.simplexMinEntry.minCoeff();
    out.log.back().simplexMaxMass = lsvi.simplexMaxMass.maxCoeff();
    out.minSimplexEntry = std::min(out.minSimplexEntry, out.log.back().simplexMinEntry);
    out.maxSimplexMass = std::max(out.maxSimplexMass, out.log.back().simplexMaxMass);
  }
  finalizeRun(g, config, best, out);
  return out;
}

RunResult runFactored(const GeneratedEnv& g, const RunConfig& config) {
  const BlockEnv& env = g.env;
  if (!env.factored) throw std::runtime_error("runFactored: environment is not factored");
  if (g.factorClasses.perStep.empty()) {
    throw std::runtime_error("runFactored: environment carries no factor classes");
  }
  const FactoredStructure& fs = *env.factored;
  const int H = env.horizon();
  const int A = env.actions().jointCount();
  const int Z = env.latentCount();  // joint latent space
  const int M = env.players();

  // Kronecker feature dimensions and bucket strides per player.
  std::vector<int> factorDim(M), kronDim(M);
  int maxFactorDim = 1, maxNbhd = 1;
  for (int i = 0; i < M; ++i) {
    int di = env.actions().sizes[i];
    for (size_t j = 0; j < fs.neighborhoods[i].size(); ++j) di *= fs.localStates;
    factorDim[i] = di;
    maxFactorDim = std::max(maxFactorDim, di);
  }
  for (int i = 0; i < M; ++i) {
    int kd = 1;
    for (int j : fs.neighborhoods[i]) kd *= factorDim[j];
    kronDim[i] = kd;
    maxNbhd = std::max(maxNbhd, static_cast<int>(fs.neighborhoods[i].size()));
  }

  Scalar classSize = 0;
  for (const auto& perStep : g.factorClasses.perStep) {
    for (const auto& perPlayer : perStep) {
      classSize = std::max<Scalar>(classSize, perPlayer.size());
    }
  }
  const ScheduleContext ctx = makeContext(g, config, classSize, maxFactorDim, maxNbhd);
  const Scalar alpha = config.bonus.alpha(Variant::Factored, ctx);

  // kron bucket index of player i at (joint latent, joint action)
  std::vector<int> acts;
  const auto kronIndex = [&](int i, int z, int a) {
    env.actions().unflatten(a, acts);
    int idx = 0;
    for (int j : fs.neighborhoods[i]) {
      idx = idx * factorDim[j] + fs.factorRow(j, z, acts[j], env.actions());
    }
    return idx;
  };

  Rng rng(config.seed);
  Dataset data(H);
  JointPolicy prev = JointPolicy::uniform(H, env.actions());
  RunResult out;
  BestTracker best;

  std::vector<std::vector<int>> selected(H);
  std::vector<int> nextLocals;
  for (int n = 1; n <= config.episodes; ++n) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int h = H - 1; h >= 0; --h) {
      collectTriples(env, prev, h, rng, data.steps[h]);
      selected[h] = factoredMleFit(env, g.factorClasses.perStep[h], data.steps[h]).selected;
    }

    std::vector<PlanStepInput> steps(H);
    for (int h = 0; h < H; ++h) {
      // Assemble the product transition of the selected factor tables.
      FactoredStructure chosen = fs;
      for (int i = 0; i < M; ++i) {
        chosen.factors[h][i] = g.factorClasses.perStep[h][i][selected[h][i]].table;
      }
      steps[h].decoderMap.resize(Z);
      for (int z = 0; z < Z; ++z) steps[h].decoderMap[z] = z;
      steps[h].nextObs = chosen.expandJointTransition(h, env.actions());

      std::vector<Covariance> covs;
      covs.reserve(M);
      for (int i = 0; i < M; ++i) covs.emplace_back(kronDim[i], config.bonus.lambda);
      for (const Triple& t : data.steps[h].main) {
        for (int i = 0; i < M; ++i) {
          covs[i].addOneHot(kronIndex(i, t.obs.symbol, t.jointAction));
        }
      }
      steps[h].bonus.resize(Z, A);
      for (int z = 0; z < Z; ++z) {
        for (int a = 0; a < A; ++a) {
          Scalar beta = 0.0;
          for (int i = 0; i < M; ++i) {
            beta += std::min(alpha * covs[i].ellipticalNormOneHot(kronIndex(i, z, a)),
                             static_cast<Scalar>(H));
          }
          steps[h].bonus(z, a) = beta;
        }
      }
    }
    PlanResult plan = mbPlan(env, steps, config.concept_, config.stageEps, config.stageMaxIters);
    const Scalar zeta = config.bonus.zeta(Variant::Factored, n, ctx);
    const Scalar delta = computeGap(plan.vOpt, plan.vPes, gapSlack(Variant::Factored, ctx, zeta));
    prev = plan.policy;
    finishEpisode(g, config, n, plan, delta, t0, best, out);
  }
  finalizeRun(g, config, best, out);
  return out;
}

RunResult run(const GeneratedEnv& env, const RunConfig& config) {
  switch (config.variant) {
    case Variant::ModelBased: return runModelBased(env, config);
    case Variant::ModelFree: return runModelFree(env, config);
    default: return runFactored(env, config);
  }
}

}  // namespace mgrl
