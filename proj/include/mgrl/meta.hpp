#ifndef MGRL_META_HPP_
#define MGRL_META_HPP_

#include <cstdint>
#include <limits>
#include <vector>

#include "mgrl/envs.hpp"
#include "mgrl/planner.hpp"

namespace mgrl {

/// Configuration for one learning run.
struct RunConfig {
  Variant variant = Variant::ModelFree;
  Concept concept_ = Concept::CCE;
  int episodes = 200;
  BonusParams bonus;
  bool useIterativeFit = false;
  int replearnRounds = 10;  // T, iterative fitting only
  int evalEvery = 10;       // exact exploitability cadence; 0 evaluates the final policy only
  Scalar stageEps = tol::kStageEps;
  int stageMaxIters = tol::kStageMaxIters;
  std::uint64_t seed = 0;
};

struct EpisodeRecord {
  int episode = 0;  // n, 1-based
  Scalar delta = 0.0;
  Vector vOpt, vPes;
  Scalar exploit = std::numeric_limits<Scalar>::quiet_NaN();  // NaN when not evaluated
  double wallMs = 0.0;
  int bufferSize = 0;  // triples per buffer per step (== n)
  Scalar simplexMinEntry = 0.0;  // model-free transition diagnostics
  Scalar simplexMaxMass = 0.0;
  Scalar sandwichViolation = 0.0;
};

/// Output of a run. The returned policy holds references into the
/// environment; keep the GeneratedEnv alive while using it.
struct RunResult {
  JointPolicy finalPolicy;
  int bestEpisode = 0;  // n* = argmin_n Delta^{(n)}
  Scalar bestDelta = 0.0;
  Scalar finalExploit = 0.0;
  std::vector<EpisodeRecord> log;
  Scalar maxSandwichViolation = 0.0;
  Scalar minSimplexEntry = 0.0;
  Scalar maxSimplexMass = 0.0;
};

/// Draws the two fresh roll-in triples for step h (0-based) and appends them
/// to the buffers: the main triple from the step-h visitation of `prev`, the
/// companion from one uniform step past level h-1 (from the initial
/// distribution when h = 0).
void collectTriples(const BlockEnv& env, const JointPolicy& prev, int h, Rng& rng,
                    StepData& out);

RunResult runModelBased(const GeneratedEnv& env, const RunConfig& config);
RunResult runModelFree(const GeneratedEnv& env, const RunConfig& config);
RunResult runFactored(const GeneratedEnv& env, const RunConfig& config);

/// Dispatch on config.variant.
RunResult run(const GeneratedEnv& env, const RunConfig& config);

}  // namespace mgrl

#endif  // MGRL_META_HPP_
