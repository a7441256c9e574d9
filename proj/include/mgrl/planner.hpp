#ifndef MGRL_PLANNER_HPP_
#define MGRL_PLANNER_HPP_

#include <memory>
#include <vector>

#include "mgrl/block_env.hpp"
#include "mgrl/common.hpp"
#include "mgrl/equilibrium.hpp"
#include "mgrl/policy.hpp"
#include "mgrl/replearn.hpp"

namespace mgrl {

enum class Variant { ModelBased, ModelFree, Factored };

Variant variantFromString(const std::string& s);
std::string variantName(Variant v);

/// Symmetric positive-definite accumulator Sigma = sum phi phi^T + lambda I
/// with a cached factorization for elliptical norms.
class Covariance {
 public:
  Covariance(int dim, Scalar lambda);

  void add(const Vector& phi);
  void addOneHot(int index, Scalar weight = 1.0);

  const Matrix& matrix() const { return sigma_; }
  int dim() const { return static_cast<int>(sigma_.rows()); }

  /// sqrt(phi^T Sigma^{-1} phi)
  Scalar ellipticalNorm(const Vector& phi) const;
  Scalar ellipticalNormOneHot(int index) const;

 private:
  void refresh() const;

  Matrix sigma_;
  mutable Eigen::LDLT<Matrix> ldlt_;
  mutable bool dirty_ = true;
};

/// Clipped linear-bandit bonus min(alpha * ||phi||_{Sigma^{-1}}, horizon).
Scalar bonusValue(const Covariance& cov, const Vector& phi, Scalar alpha, Scalar horizon);

enum class BonusMode { Theory, Constant };

/// Sizes the theory schedules depend on.
struct ScheduleContext {
  int horizon = 1;
  int featureDim = 1;   // d (per-factor d in the factored variant)
  int jointActions = 1; // A
  int maxPlayerActions = 1;  // A~
  int players = 1;
  int episodes = 1;     // N
  Scalar classSize = 1; // |M| or |Phi|
  int neighborhood = 1; // L (factored)
};

/// Bonus-coefficient and gap-slack schedules. `Theory` mode implements the
/// displayed functional forms with tunable multipliers; `Constant` mode uses
/// the fixed practical coefficients (alpha = 0.1, lambda = 1) with a 1/n
/// slack decay.
struct BonusParams {
  BonusMode mode = BonusMode::Constant;
  Scalar lambda = 1.0;
  Scalar constAlpha = 0.1;
  Scalar cAlpha = 1.0;
  Scalar cZeta = 1.0;
  Scalar delta = 0.05;
  Scalar replearnLambda = 0.01;

  Scalar alpha(Variant v, const ScheduleContext& ctx) const;
  Scalar zeta(Variant v, int episode, const ScheduleContext& ctx) const;
};

/// Optimality-gap slack 2H sqrt(A zeta), or 2HM sqrt(A~ zeta) for the
/// factored variant.
Scalar gapSlack(Variant v, const ScheduleContext& ctx, Scalar zeta);

/// Delta = max_i (vOpt_i - vPes_i) + slack.
Scalar computeGap(const Vector& vOpt, const Vector& vPes, Scalar slack);

/// Planning output: the stage policy, optimistic and pessimistic values at
/// the initial distribution, and diagnostics. Both value recursions share
/// the optimistic stage policy, so vPes <= vOpt up to stage-solver error.
struct PlanResult {
  JointPolicy policy;
  Vector vOpt, vPes;
  Scalar maxSandwichViolation = 0.0;  // max over planned states of (Vpes - Vopt)
  bool stageConverged = true;
  int stageIterationsMax = 0;
};

/// Inputs for one step of model-based planning over a finite observation
/// space: the learned decoder and next-observation law plus a per-(state,
/// action) bonus table. The factored variant reuses this path with its
/// product transition and summed Kronecker bonuses.
struct PlanStepInput {
  IntVector decoderMap;  // learned decoder: symbol -> latent
  Matrix nextObs;        // (Z*A) x S, rows sub-distributions
  Matrix bonus;          // S x A
};

/// Backward-induction equilibrium planning on a learned model with
/// optimistic rewards r + beta; the pessimistic recursion (r - beta) is
/// evaluated under the same per-state stage policy.
PlanResult mbPlan(const BlockEnv& env, const std::vector<PlanStepInput>& steps, Concept c,
                  Scalar stageEps = tol::kStageEps, int stageMaxIters = tol::kStageMaxIters);

/// Per-step weights of the least-squares value iteration pass.
struct LsviStepWeights {
  CandidateDecoder decoder;
  Matrix thetaOpt;  // d x players
  Matrix thetaPes;
  Vector bonusPerBucket;  // min(alpha*||e_k||_{Sigma^{-1}}, H) over D_h
};

/// Shared payload for lazily materialized LSVI policies: the stage policy at
/// any observation is recomputed from the stored linear weights and bonus.
struct LsviPolicyData {
  const BlockEnv* env = nullptr;
  Concept concept_ = Concept::CCE;
  Scalar stageEps = tol::kStageEps;
  int stageMaxIters = tol::kStageMaxIters;
  Scalar clip = 0.0;  // |Q| bound H(B_r + 1)
  std::vector<LsviStepWeights> steps;
};

struct LsviStateEval {
  Vector dist;  // stage policy at the state
  Vector vOpt;  // per player
  Vector vPes;
  int iterations = 0;
  bool converged = true;
};

/// Q-values and stage solution at one observation from the stored weights.
LsviStateEval evalLsviState(const LsviPolicyData& data, int h, const Observation& obs);

/// One full LSVI backward pass over the dataset: fits ridge weights per step
/// from the buffers (Lambda over both buffers, bonus covariance over the
/// main buffer), evaluates values only at dataset states, and returns a
/// lazily materialized policy. Also reports the non-parametric transition
/// simplex diagnostics per step.
struct LsviPlanOutput {
  PlanResult plan;
  std::shared_ptr<LsviPolicyData> data;
  Vector simplexMinEntry;  // per step
  Vector simplexMaxMass;   // per step
};

LsviPlanOutput lsviPlan(const BlockEnv& env, const Dataset& dataset,
                        const std::vector<CandidateDecoder>& selectedDecoders, Scalar lambda,
                        Scalar alpha, Concept c, Scalar stageEps = tol::kStageEps,
                        int stageMaxIters = tol::kStageMaxIters);

/// Sum over players of clipped elliptical bonuses of the Kronecker features;
/// range [0, M*H].
Scalar factoredBonus(const std::vector<Vector>& kronFeatures,
                     const std::vector<Covariance>& covariances, Scalar alpha, Scalar horizon);

}  // namespace mgrl

#endif  // MGRL_PLANNER_HPP_
