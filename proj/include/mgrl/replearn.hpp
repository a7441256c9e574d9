#ifndef MGRL_REPLEARN_HPP_
#define MGRL_REPLEARN_HPP_

#include <string>
#include <vector>

#include "mgrl/block_env.hpp"
#include "mgrl/common.hpp"

namespace mgrl {

/// One transition triple as stored in the learner's buffers.
struct Triple {
  Observation obs;
  int jointAction = 0;
  Observation next;
};

/// Per-step data: the two buffers grow by one triple each per episode.
struct StepData {
  std::vector<Triple> main;   // states drawn at step h under the roll-in policy
  std::vector<Triple> tilde;  // states drawn one uniform step past level h-1
};

struct Dataset {
  std::vector<StepData> steps;

  explicit Dataset(int horizon = 0) : steps(horizon) {}
  int horizon() const { return static_cast<int>(steps.size()); }
};

/// A candidate decoder for one level: finite mode maps each symbol to a
/// latent; hadamard mode relabels the nearest-centroid index. The induced
/// feature is the one-hot e_{(psi(s), a)} of dimension Z*A.
struct CandidateDecoder {
  IntVector map;
  std::string provenance;

  int decode(int rawIndex) const { return map[rawIndex]; }
};

/// Raw per-observation index that candidate decoders relabel: the symbol in
/// finite mode, the nearest centroid in hadamard mode.
int rawStateIndex(const BlockEnv& env, const Observation& obs);

/// Feature classes Phi for the model-free learner: per level (0..H), a
/// finite list of candidate decoders with the truth at index 0.
struct FeatureClass {
  std::vector<std::vector<CandidateDecoder>> perLevel;

  int candidates(int level) const { return static_cast<int>(perLevel[level].size()); }
};

/// A model-based candidate: a decoder paired with the conditional
/// distribution of the next observation given (latent, joint action). The
/// induced w(o') is the o'-column; rows lie on the simplex so the pair is
/// jointly normalized.
struct MbCandidate {
  CandidateDecoder decoder;
  Matrix nextObs;  // (Z*A) x |O_{h+1}|
  std::string provenance;
};

struct ModelClass {
  std::vector<std::vector<MbCandidate>> perStep;  // steps 0..H-1
  int featureDim = 0;                             // Z*A
};

/// Per-player factored candidate: conditional table of the player's next
/// local state given (neighborhood local states, own action).
struct FactorCandidate {
  Matrix table;  // (localStates^{|Z_i|} * |A_i|) x localStates
  std::string provenance;
};

struct FactoredClasses {
  // perStep[h][player] -> candidate list, truth at index 0
  std::vector<std::vector<std::vector<FactorCandidate>>> perStep;
};

/// Finite discriminator surrogate built from the level-(h+1) candidate
/// decoders: indicator witnesses 1[psi(s)=z] and pairwise disagreement
/// witnesses |1[psiA(s)=za] - 1[psiB(s)=zb]|, all with range in [0,1].
struct Discriminator {
  int candA = 0, latentA = 0;
  int candB = -1, latentB = 0;  // candB < 0: plain indicator

  Scalar value(const std::vector<IntVector>& decodedNext, int triple) const {
    const Scalar a = decodedNext[candA][triple] == latentA ? 1.0 : 0.0;
    if (candB < 0) return a;
    const Scalar b = decodedNext[candB][triple] == latentB ? 1.0 : 0.0;
    return std::abs(a - b);
  }
};

struct DiscriminatorClass {
  std::vector<std::vector<Discriminator>> perStep;  // steps 0..H-1, over level h+1 decoders
};

/// Builds the full witness family for every step; `maxPerStep` truncates
/// (indicators first) for lean configurations, <=0 keeps everything.
DiscriminatorClass buildDiscriminators(const FeatureClass& features, int latentCount,
                                       int maxPerStep = 0);

// ---------------------------------------------------------------------------
// Fitting operations
// ---------------------------------------------------------------------------

struct MleResult {
  int selected = 0;
  Scalar logLikelihood = 0.0;
  Vector perCandidate;  // mean log-likelihood, -inf where excluded
};

/// Maximum-likelihood selection over a finite model class from the step-h
/// buffers. Candidates assigning zero likelihood to any triple are excluded;
/// if all are excluded the data is outside the class and we fail loudly.
MleResult mleFit(const BlockEnv& env, const std::vector<MbCandidate>& candidates,
                 const StepData& data);

struct MinimaxResult {
  int selected = 0;
  Scalar objective = 0.0;   // achieved min-max-min value, >= -1e-9
  Vector perCandidate;      // objective per feature candidate
};

/// Model-free feature selection: for each feature candidate and
/// discriminator, the ridge weights solve the regularized normal equations
/// in closed form (diagonal for one-hot features); the candidate minimizing
/// the worst-case excess ridge loss over the class is returned.
/// Tie-break: lowest candidate index.
MinimaxResult minimaxFit(const BlockEnv& env, const std::vector<CandidateDecoder>& features,
                         const std::vector<Discriminator>& discriminators,
                         const std::vector<IntVector>& decodedNext, const StepData& data,
                         int latentCount, Scalar lambda);

/// Alternating discriminator/feature selection for T rounds over the same
/// finite classes; returns the final feature choice.
MinimaxResult iterativeFit(const BlockEnv& env, const std::vector<CandidateDecoder>& features,
                           const std::vector<Discriminator>& discriminators,
                           const std::vector<IntVector>& decodedNext, const StepData& data,
                           int latentCount, Scalar lambda, int rounds);

/// Decodes every triple's next observation under each level-(h+1) candidate.
std::vector<IntVector> decodeNextStates(const BlockEnv& env,
                                        const std::vector<CandidateDecoder>& nextDecoders,
                                        const StepData& data);

/// Ridge-form transition estimate built from one-hot features over the
/// step-h buffers: (P f)(s,a) equals the ridge prediction of f(s') from the
/// feature bucket of (s,a).
struct RidgeTransition {
  int dim = 0;
  Scalar lambda = 1.0;
  Vector bucketCount;                     // raw counts over D u D~
  std::vector<int> bucketOf;              // per triple (main then tilde)
  std::vector<int> atomNextRaw;           // raw next-state index per triple
  Matrix lambdaInverse;                   // (Sigma phi phi^T + lambda I)^{-1}

  /// Ridge regression weights for targets given at the atoms.
  Vector weights(const Vector& atomValues) const;

  /// Simplex diagnostics of the implied conditionals: smallest atom weight
  /// and largest total mass across feature buckets.
  void simplexReport(Scalar* minEntry, Scalar* maxMass) const;
};

RidgeTransition nonparametricTransition(const BlockEnv& env, const CandidateDecoder& feature,
                                        const StepData& data, int latentCount, Scalar lambda);

struct FactoredMleResult {
  std::vector<int> selected;          // per player
  std::vector<Scalar> logLikelihood;  // per player
};

/// Independent per-player MLE over the factored classes at one step.
FactoredMleResult factoredMleFit(const BlockEnv& env,
                                 const std::vector<std::vector<FactorCandidate>>& classes,
                                 const StepData& data);

/// Ordered tensor product of the factor features, first factor slowest.
Vector kroneckerFeature(const std::vector<Vector>& factors);

/// Verifies that the truth candidates reproduce the environment exactly;
/// throws on mismatch (generator self-check).
void checkRealizability(const BlockEnv& env, const ModelClass& cls);

}  // namespace mgrl

#endif  // MGRL_REPLEARN_HPP_
