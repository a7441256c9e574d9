#include "mgrl/replearn.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace mgrl {

namespace {

constexpr Scalar kNegInf = -std::numeric_limits<Scalar>::infinity();

int tripleCount(const StepData& data) {
  return static_cast<int>(data.main.size() + data.tilde.size());
}

const Triple& tripleAt(const StepData& data, int j) {
  const int nm = static_cast<int>(data.main.size());
  return j < nm ? data.main[j] : data.tilde[j - nm];
}

}  // namespace

int rawStateIndex(const BlockEnv& env, const Observation& obs) {
  if (obs.isFinite()) return obs.symbol;
  return env.decodeTrue(obs);  // nearest centroid; candidates relabel it
}

DiscriminatorClass buildDiscriminators(const FeatureClass& features, int latentCount,
                                       int maxPerStep) {
  DiscriminatorClass out;
  const int levels = static_cast<int>(features.perLevel.size());
  out.perStep.resize(levels - 1);
  for (int h = 0; h + 1 < levels; ++h) {
    auto& list = out.perStep[h];
    const int nc = features.candidates(h + 1);
    for (int a = 0; a < nc; ++a) {
      for (int z = 0; z < latentCount; ++z) {
        list.push_back({a, z, -1, 0});
      }
    }
    for (int a = 0; a < nc; ++a) {
      for (int b = 0; b < nc; ++b) {
        for (int za = 0; za < latentCount; ++za) {
          for (int zb = 0; zb < latentCount; ++zb) {
            if (a == b && za == zb) continue;
            list.push_back({a, za, b, zb});
          }
        }
      }
    }
    if (maxPerStep > 0 && static_cast<int>(list.size()) > maxPerStep) {
      list.resize(maxPerStep);
    }
  }
  return out;
}

MleResult mleFit(const BlockEnv& env, const std::vector<MbCandidate>& candidates,
                 const StepData& data) {
  const int n = tripleCount(data);
  if (n == 0) throw std::runtime_error("mleFit: empty dataset");
  if (env.mode != ObsMode::Finite) {
    throw std::runtime_error(
        "mleFit: maximum likelihood over continuous observations is unsupported; "
        "use finite-categorical emissions");
  }
  const int A = env.actions().jointCount();
  MleResult out;
  out.perCandidate = Vector::Constant(candidates.size(), kNegInf);
  int badTriple = -1;
  for (size_t c = 0; c < candidates.size(); ++c) {
    const MbCandidate& cand = candidates[c];
    Scalar ll = 0.0;
    bool excluded = false;
    for (int j = 0; j < n && !excluded; ++j) {
      const Triple& t = tripleAt(data, j);
      const int z = cand.decoder.decode(t.obs.symbol);
      const Scalar p = cand.nextObs(z * A + t.jointAction, t.next.symbol);
      if (p <= 0.0) {
        excluded = true;
        badTriple = j;
      } else {
        ll += std::log(p);
      }
    }
    if (!excluded) out.perCandidate[c] = ll / n;
  }
  out.selected = -1;
  for (int c = 0; c < out.perCandidate.size(); ++c) {
    if (out.perCandidate[c] == kNegInf) continue;
    if (out.selected < 0 || out.perCandidate[c] > out.perCandidate[out.selected]) {
      out.selected = c;
    }
  }
  if (out.selected < 0) {
    const Triple& t = tripleAt(data, badTriple);
    throw std::runtime_error(
        "mleFit: every candidate assigns zero likelihood to triple (step=" +
        std::to_string(t.obs.step) + ", symbol=" + std::to_string(t.obs.symbol) +
        ", action=" + std::to_string(t.jointAction) + ", next=" +
        std::to_string(t.next.symbol) + "); the class does not contain this environment");
  }
  out.logLikelihood = out.perCandidate[out.selected];
  return out;
}

std::vector<IntVector> decodeNextStates(const BlockEnv& env,
                                        const std::vector<CandidateDecoder>& nextDecoders,
                                        const StepData& data) {
  const int n = tripleCount(data);
  std::vector<IntVector> out(nextDecoders.size());
  std::vector<int> raw(n);
  for (int j = 0; j < n; ++j) raw[j] = rawStateIndex(env, tripleAt(data, j).next);
  for (size_t c = 0; c < nextDecoders.size(); ++c) {
    out[c].resize(n);
    for (int j = 0; j < n; ++j) out[c][j] = nextDecoders[c].decode(raw[j]);
  }
  return out;
}

namespace {

// minLoss(phi, f) for every pair: the ridge loss at the closed-form weights.
// Features are one-hot, so the normal equations are diagonal:
//   theta_k = S_k / (c_k + lambda n),  minL = (sum v^2 - sum_k S_k^2/(c_k+lambda n)) / n.
Matrix minLossMatrix(const BlockEnv& env, const std::vector<CandidateDecoder>& features,
                     const std::vector<Discriminator>& discriminators,
                     const std::vector<IntVector>& decodedNext, const StepData& data,
                     int latentCount, Scalar lambda) {
  const int n = tripleCount(data);
  const int A = env.actions().jointCount();
  const int d = latentCount * A;
  const int nf = static_cast<int>(features.size());
  const int nd = static_cast<int>(discriminators.size());

  std::vector<std::vector<int>> buckets(nf, std::vector<int>(n));
  for (int j = 0; j < n; ++j) {
    const Triple& t = tripleAt(data, j);
    const int raw = rawStateIndex(env, t.obs);
    for (int p = 0; p < nf; ++p) {
      buckets[p][j] = features[p].decode(raw) * A + t.jointAction;
    }
  }
  std::vector<Vector> counts(nf, Vector::Zero(d));
  for (int p = 0; p < nf; ++p) {
    for (int j = 0; j < n; ++j) counts[p][buckets[p][j]] += 1.0;
  }

  Matrix loss(nf, nd);
  Vector values(n), sums(d);
  for (int f = 0; f < nd; ++f) {
    Scalar vsq = 0.0;
    for (int j = 0; j < n; ++j) {
      values[j] = discriminators[f].value(decodedNext, j);
      vsq += values[j] * values[j];
    }
    for (int p = 0; p < nf; ++p) {
      sums.setZero();
      const auto& bk = buckets[p];
      for (int j = 0; j < n; ++j) sums[bk[j]] += values[j];
      Scalar explained = 0.0;
      for (int k = 0; k < d; ++k) {
        if (counts[p][k] > 0.0 || sums[k] != 0.0) {
          explained += sums[k] * sums[k] / (counts[p][k] + lambda * n);
        }
      }
      loss(p, f) = (vsq - explained) / n;
    }
  }
  return loss;
}

}  // namespace

MinimaxResult minimaxFit(const BlockEnv& env, const std::vector<CandidateDecoder>& features,
                         const std::vector<Discriminator>& discriminators,
                         const std::vector<IntVector>& decodedNext, const StepData& data,
                         int latentCount, Scalar lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("minimaxFit: lambda must be positive");
  if (tripleCount(data) == 0) throw std::runtime_error("minimaxFit: empty dataset");
  const Matrix loss = minLossMatrix(env, features, discriminators, decodedNext, data,
                                    latentCount, lambda);
  const Vector colMin = loss.colwise().minCoeff();
  MinimaxResult out;
  out.perCandidate = (loss.rowwise() - colMin.transpose()).rowwise().maxCoeff();
  out.selected = 0;
  for (int p = 1; p < out.perCandidate.size(); ++p) {
    if (out.perCandidate[p] < out.perCandidate[out.selected]) out.selected = p;
  }
  out.objective = out.perCandidate[out.selected];
  return out;
}

MinimaxResult iterativeFit(const BlockEnv& env, const std::vector<CandidateDecoder>& features,
                           const std::vector<Discriminator>& discriminators,
                           const std::vector<IntVector>& decodedNext, const StepData& data,
                           int latentCount, Scalar lambda, int rounds) {
  if (rounds < 1) throw std::invalid_argument("iterativeFit: rounds must be >= 1");
  const Matrix loss = minLossMatrix(env, features, discriminators, decodedNext, data,
                                    latentCount, lambda);
  const Vector colMin = loss.colwise().minCoeff();
  const int nf = static_cast<int>(features.size());

  int current = 0;
  Vector accumulated = Vector::Zero(nf);
  for (int t = 1; t <= rounds; ++t) {
    // Discriminator selection at the current feature.
    int bestF = 0;
    Scalar bestVal = -std::numeric_limits<Scalar>::infinity();
    for (int f = 0; f < loss.cols(); ++f) {
      const Scalar v = loss(current, f) - colMin[f];
      if (v > bestVal) {
        bestVal = v;
        bestF = f;
      }
    }
    // Feature selection against all discriminators chosen so far.
    accumulated += loss.col(bestF);
    current = 0;
    for (int p = 1; p < nf; ++p) {
      if (accumulated[p] < accumulated[current]) current = p;
    }
  }
  MinimaxResult out;
  out.selected = current;
  out.perCandidate = (loss.rowwise() - colMin.transpose()).rowwise().maxCoeff();
  out.objective = out.perCandidate[current];
  return out;
}

Vector RidgeTransition::weights(const Vector& atomValues) const {
  Vector rhs = Vector::Zero(dim);
  for (size_t j = 0; j < bucketOf.size(); ++j) rhs[bucketOf[j]] += atomValues[j];
  return lambdaInverse * rhs;
}

void RidgeTransition::simplexReport(Scalar* minEntry, Scalar* maxMass) const {
  // Conditional of any (s,a) in bucket k puts weight (Lambda^{-1})_{k,k_j}
  // on atom j; mass over atoms is Lambda^{-1} * counts.
  Scalar lo = std::numeric_limits<Scalar>::infinity();
  const Vector mass = lambdaInverse * bucketCount;
  for (int k = 0; k < dim; ++k) {
    for (int kp = 0; kp < dim; ++kp) {
      if (bucketCount[kp] > 0.0 && lambdaInverse(k, kp) < lo) lo = lambdaInverse(k, kp);
    }
  }
  if (bucketOf.empty()) lo = 0.0;
  if (minEntry) *minEntry = lo;
  if (maxMass) *maxMass = mass.maxCoeff();
}

RidgeTransition nonparametricTransition(const BlockEnv& env, const CandidateDecoder& feature,
                                        const StepData& data, int latentCount, Scalar lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("nonparametricTransition: lambda must be positive");
  const int A = env.actions().jointCount();
  RidgeTransition est;
  est.dim = latentCount * A;
  est.lambda = lambda;
  est.bucketCount = Vector::Zero(est.dim);
  const int n = tripleCount(data);
  est.bucketOf.resize(n);
  est.atomNextRaw.resize(n);
  Matrix sigma = lambda * Matrix::Identity(est.dim, est.dim);
  for (int j = 0; j < n; ++j) {
    const Triple& t = tripleAt(data, j);
    const int k = feature.decode(rawStateIndex(env, t.obs)) * A + t.jointAction;
    est.bucketOf[j] = k;
    est.atomNextRaw[j] = rawStateIndex(env, t.next);
    est.bucketCount[k] += 1.0;
    sigma(k, k) += 1.0;
  }
  Eigen::LDLT<Matrix> ldlt(sigma);
  if (ldlt.info() != Eigen::Success) {
    throw std::runtime_error("nonparametricTransition: covariance factorization failed at lambda=" +
                             std::to_string(lambda));
  }
  est.lambdaInverse = ldlt.solve(Matrix::Identity(est.dim, est.dim));
  return est;
}

FactoredMleResult factoredMleFit(const BlockEnv& env,
                                 const std::vector<std::vector<FactorCandidate>>& classes,
                                 const StepData& data) {
  if (!env.factored) throw std::runtime_error("factoredMleFit: environment is not factored");
  const FactoredStructure& fs = *env.factored;
  const int M = fs.players();
  const int n = tripleCount(data);
  if (n == 0) throw std::runtime_error("factoredMleFit: empty dataset");
  FactoredMleResult out;
  out.selected.assign(M, -1);
  out.logLikelihood.assign(M, kNegInf);
  std::vector<int> acts, locals, nextLocals;
  for (int i = 0; i < M; ++i) {
    Vector scores = Vector::Constant(classes[i].size(), kNegInf);
    for (size_t c = 0; c < classes[i].size(); ++c) {
      Scalar ll = 0.0;
      bool excluded = false;
      for (int j = 0; j < n && !excluded; ++j) {
        const Triple& t = tripleAt(data, j);
        env.actions().unflatten(t.jointAction, acts);
        fs.unflattenJoint(t.next.symbol, nextLocals);
        const int row = fs.factorRow(i, t.obs.symbol, acts[i], env.actions());
        const Scalar p = classes[i][c].table(row, nextLocals[i]);
        if (p <= 0.0) {
          excluded = true;
        } else {
          ll += std::log(p);
        }
      }
      if (!excluded) scores[c] = ll / n;
    }
    for (int c = 0; c < scores.size(); ++c) {
      if (scores[c] == kNegInf) continue;
      if (out.selected[i] < 0 || scores[c] > out.logLikelihood[i]) {
        out.selected[i] = c;
        out.logLikelihood[i] = scores[c];
      }
    }
    if (out.selected[i] < 0) {
      throw std::runtime_error("factoredMleFit: every candidate excluded for player " +
                               std::to_string(i));
    }
  }
  return out;
}

Vector kroneckerFeature(const std::vector<Vector>& factors) {
  Vector out = Vector::Ones(1);
  for (const Vector& f : factors) {
    Vector next(out.size() * f.size());
    for (int i = 0; i < out.size(); ++i) {
      next.segment(i * f.size(), f.size()) = out[i] * f;
    }
    out.swap(next);
  }
  return out;
}

void checkRealizability(const BlockEnv& env, const ModelClass& cls) {
  if (env.mode != ObsMode::Finite) return;
  const int A = env.actions().jointCount();
  const int S = env.symbolCount();
  for (int h = 0; h < env.horizon(); ++h) {
    const MbCandidate& truth = cls.perStep[h][0];
    for (int o = 0; o < S; ++o) {
      const int z = env.decodeTrue(Observation{h, o, {}});
      if (truth.decoder.decode(o) != z) {
        throw std::runtime_error("checkRealizability: truth decoder mismatch");
      }
      for (int a = 0; a < A; ++a) {
        for (int on = 0; on < S; ++on) {
          Scalar p = 0.0;
          for (int zn = 0; zn < env.latentCount(); ++zn) {
            p += env.latent.trans[h](z * A + a, zn) * env.emissionProb(on, zn);
          }
          if (std::abs(p - truth.nextObs(z * A + a, on)) > tol::kSimplexTol) {
            throw std::runtime_error("checkRealizability: truth transition mismatch");
          }
        }
      }
    }
  }
}

}  // namespace mgrl
