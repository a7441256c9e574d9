#include "mgrl/envs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mgrl {

EnvFamily familyFromString(const std::string& s) {
  if (s == "tabular") return EnvFamily::Tabular;
  if (s == "block") return EnvFamily::Block;
  if (s == "factored") return EnvFamily::Factored;
  throw std::invalid_argument("unknown env family: " + s);
}

std::string familyName(EnvFamily f) {
  switch (f) {
    case EnvFamily::Tabular: return "tabular";
    case EnvFamily::Block: return "block";
    default: return "factored";
  }
}

Matrix sylvesterHadamard(int n) {
  if (n <= 0 || (n & (n - 1)) != 0) {
    throw std::invalid_argument("sylvesterHadamard: size must be a power of two");
  }
  Matrix h(1, 1);
  h(0, 0) = 1.0;
  while (h.rows() < n) {
    const int m = static_cast<int>(h.rows());
    Matrix next(2 * m, 2 * m);
    next.topLeftCorner(m, m) = h;
    next.topRightCorner(m, m) = h;
    next.bottomLeftCorner(m, m) = h;
    next.bottomRightCorner(m, m) = -h;
    h.swap(next);
  }
  return h;
}

namespace {

/// The Appendix-style simplex row: uniform draws shifted to nonnegativity
/// (the minimum is pinned to zero when negative) and normalized.
Vector randomSimplexRow(int n, Rng& rng) {
  Vector row(n);
  for (int i = 0; i < n; ++i) row[i] = rng.uniform(-1.0, 1.0);
  const Scalar lo = row.minCoeff();
  if (lo < 0.0) row.array() -= lo;
  const Scalar total = row.sum();
  if (total <= 1e-12) return Vector::Constant(n, 1.0 / n);
  return row / total;
}

Matrix randomConditional(int rows, int cols, Rng& rng) {
  Matrix m(rows, cols);
  for (int r = 0; r < rows; ++r) m.row(r) = randomSimplexRow(cols, rng).transpose();
  return m;
}

/// Random permutation of [0, n): Fisher-Yates over the generator.
IntVector randomPermutation(int n, Rng& rng) {
  IntVector p(n);
  for (int i = 0; i < n; ++i) p[i] = i;
  for (int i = n - 1; i > 0; --i) std::swap(p[i], p[rng.uniformInt(i + 1)]);
  return p;
}

IntVector nonIdentityPermutation(int n, Rng& rng) {
  while (true) {
    const IntVector p = randomPermutation(n, rng);
    for (int i = 0; i < n; ++i) {
      if (p[i] != i) return p;
    }
  }
}

CandidateDecoder truthDecoder(const BlockEnv& env) {
  CandidateDecoder d;
  d.provenance = "truth";
  if (env.mode == ObsMode::Finite) {
    d.map.resize(env.symbolCount());
    for (int s = 0; s < env.symbolCount(); ++s) d.map[s] = s / env.symbolsPerLatent;
  } else {
    d.map.resize(env.latentCount());
    for (int z = 0; z < env.latentCount(); ++z) d.map[z] = z;
  }
  return d;
}

std::vector<CandidateDecoder> decoderCandidates(const BlockEnv& env, const ClassSpec& cs,
                                                Rng& rng) {
  std::vector<CandidateDecoder> out;
  const CandidateDecoder truth = truthDecoder(env);
  out.push_back(truth);
  const int Z = env.latentCount();
  for (int p = 0; p < cs.permutationDecoys; ++p) {
    const IntVector perm = nonIdentityPermutation(Z, rng);
    CandidateDecoder d = truth;
    for (int i = 0; i < d.map.size(); ++i) d.map[i] = perm[truth.map[i]];
    d.provenance = "permutation";
    out.push_back(std::move(d));
  }
  if (env.mode == ObsMode::Finite) {
    for (int r = 0; r < cs.reassignDecoys; ++r) {
      const Scalar rho = cs.reassignFractions[r % cs.reassignFractions.size()];
      CandidateDecoder d = truth;
      for (int s = 0; s < d.map.size(); ++s) {
        if (rng.uniform() < rho) d.map[s] = rng.uniformInt(Z);
      }
      d.provenance = "reassign(" + std::to_string(rho) + ")";
      out.push_back(std::move(d));
    }
  } else {
    for (int m = 0; m < cs.mergeDecoys; ++m) {
      // A non-injective label map: one latent's label collapsed onto another.
      CandidateDecoder d = truth;
      const int from = rng.uniformInt(Z);
      int to = rng.uniformInt(Z);
      while (to == from) to = rng.uniformInt(Z);
      d.map[from] = to;
      d.provenance = "merge";
      out.push_back(std::move(d));
    }
  }
  return out;
}

/// True next-observation table for one step of a finite-emission env.
Matrix truthNextObs(const BlockEnv& env, int h) {
  const int A = env.actions().jointCount();
  const int Z = env.latentCount();
  const int S = env.symbolCount();
  Matrix w(Z * A, S);
  for (int z = 0; z < Z; ++z) {
    for (int a = 0; a < A; ++a) {
      for (int s = 0; s < S; ++s) {
        w(z * A + a, s) = env.latent.trans[h](z * A + a, s / env.symbolsPerLatent) /
                          env.symbolsPerLatent;
      }
    }
  }
  return w;
}

Matrix perturbRows(const Matrix& table, Scalar scale, Rng& rng) {
  Matrix out = table;
  for (int r = 0; r < out.rows(); ++r) {
    for (int c = 0; c < out.cols(); ++c) {
      out(r, c) = std::max(out(r, c) + scale * rng.uniform(-1.0, 1.0), 0.0);
    }
    const Scalar total = out.row(r).sum();
    if (total <= 1e-12) {
      out.row(r).setConstant(1.0 / out.cols());
    } else {
      out.row(r) /= total;
    }
  }
  return out;
}

ModelClass buildModelClass(const BlockEnv& env, const ClassSpec& cs, Rng& rng) {
  ModelClass cls;
  if (env.mode != ObsMode::Finite) return cls;
  cls.featureDim = env.latentCount() * env.actions().jointCount();
  cls.perStep.resize(env.horizon());
  for (int h = 0; h < env.horizon(); ++h) {
    const Matrix truthW = truthNextObs(env, h);
    const std::vector<CandidateDecoder> decoders = decoderCandidates(env, cs, rng);
    auto& list = cls.perStep[h];
    for (size_t i = 0; i < decoders.size(); ++i) {
      MbCandidate c;
      c.decoder = decoders[i];
      c.nextObs = truthW;
      c.provenance = decoders[i].provenance;
      list.push_back(std::move(c));
    }
    for (int p = 0; p < cs.perturbDecoys; ++p) {
      const Scalar scale = cs.perturbScales[p % cs.perturbScales.size()];
      MbCandidate c;
      c.decoder = decoders[0];
      c.nextObs = perturbRows(truthW, scale, rng);
      c.provenance = "perturb(" + std::to_string(scale) + ")";
      list.push_back(std::move(c));
    }
  }
  return cls;
}

FeatureClass buildFeatureClass(const BlockEnv& env, const ClassSpec& cs, Rng& rng) {
  FeatureClass cls;
  cls.perLevel.resize(env.horizon() + 1);
  for (int level = 0; level <= env.horizon(); ++level) {
    cls.perLevel[level] = decoderCandidates(env, cs, rng);
  }
  return cls;
}

std::vector<std::vector<int>> topologyNeighborhoods(const EnvSpec& spec) {
  const int M = spec.players;
  const int L = spec.neighborhoodSize;
  std::vector<std::vector<int>> out(M);
  if (spec.topology == Topology::Ring) {
    for (int i = 0; i < M; ++i) {
      out[i].push_back(i);
      if (L >= 2 && M > 1) out[i].push_back((i + M - 1) % M);
      std::sort(out[i].begin(), out[i].end());
      out[i].erase(std::unique(out[i].begin(), out[i].end()), out[i].end());
    }
  } else {
    // Row-major grid, widest factorization of M; neighbor priority is
    // self, left, up, right, down, truncated at L.
    int cols = static_cast<int>(std::sqrt(static_cast<double>(M)));
    while (cols > 1 && M % cols != 0) --cols;
    const int rows = M / cols;
    for (int i = 0; i < M; ++i) {
      const int r = i / cols, c = i % cols;
      std::vector<int> order;
      order.push_back(i);
      if (c > 0) order.push_back(i - 1);
      if (r > 0) order.push_back(i - cols);
      if (c + 1 < cols) order.push_back(i + 1);
      if (r + 1 < rows) order.push_back(i + cols);
      if (static_cast<int>(order.size()) > L) order.resize(L);
      std::sort(order.begin(), order.end());
      out[i] = order;
    }
  }
  for (const auto& nb : out) {
    if (static_cast<int>(nb.size()) > L) {
      throw std::runtime_error("topologyNeighborhoods: neighborhood exceeds L");
    }
  }
  return out;
}

std::vector<std::vector<Matrix>> buildRewards(const EnvSpec& spec, int Z, int A, Rng& rng) {
  std::vector<std::vector<Matrix>> rewards(spec.horizon);
  const Scalar lo = spec.unitRewards ? 0.0 : -1.0;
  for (int h = 0; h < spec.horizon; ++h) {
    rewards[h].resize(spec.players);
    for (int i = 0; i < spec.players; ++i) rewards[h][i].resize(Z, A);
    for (int z = 0; z < Z; ++z) {
      for (int a = 0; a < A; ++a) {
        rewards[h][0](z, a) = rng.uniform(lo, 1.0);
      }
    }
    if (spec.zeroSum) {
      if (spec.players != 2) throw std::invalid_argument("zeroSum requires 2 players");
      if (spec.unitRewards) throw std::invalid_argument("zeroSum requires signed rewards");
      rewards[h][1] = -rewards[h][0];
    } else {
      for (int i = 1; i < spec.players; ++i) {
        for (int z = 0; z < Z; ++z) {
          for (int a = 0; a < A; ++a) rewards[h][i](z, a) = rng.uniform(lo, 1.0);
        }
      }
    }
  }
  return rewards;
}

}  // namespace

LatentGame genTabular(const EnvSpec& spec, Rng& rng) {
  if (spec.horizon < 1 || spec.latents < 1 || spec.players < 1 || spec.actionsPerPlayer < 1) {
    throw std::invalid_argument("genTabular: all sizes must be >= 1");
  }
  LatentGame game;
  game.horizon = spec.horizon;
  game.latentCount = spec.latents;
  game.actions = ActionSpace(spec.players, spec.actionsPerPlayer);
  const int A = game.jointActions();
  game.rewards = buildRewards(spec, spec.latents, A, rng);
  game.trans.resize(spec.horizon);
  for (int h = 0; h < spec.horizon; ++h) {
    game.trans[h] = randomConditional(spec.latents * A, spec.latents, rng);
  }
  game.init = randomSimplexRow(spec.latents, rng);
  game.validate();
  return game;
}

GeneratedEnv genBlock(const EnvSpec& spec, Rng& rng) {
  GeneratedEnv out;
  out.spec = spec;
  out.env.latent = genTabular(spec, rng);
  out.env.mode = spec.obsMode;
  if (spec.obsMode == ObsMode::Finite) {
    out.env.symbolsPerLatent = spec.symbolsPerLatent;
  } else {
    out.env.noiseSigma = spec.sigma;
    const int need = spec.horizon + spec.latents + 1;
    int dim = 1;
    while (dim < need) dim *= 2;
    out.env.obsDim = dim;
    out.env.hadamard = sylvesterHadamard(dim);
  }
  out.env.validate();
  Rng classRng = rng.fork(17);
  out.mbClass = buildModelClass(out.env, spec.classes, classRng);
  Rng featRng = rng.fork(29);
  out.mfClass = buildFeatureClass(out.env, spec.classes, featRng);
  if (spec.obsMode == ObsMode::Finite) checkRealizability(out.env, out.mbClass);
  return out;
}

GeneratedEnv genFactored(const EnvSpec& spec, Rng& rng) {
  const int M = spec.players;
  Scalar jointSize = std::pow(static_cast<Scalar>(spec.latents), M);
  if (jointSize > spec.jointStateCap) {
    throw std::runtime_error(
        "genFactored: joint state space " + std::to_string(static_cast<long>(jointSize)) +
        " exceeds cap " + std::to_string(spec.jointStateCap) +
        "; reduce players or local states");
  }
  const int Z = static_cast<int>(jointSize + 0.5);

  GeneratedEnv out;
  out.spec = spec;
  FactoredStructure fs;
  fs.localStates = spec.latents;
  fs.neighborhoods = topologyNeighborhoods(spec);
  const ActionSpace actions(M, spec.actionsPerPlayer);
  fs.factors.resize(spec.horizon);
  for (int h = 0; h < spec.horizon; ++h) {
    fs.factors[h].resize(M);
    for (int i = 0; i < M; ++i) {
      int rows = spec.actionsPerPlayer;
      for (size_t j = 0; j < fs.neighborhoods[i].size(); ++j) rows *= spec.latents;
      fs.factors[h][i] = randomConditional(rows, spec.latents, rng);
    }
  }

  LatentGame& game = out.env.latent;
  game.horizon = spec.horizon;
  game.latentCount = Z;
  game.actions = actions;
  game.trans.resize(spec.horizon);
  for (int h = 0; h < spec.horizon; ++h) game.trans[h] = fs.expandJointTransition(h, actions);
  game.rewards = buildRewards(spec, Z, actions.jointCount(), rng);
  game.init = randomSimplexRow(Z, rng);
  game.validate();

  out.env.mode = ObsMode::Finite;
  out.env.symbolsPerLatent = 1;
  out.env.factored = fs;
  out.env.validate();

  // Per-factor classes: truth plus perturbed and output-permuted tables.
  Rng classRng = rng.fork(17);
  out.factorClasses.perStep.resize(spec.horizon);
  for (int h = 0; h < spec.horizon; ++h) {
    out.factorClasses.perStep[h].resize(M);
    for (int i = 0; i < M; ++i) {
      auto& list = out.factorClasses.perStep[h][i];
      list.push_back({fs.factors[h][i], "truth"});
      for (int p = 0; p < spec.classes.perturbDecoys; ++p) {
        const Scalar scale = spec.classes.perturbScales[p % spec.classes.perturbScales.size()];
        list.push_back({perturbRows(fs.factors[h][i], scale, classRng),
                        "perturb(" + std::to_string(scale) + ")"});
      }
      for (int p = 0; p < spec.classes.permutationDecoys; ++p) {
        const IntVector perm = nonIdentityPermutation(spec.latents, classRng);
        Matrix permuted(fs.factors[h][i].rows(), fs.factors[h][i].cols());
        for (int c = 0; c < permuted.cols(); ++c) {
          permuted.col(perm[c]) = fs.factors[h][i].col(c);
        }
        list.push_back({std::move(permuted), "permutation"});
      }
    }
  }

  // The joint-observation model class doubles as the single-player
  // reduction target: with M=1 the factor class is the model class.
  if (M == 1) {
    out.mbClass.featureDim = Z * actions.jointCount();
    out.mbClass.perStep.resize(spec.horizon);
    CandidateDecoder identity;
    identity.map.resize(Z);
    for (int z = 0; z < Z; ++z) identity.map[z] = z;
    identity.provenance = "truth";
    for (int h = 0; h < spec.horizon; ++h) {
      for (const FactorCandidate& fc : out.factorClasses.perStep[h][0]) {
        out.mbClass.perStep[h].push_back({identity, fc.table, fc.provenance});
      }
    }
  } else {
    Rng mbRng = rng.fork(23);
    out.mbClass = buildModelClass(out.env, spec.classes, mbRng);
  }
  Rng featRng = rng.fork(29);
  out.mfClass = buildFeatureClass(out.env, spec.classes, featRng);
  return out;
}

GeneratedEnv generate(const EnvSpec& spec) {
  Rng rng(spec.seed);
  switch (spec.family) {
    case EnvFamily::Tabular: {
      GeneratedEnv out;
      out.spec = spec;
      out.env.latent = genTabular(spec, rng);
      out.env.mode = ObsMode::Finite;
      out.env.symbolsPerLatent = 1;
      out.env.validate();
      Rng classRng = rng.fork(17);
      out.mbClass = buildModelClass(out.env, spec.classes, classRng);
      Rng featRng = rng.fork(29);
      out.mfClass = buildFeatureClass(out.env, spec.classes, featRng);
      return out;
    }
    case EnvFamily::Block: return genBlock(spec, rng);
    default: return genFactored(spec, rng);
  }
}

}  // namespace mgrl
