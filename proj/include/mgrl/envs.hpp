#ifndef MGRL_ENVS_HPP_
#define MGRL_ENVS_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "mgrl/block_env.hpp"
#include "mgrl/common.hpp"
#include "mgrl/replearn.hpp"

namespace mgrl {

enum class EnvFamily { Tabular, Block, Factored };
enum class Topology { Ring, Grid };

EnvFamily familyFromString(const std::string& s);
std::string familyName(EnvFamily f);

/// Knobs for the finite candidate classes emitted with each environment.
/// Decoys are label permutations, partial observation reassignments
/// (finite emissions), label merges (hadamard emissions), and renormalized
/// transition perturbations; the truth is always candidate 0.
struct ClassSpec {
  int permutationDecoys = 3;
  int reassignDecoys = 2;
  std::vector<Scalar> reassignFractions = {0.1, 0.3};
  int mergeDecoys = 2;
  int perturbDecoys = 2;
  std::vector<Scalar> perturbScales = {0.1, 0.3};
  int maxDiscriminatorsPerStep = 0;  // <=0: keep the full witness family
};

struct EnvSpec {
  EnvFamily family = EnvFamily::Block;
  int horizon = 3;
  int latents = 3;           // Z (local states per player in factored mode)
  int players = 2;
  int actionsPerPlayer = 3;
  int symbolsPerLatent = 2;  // k, finite emissions
  ObsMode obsMode = ObsMode::Hadamard;
  Scalar sigma = 0.1;
  Topology topology = Topology::Ring;
  int neighborhoodSize = 2;  // L
  bool zeroSum = false;
  bool unitRewards = false;  // rewards U(0,1) instead of U(-1,1)
  std::uint64_t seed = 0;
  ClassSpec classes;
  int jointStateCap = 729;   // refuse factored expansions beyond this
};

/// An environment together with the candidate classes the learners see.
struct GeneratedEnv {
  EnvSpec spec;
  BlockEnv env;
  ModelClass mbClass;            // finite emissions only
  FeatureClass mfClass;
  FactoredClasses factorClasses; // factored family only
};

/// Tabular latent game per the desk-scale recipe: rewards i.i.d. uniform,
/// transition rows drawn uniform then shifted to nonnegativity and
/// normalized onto the simplex.
LatentGame genTabular(const EnvSpec& spec, Rng& rng);

/// Block environment: latent game plus finite or hadamard emissions, with
/// model and feature classes attached.
GeneratedEnv genBlock(const EnvSpec& spec, Rng& rng);

/// Factored environment: per-player local transitions over a neighborhood
/// topology, identity emissions over the joint latent space, and per-factor
/// candidate classes.
GeneratedEnv genFactored(const EnvSpec& spec, Rng& rng);

/// Dispatch on spec.family, seeding from spec.seed.
GeneratedEnv generate(const EnvSpec& spec);

/// Sylvester Hadamard matrix of size n (n a power of two).
Matrix sylvesterHadamard(int n);

}  // namespace mgrl

#endif  // MGRL_ENVS_HPP_
