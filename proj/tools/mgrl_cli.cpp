// Command-line harness: environment generation, seeded learning runs,
// exploitability evaluation, and the benchmark table reproduction.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mgrl/harness.hpp"

namespace {

int doGen(const std::string& family, int H, int Z, int players, int actions, int k,
          const std::string& obsMode, double sigma, const std::string& topology, int L,
          bool zeroSum, std::uint64_t seed, const std::string& out) {
  try {
    mgrl::EnvSpec spec;
    spec.family = mgrl::familyFromString(family);
    spec.horizon = H;
    spec.latents = Z;
    spec.players = players;
    spec.actionsPerPlayer = actions;
    spec.symbolsPerLatent = k;
    spec.obsMode = obsMode == "finite" ? mgrl::ObsMode::Finite : mgrl::ObsMode::Hadamard;
    spec.sigma = sigma;
    spec.topology = topology == "grid" ? mgrl::Topology::Grid : mgrl::Topology::Ring;
    spec.neighborhoodSize = L;
    spec.zeroSum = zeroSum;
    spec.seed = seed;
    const mgrl::GeneratedEnv env = mgrl::generate(spec);
    mgrl::saveEnv(env, out);
    std::cout << "wrote " << out << std::endl;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "gen failed: " << e.what() << std::endl;
    return 2;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-player Markov game representation learning and planning"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "generate an environment file");
  std::string family = "block", obsMode = "hadamard", topology = "ring", genOut = "env.json";
  int H = 3, Z = 3, players = 2, actions = 3, k = 2, L = 2;
  double sigma = 0.1;
  bool zeroSum = false;
  std::uint64_t seed = 0;
  gen->add_option("--family", family, "tabular | block | factored");
  gen->add_option("--H", H, "horizon");
  gen->add_option("--Z", Z, "latent states (local states when factored)");
  gen->add_option("--players", players, "number of players");
  gen->add_option("--actions", actions, "actions per player");
  gen->add_option("--k", k, "symbols per latent (finite emissions)");
  gen->add_option("--obs-mode", obsMode, "finite | hadamard");
  gen->add_option("--sigma", sigma, "emission noise (hadamard)");
  gen->add_option("--topology", topology, "ring | grid (factored)");
  gen->add_option("--L", L, "neighborhood size bound (factored)");
  gen->add_flag("--zero-sum", zeroSum, "two-player zero-sum rewards");
  gen->add_option("--seed", seed, "generator seed");
  gen->add_option("--out", genOut, "output path");

  auto* runCmd = app.add_subcommand("run", "run the learner and write metrics");
  std::string manifestPath, runEnv, runVariant, runConcept, runSeeds, runOut;
  int runEpisodes = -1, runEvalEvery = -1, runJobs = -1;
  std::vector<std::string> sets;
  runCmd->add_option("--manifest", manifestPath, "manifest file (key = value lines)");
  runCmd->add_option("--env", runEnv, "environment file (overrides manifest)");
  runCmd->add_option("--variant", runVariant, "mb | mf | factored");
  runCmd->add_option("--concept", runConcept, "ne | cce | ce");
  runCmd->add_option("--episodes", runEpisodes, "episode budget N");
  runCmd->add_option("--seeds", runSeeds, "e.g. 0..4 or 0,1,2");
  runCmd->add_option("--out", runOut, "output directory");
  runCmd->add_option("--eval-every", runEvalEvery, "exact evaluation cadence (0 = final only)");
  runCmd->add_option("--jobs", runJobs, "parallel seed workers");
  runCmd->add_option("--set", sets, "extra manifest overrides, key=value")->take_all();

  auto* evalCmd = app.add_subcommand("eval", "print exploitability of a stored policy");
  std::string evalEnv, evalPolicy, evalConcept = "cce";
  evalCmd->add_option("--env", evalEnv, "environment file")->required();
  evalCmd->add_option("--policy", evalPolicy, "policy file")->required();
  evalCmd->add_option("--concept", evalConcept, "ne | cce | ce");

  auto* tableCmd = app.add_subcommand("table1", "reproduce the benchmark table");
  std::string tableOut = "runs/table1";
  bool tableQuick = false;
  tableCmd->add_option("--out", tableOut, "output directory");
  tableCmd->add_flag("--quick", tableQuick, "abbreviated sweep (smoke test)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 1;
  }

  if (gen->parsed()) {
    return doGen(family, H, Z, players, actions, k, obsMode, sigma, topology, L, zeroSum, seed,
                 genOut);
  }
  if (runCmd->parsed()) {
    try {
      mgrl::ExperimentManifest manifest;
      if (!manifestPath.empty()) manifest = mgrl::loadManifest(manifestPath);
      if (!runEnv.empty()) mgrl::applyManifestEntry(manifest, "env", runEnv);
      if (!runVariant.empty()) mgrl::applyManifestEntry(manifest, "variant", runVariant);
      if (!runConcept.empty()) mgrl::applyManifestEntry(manifest, "concept", runConcept);
      if (runEpisodes >= 0) {
        mgrl::applyManifestEntry(manifest, "episodes", std::to_string(runEpisodes));
      }
      if (!runSeeds.empty()) mgrl::applyManifestEntry(manifest, "seeds", runSeeds);
      if (!runOut.empty()) mgrl::applyManifestEntry(manifest, "out", runOut);
      if (runEvalEvery >= 0) {
        mgrl::applyManifestEntry(manifest, "eval_every", std::to_string(runEvalEvery));
      }
      if (runJobs > 0) mgrl::applyManifestEntry(manifest, "jobs", std::to_string(runJobs));
      for (const std::string& kv : sets) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
          std::cerr << "--set expects key=value, got: " << kv << std::endl;
          return 1;
        }
        mgrl::applyManifestEntry(manifest, kv.substr(0, eq), kv.substr(eq + 1));
      }
      return mgrl::cmdRun(manifest);
    } catch (const std::exception& e) {
      std::cerr << "run failed: " << e.what() << std::endl;
      return 2;
    }
  }
  if (evalCmd->parsed()) {
    return mgrl::cmdEval(evalEnv, evalPolicy, evalConcept);
  }
  if (tableCmd->parsed()) {
    return mgrl::cmdTable1(tableOut, tableQuick);
  }
  return 1;
}
