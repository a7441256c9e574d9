#include "mgrl/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mgrl/eval.hpp"

namespace mgrl {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

bool parseBool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw std::invalid_argument("expected a boolean, got '" + v + "'");
}

std::vector<Scalar> parseScalarList(const std::string& v) {
  std::vector<Scalar> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(trim(item)));
  return out;
}

std::string fmtFixed(Scalar v, int precision = 6) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(precision) << v;
  return os.str();
}

EnvSpec& ensureSpec(ExperimentManifest& m) {
  if (!m.inlineSpec) m.inlineSpec = EnvSpec{};
  return *m.inlineSpec;
}

}  // namespace

std::vector<std::uint64_t> parseSeeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  const auto range = text.find("..");
  if (range != std::string::npos) {
    const std::uint64_t lo = std::stoull(trim(text.substr(0, range)));
    const std::uint64_t hi = std::stoull(trim(text.substr(range + 2)));
    if (hi < lo) throw std::invalid_argument("seed range is empty: " + text);
    for (std::uint64_t s = lo; s <= hi; ++s) seeds.push_back(s);
  } else {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) seeds.push_back(std::stoull(trim(item)));
  }
  if (seeds.empty()) throw std::invalid_argument("no seeds in: " + text);
  std::vector<std::uint64_t> dedup = seeds;
  std::sort(dedup.begin(), dedup.end());
  if (std::adjacent_find(dedup.begin(), dedup.end()) != dedup.end()) {
    throw std::invalid_argument("seeds must be distinct: " + text);
  }
  return seeds;
}

void applyManifestEntry(ExperimentManifest& m, const std::string& key, const std::string& value) {
  m.raw[key] = value;
  if (key == "env") {
    m.envPath = value;
  } else if (key == "env.family") {
    ensureSpec(m).family = familyFromString(value);
  } else if (key == "env.horizon") {
    ensureSpec(m).horizon = std::stoi(value);
  } else if (key == "env.latents") {
    ensureSpec(m).latents = std::stoi(value);
  } else if (key == "env.players") {
    ensureSpec(m).players = std::stoi(value);
  } else if (key == "env.actions") {
    ensureSpec(m).actionsPerPlayer = std::stoi(value);
  } else if (key == "env.k") {
    ensureSpec(m).symbolsPerLatent = std::stoi(value);
  } else if (key == "env.obs_mode") {
    ensureSpec(m).obsMode = value == "finite" ? ObsMode::Finite : ObsMode::Hadamard;
  } else if (key == "env.sigma") {
    ensureSpec(m).sigma = std::stod(value);
  } else if (key == "env.topology") {
    ensureSpec(m).topology = value == "grid" ? Topology::Grid : Topology::Ring;
  } else if (key == "env.L") {
    ensureSpec(m).neighborhoodSize = std::stoi(value);
  } else if (key == "env.zero_sum") {
    ensureSpec(m).zeroSum = parseBool(value);
  } else if (key == "env.unit_rewards") {
    ensureSpec(m).unitRewards = parseBool(value);
  } else if (key == "env.seed") {
    ensureSpec(m).seed = std::stoull(value);
  } else if (key == "env.classes.permutations") {
    ensureSpec(m).classes.permutationDecoys = std::stoi(value);
  } else if (key == "env.classes.reassigns") {
    ensureSpec(m).classes.reassignDecoys = std::stoi(value);
  } else if (key == "env.classes.reassign_fractions") {
    ensureSpec(m).classes.reassignFractions = parseScalarList(value);
  } else if (key == "env.classes.merges") {
    ensureSpec(m).classes.mergeDecoys = std::stoi(value);
  } else if (key == "env.classes.perturbs") {
    ensureSpec(m).classes.perturbDecoys = std::stoi(value);
  } else if (key == "env.classes.perturb_scales") {
    ensureSpec(m).classes.perturbScales = parseScalarList(value);
  } else if (key == "env.classes.max_discriminators") {
    ensureSpec(m).classes.maxDiscriminatorsPerStep = std::stoi(value);
  } else if (key == "variant") {
    m.config.variant = variantFromString(value);
  } else if (key == "concept") {
    m.config.concept_ = conceptFromString(value);
  } else if (key == "episodes") {
    m.config.episodes = std::stoi(value);
  } else if (key == "seeds") {
    m.seeds = parseSeeds(value);
  } else if (key == "out") {
    m.outDir = value;
  } else if (key == "eval_every") {
    m.config.evalEvery = std::stoi(value);
  } else if (key == "jobs") {
    m.jobs = std::stoi(value);
  } else if (key == "timing") {
    // handled at write time through raw lookup
    parseBool(value);
  } else if (key == "bonus.mode") {
    if (value == "theory") {
      m.config.bonus.mode = BonusMode::Theory;
    } else if (value == "constant") {
      m.config.bonus.mode = BonusMode::Constant;
    } else {
      throw std::invalid_argument("bonus.mode must be 'theory' or 'constant'");
    }
  } else if (key == "bonus.alpha") {
    m.config.bonus.constAlpha = std::stod(value);
  } else if (key == "bonus.lambda") {
    m.config.bonus.lambda = std::stod(value);
  } else if (key == "bonus.c_alpha") {
    m.config.bonus.cAlpha = std::stod(value);
  } else if (key == "bonus.c_zeta") {
    m.config.bonus.cZeta = std::stod(value);
  } else if (key == "bonus.delta") {
    m.config.bonus.delta = std::stod(value);
  } else if (key == "replearn.lambda") {
    m.config.bonus.replearnLambda = std::stod(value);
  } else if (key == "replearn.iterative") {
    m.config.useIterativeFit = parseBool(value);
  } else if (key == "replearn.rounds") {
    m.config.replearnRounds = std::stoi(value);
  } else if (key == "stage.eps") {
    m.config.stageEps = std::stod(value);
  } else if (key == "stage.max_iters") {
    m.config.stageMaxIters = std::stoi(value);
  } else {
    throw std::invalid_argument("unknown manifest key: " + key);
  }
}

ExperimentManifest parseManifest(const std::string& text) {
  ExperimentManifest m;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("manifest line " + std::to_string(lineno) +
                                  " is not key = value: " + line);
    }
    applyManifestEntry(m, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return m;
}

ExperimentManifest loadManifest(const std::string& path) {
  return parseManifest(readFile(path));
}

std::string ExperimentManifest::hash() const {
  std::string canonical;
  for (const auto& [k, v] : raw) canonical += k + "=" + v + "\n";
  return contentHash(canonical);
}

std::string formatMeanStd(Scalar mean, Scalar std) {
  return fmtFixed(mean, 4) + " (" + fmtFixed(std, 4) + ")";
}

namespace {

void writeCsv(const std::string& path, const RunResult& result, int players,
              const std::string& manifestHash, const std::string& envHash, std::uint64_t seed,
              bool timing) {
  std::ostringstream os;
  os << "# manifest=" << manifestHash << " env=" << envHash << " seed=" << seed << "\n";
  os << "n,delta";
  for (int i = 0; i < players; ++i) os << ",vbar_" << i;
  for (int i = 0; i < players; ++i) os << ",vlow_" << i;
  os << ",exploit,wall_ms\n";
  for (const EpisodeRecord& rec : result.log) {
    os << rec.episode << "," << fmtFixed(rec.delta);
    for (int i = 0; i < players; ++i) os << "," << fmtFixed(rec.vOpt[i]);
    for (int i = 0; i < players; ++i) os << "," << fmtFixed(rec.vPes[i]);
    os << ",";
    if (!std::isnan(rec.exploit)) os << fmtFixed(rec.exploit);
    os << "," << (timing ? fmtFixed(rec.wallMs, 3) : std::string("0.000")) << "\n";
  }
  writeFile(path, os.str());
}

}  // namespace

RunOutputs runExperiment(const ExperimentManifest& manifest) {
  fs::create_directories(manifest.outDir);
  const std::string envFile = manifest.outDir + "/env.json";
  GeneratedEnv genv;
  if (!manifest.envPath.empty()) {
    genv = loadEnv(manifest.envPath);
    writeFile(envFile, readFile(manifest.envPath));
  } else if (manifest.inlineSpec) {
    genv = generate(*manifest.inlineSpec);
    saveEnv(genv, envFile);
  } else {
    throw std::runtime_error("manifest specifies no environment (env = ... or env.* keys)");
  }
  const std::string envHash = fileHash(envFile);
  const std::string manifestHash = manifest.hash();
  const bool timing = manifest.raw.count("timing") ? parseBool(manifest.raw.at("timing")) : false;

  RunOutputs outputs;
  outputs.outcomes.resize(manifest.seeds.size());
  std::atomic<size_t> cursor{0};
  const int workers = std::max(1, std::min<int>(manifest.jobs, manifest.seeds.size()));
  auto work = [&]() {
    while (true) {
      const size_t idx = cursor.fetch_add(1);
      if (idx >= manifest.seeds.size()) return;
      RunConfig rc = manifest.config;
      rc.seed = manifest.seeds[idx];
      outputs.outcomes[idx] = SeedOutcome{manifest.seeds[idx], run(genv, rc)};
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  json perSeed = json::array();
  Vector finals(manifest.seeds.size());
  for (size_t i = 0; i < outputs.outcomes.size(); ++i) {
    const SeedOutcome& oc = outputs.outcomes[i];
    writeCsv(manifest.outDir + "/seed_" + std::to_string(oc.seed) + ".csv", oc.result,
             genv.env.players(), manifestHash, envHash, oc.seed, timing);
    JointPolicy policy = oc.result.finalPolicy;
    json pj = policyToJson(genv, policy);
    pj["manifest_hash"] = manifestHash;
    pj["env_hash"] = envHash;
    pj["seed"] = oc.seed;
    writeFile(manifest.outDir + "/policy_seed_" + std::to_string(oc.seed) + ".json",
              pj.dump(2) + "\n");
    finals[static_cast<int>(i)] = oc.result.finalExploit;
    perSeed.push_back(json{{"seed", oc.seed},
                           {"final_exploitability", oc.result.finalExploit},
                           {"best_episode", oc.result.bestEpisode},
                           {"best_delta", oc.result.bestDelta},
                           {"max_sandwich_violation", oc.result.maxSandwichViolation},
                           {"min_simplex_entry", oc.result.minSimplexEntry},
                           {"max_simplex_mass", oc.result.maxSimplexMass}});
  }
  outputs.meanExploit = finals.mean();
  outputs.stdExploit =
      std::sqrt((finals.array() - outputs.meanExploit).square().sum() / finals.size());

  json summary;
  summary["format"] = "mgrl-summary";
  summary["manifest_hash"] = manifestHash;
  summary["env_hash"] = envHash;
  summary["variant"] = variantName(manifest.config.variant);
  summary["concept"] = conceptName(manifest.config.concept_);
  summary["episodes"] = manifest.config.episodes;
  summary["seeds"] = manifest.seeds;
  summary["final_exploitability"] =
      json{{"mean", outputs.meanExploit},
           {"std", outputs.stdExploit},
           {"formatted", formatMeanStd(outputs.meanExploit, outputs.stdExploit)},
           {"per_seed", perSeed}};
  writeFile(manifest.outDir + "/summary.json", summary.dump(2) + "\n");
  return outputs;
}

int cmdRun(const ExperimentManifest& manifest) {
  try {
    const RunOutputs out = runExperiment(manifest);
    std::cout << "final exploitability: "
              << formatMeanStd(out.meanExploit, out.stdExploit) << " over "
              << manifest.seeds.size() << " seed(s); outputs in " << manifest.outDir
              << std::endl;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << std::endl;
    return 2;
  }
}

int cmdEval(const std::string& envPath, const std::string& policyPath,
            const std::string& conceptStr) {
  try {
    const GeneratedEnv genv = loadEnv(envPath);
    const JointPolicy policy = loadPolicy(genv, policyPath);
    const Scalar gap = exploitability(genv.env, policy, conceptFromString(conceptStr));
    std::cout << fmtFixed(gap, 6) << std::endl;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "eval failed: " << e.what() << std::endl;
    return 2;
  }
}

namespace {

struct Table1Row {
  std::string label;
  int horizon;
  std::uint64_t envSeed;
  std::string reportedBaseline;  // published DQN row
  std::string reportedMethod;    // published method row
};

ExperimentManifest table1Manifest(const Table1Row& row, const std::string& outDir, bool quick) {
  ExperimentManifest m;
  applyManifestEntry(m, "env.family", "block");
  applyManifestEntry(m, "env.horizon", std::to_string(row.horizon));
  applyManifestEntry(m, "env.latents", "3");
  applyManifestEntry(m, "env.players", "2");
  applyManifestEntry(m, "env.actions", "3");
  applyManifestEntry(m, "env.obs_mode", "hadamard");
  applyManifestEntry(m, "env.sigma", "0.1");
  applyManifestEntry(m, "env.zero_sum", "true");
  applyManifestEntry(m, "env.seed", std::to_string(row.envSeed));
  applyManifestEntry(m, "variant", "mf");
  applyManifestEntry(m, "concept", "cce");
  applyManifestEntry(m, "bonus.mode", "constant");
  applyManifestEntry(m, "bonus.alpha", "0.1");
  applyManifestEntry(m, "bonus.lambda", "1");
  applyManifestEntry(m, "eval_every", "0");
  if (row.horizon > 3) {
    // Leaner candidate classes keep the long-horizon sweep inside the
    // runtime budget without touching the learner itself.
    applyManifestEntry(m, "env.classes.permutations", "2");
    applyManifestEntry(m, "env.classes.merges", "1");
    applyManifestEntry(m, "env.classes.max_discriminators", "220");
  }
  const int episodes = row.horizon > 3 ? 500 : 200;
  applyManifestEntry(m, "episodes", std::to_string(quick ? std::min(episodes, 30) : episodes));
  applyManifestEntry(m, "seeds", quick ? "0..1" : "0..4");
  applyManifestEntry(m, "out", outDir + "/" + row.label);
  return m;
}

}  // namespace

int cmdTable1(const std::string& outDir, bool quick) {
  const std::vector<Table1Row> rows = {
      {"h3_env1", 3, 101, "0.0851 (0.1152)", "0.0013 (0.0018)"},
      {"h3_env2", 3, 102, "0.0877 (0.1961)", "0.0032 (0.0032)"},
      {"h3_env3", 3, 103, "0.0090 (0.0200)", "0.0004 (0.0009)"},
      {"h10_env1", 10, 201, "0.2730 (0.3270)", "0.0780 (0.1560)"},
      {"h10_env2", 10, 202, "0.0340 (0.0760)", "0.0070 (0.0160)"},
      {"h10_env3", 10, 203, "0.0320 (0.0170)", "0.0060 (0.0130)"},
  };
  try {
    fs::create_directories(outDir);
    std::vector<std::string> ours(rows.size());
    for (size_t i = 0; i < rows.size(); ++i) {
      const ExperimentManifest m = table1Manifest(rows[i], outDir, quick);
      std::cout << "running " << rows[i].label << " (H=" << rows[i].horizon << ", env seed "
                << rows[i].envSeed << ", " << m.seeds.size() << " seeds, "
                << m.config.episodes << " episodes)" << std::endl;
      const RunOutputs out = runExperiment(m);
      ours[i] = formatMeanStd(out.meanExploit, out.stdExploit);
      std::cout << "  " << rows[i].label << ": " << ours[i] << std::endl;
    }
    std::ostringstream md;
    md << "# Final-policy exploitability\n\n";
    md << "Mean (std) across seeds; published values alongside for comparison.\n\n";
    for (int block = 0; block < 2; ++block) {
      const int base = block * 3;
      md << "| H=" << (block == 0 ? 3 : 10) << " | Environment 1 | Environment 2 | Environment 3 |\n";
      md << "|---|---|---|---|\n";
      md << "| DQN (reported) |";
      for (int j = 0; j < 3; ++j) md << " " << rows[base + j].reportedBaseline << " |";
      md << "\n| reported |";
      for (int j = 0; j < 3; ++j) md << " " << rows[base + j].reportedMethod << " |";
      md << "\n| this implementation |";
      for (int j = 0; j < 3; ++j) md << " " << ours[base + j] << " |";
      md << "\n\n";
    }
    writeFile(outDir + "/table1.md", md.str());
    std::cout << "wrote " << outDir << "/table1.md" << std::endl;
    return 0;
  } catch (const std::exception& e) {
    std::cerr << "table1 failed: " << e.what() << std::endl;
    return 2;
  }
}

}  // namespace mgrl
