#ifndef MGRL_HARNESS_HPP_
#define MGRL_HARNESS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mgrl/meta.hpp"
#include "mgrl/serialize.hpp"

namespace mgrl {

/// One experiment: an environment (by file or inline spec), a run
/// configuration, and the seeds to sweep. Parsed from a flat key=value
/// manifest; command-line flags override file entries.
struct ExperimentManifest {
  std::string envPath;               // empty when the spec is inline
  std::optional<EnvSpec> inlineSpec;
  RunConfig config;
  std::vector<std::uint64_t> seeds = {0};
  std::string outDir = "runs";
  int jobs = 1;
  std::map<std::string, std::string> raw;  // canonical entries, for hashing

  std::string hash() const;
};

/// Parses `key = value` lines ('#' comments); unknown keys are an error.
ExperimentManifest parseManifest(const std::string& text);
ExperimentManifest loadManifest(const std::string& path);

/// Applies one key=value override onto the manifest.
void applyManifestEntry(ExperimentManifest& m, const std::string& key, const std::string& value);

/// Seed list syntax: "0..4" (inclusive) or "0,3,7".
std::vector<std::uint64_t> parseSeeds(const std::string& text);

struct SeedOutcome {
  std::uint64_t seed = 0;
  RunResult result;
};

struct RunOutputs {
  std::vector<SeedOutcome> outcomes;
  Scalar meanExploit = 0.0;
  Scalar stdExploit = 0.0;
};

/// Runs every seed (optionally in parallel worker threads), writes one CSV
/// and policy dump per seed plus a summary JSON, and returns the outcomes.
/// CSV schema: n, delta, vbar_i..., vlow_i..., exploit, wall_ms.
RunOutputs runExperiment(const ExperimentManifest& manifest);

/// Exit-code entry points used by the CLI (0 success, 2 runtime error).
int cmdRun(const ExperimentManifest& manifest);
int cmdEval(const std::string& envPath, const std::string& policyPath, const std::string& conceptStr);
int cmdTable1(const std::string& outDir, bool quick = false);

/// "mean (std)" with four decimals, the summary presentation format.
std::string formatMeanStd(Scalar mean, Scalar std);

}  // namespace mgrl

#endif  // MGRL_HARNESS_HPP_
