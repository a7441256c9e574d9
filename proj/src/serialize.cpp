#include "mgrl/serialize.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mgrl {

using nlohmann::json;

namespace {

json matrixToJson(const Matrix& m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) rows.push_back(m(r, c));
  }
  return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Matrix matrixFromJson(const json& j) {
  Matrix m(j.at("rows").get<int>(), j.at("cols").get<int>());
  const auto& data = j.at("data");
  int idx = 0;
  for (int r = 0; r < m.rows(); ++r) {
    for (int c = 0; c < m.cols(); ++c) m(r, c) = data.at(idx++).get<double>();
  }
  return m;
}

json vectorToJson(const Vector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Vector vectorFromJson(const json& j) {
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j.at(i).get<double>();
  return v;
}

json intVectorToJson(const IntVector& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

IntVector intVectorFromJson(const json& j) {
  IntVector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) v[static_cast<int>(i)] = j.at(i).get<int>();
  return v;
}

json specToJson(const EnvSpec& s) {
  return json{{"family", familyName(s.family)},
              {"horizon", s.horizon},
              {"latents", s.latents},
              {"players", s.players},
              {"actions_per_player", s.actionsPerPlayer},
              {"symbols_per_latent", s.symbolsPerLatent},
              {"obs_mode", s.obsMode == ObsMode::Finite ? "finite" : "hadamard"},
              {"sigma", s.sigma},
              {"topology", s.topology == Topology::Ring ? "ring" : "grid"},
              {"neighborhood_size", s.neighborhoodSize},
              {"zero_sum", s.zeroSum},
              {"unit_rewards", s.unitRewards},
              {"seed", s.seed},
              {"joint_state_cap", s.jointStateCap},
              {"classes",
               json{{"permutation_decoys", s.classes.permutationDecoys},
                    {"reassign_decoys", s.classes.reassignDecoys},
                    {"reassign_fractions", s.classes.reassignFractions},
                    {"merge_decoys", s.classes.mergeDecoys},
                    {"perturb_decoys", s.classes.perturbDecoys},
                    {"perturb_scales", s.classes.perturbScales},
                    {"max_discriminators_per_step", s.classes.maxDiscriminatorsPerStep}}}};
}

EnvSpec specFromJson(const json& j) {
  EnvSpec s;
  s.family = familyFromString(j.at("family").get<std::string>());
  s.horizon = j.at("horizon").get<int>();
  s.latents = j.at("latents").get<int>();
  s.players = j.at("players").get<int>();
  s.actionsPerPlayer = j.at("actions_per_player").get<int>();
  s.symbolsPerLatent = j.at("symbols_per_latent").get<int>();
  s.obsMode = j.at("obs_mode").get<std::string>() == "finite" ? ObsMode::Finite : ObsMode::Hadamard;
  s.sigma = j.at("sigma").get<double>();
  s.topology = j.at("topology").get<std::string>() == "ring" ? Topology::Ring : Topology::Grid;
  s.neighborhoodSize = j.at("neighborhood_size").get<int>();
  s.zeroSum = j.at("zero_sum").get<bool>();
  s.unitRewards = j.at("unit_rewards").get<bool>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.jointStateCap = j.at("joint_state_cap").get<int>();
  const json& c = j.at("classes");
  s.classes.permutationDecoys = c.at("permutation_decoys").get<int>();
  s.classes.reassignDecoys = c.at("reassign_decoys").get<int>();
  s.classes.reassignFractions = c.at("reassign_fractions").get<std::vector<double>>();
  s.classes.mergeDecoys = c.at("merge_decoys").get<int>();
  s.classes.perturbDecoys = c.at("perturb_decoys").get<int>();
  s.classes.perturbScales = c.at("perturb_scales").get<std::vector<double>>();
  s.classes.maxDiscriminatorsPerStep = c.at("max_discriminators_per_step").get<int>();
  return s;
}

}  // namespace

json envToJson(const GeneratedEnv& g) {
  const BlockEnv& e = g.env;
  json j;
  j["format"] = "mgrl-env";
  j["version"] = 1;
  j["spec"] = specToJson(g.spec);
  j["horizon"] = e.horizon();
  j["latents"] = e.latentCount();
  j["players"] = e.players();
  j["action_sizes"] = e.actions().sizes;
  j["init"] = vectorToJson(e.latent.init);
  json trans = json::array();
  for (const Matrix& t : e.latent.trans) trans.push_back(matrixToJson(t));
  j["transitions"] = trans;
  json rewards = json::array();
  for (const auto& perStep : e.latent.rewards) {
    json per = json::array();
    for (const Matrix& r : perStep) per.push_back(matrixToJson(r));
    rewards.push_back(per);
  }
  j["rewards"] = rewards;
  if (e.mode == ObsMode::Finite) {
    j["emission"] = json{{"mode", "finite"}, {"k", e.symbolsPerLatent}};
  } else {
    j["emission"] = json{{"mode", "hadamard"}, {"sigma", e.noiseSigma}, {"dim", e.obsDim}};
  }
  if (e.factored) {
    const FactoredStructure& f = *e.factored;
    json factors = json::array();
    for (const auto& perStep : f.factors) {
      json per = json::array();
      for (const Matrix& m : perStep) per.push_back(matrixToJson(m));
      factors.push_back(per);
    }
    j["factored"] = json{{"local_states", f.localStates},
                         {"neighborhoods", f.neighborhoods},
                         {"factors", factors}};
  }
  json mb = json::array();
  for (const auto& perStep : g.mbClass.perStep) {
    json per = json::array();
    for (const MbCandidate& c : perStep) {
      per.push_back(json{{"decoder", intVectorToJson(c.decoder.map)},
                         {"next_obs", matrixToJson(c.nextObs)},
                         {"provenance", c.provenance}});
    }
    mb.push_back(per);
  }
  j["mb_class"] = mb;
  json mf = json::array();
  for (const auto& perLevel : g.mfClass.perLevel) {
    json per = json::array();
    for (const CandidateDecoder& d : perLevel) {
      per.push_back(json{{"map", intVectorToJson(d.map)}, {"provenance", d.provenance}});
    }
    mf.push_back(per);
  }
  j["mf_class"] = mf;
  json fc = json::array();
  for (const auto& perStep : g.factorClasses.perStep) {
    json perH = json::array();
    for (const auto& perPlayer : perStep) {
      json per = json::array();
      for (const FactorCandidate& c : perPlayer) {
        per.push_back(json{{"table", matrixToJson(c.table)}, {"provenance", c.provenance}});
      }
      perH.push_back(per);
    }
    fc.push_back(perH);
  }
  j["factor_classes"] = fc;
  return j;
}

GeneratedEnv envFromJson(const json& j) {
  if (j.at("format").get<std::string>() != "mgrl-env") {
    throw std::runtime_error("envFromJson: not an environment document");
  }
  if (j.at("version").get<int>() != 1) {
    throw std::runtime_error("envFromJson: unsupported version");
  }
  GeneratedEnv g;
  g.spec = specFromJson(j.at("spec"));
  BlockEnv& e = g.env;
  e.latent.horizon = j.at("horizon").get<int>();
  e.latent.latentCount = j.at("latents").get<int>();
  e.latent.actions = ActionSpace(j.at("action_sizes").get<std::vector<int>>());
  e.latent.init = vectorFromJson(j.at("init"));
  for (const json& t : j.at("transitions")) e.latent.trans.push_back(matrixFromJson(t));
  for (const json& perStep : j.at("rewards")) {
    std::vector<Matrix> per;
    for (const json& r : perStep) per.push_back(matrixFromJson(r));
    e.latent.rewards.push_back(std::move(per));
  }
  const json& em = j.at("emission");
  if (em.at("mode").get<std::string>() == "finite") {
    e.mode = ObsMode::Finite;
    e.symbolsPerLatent = em.at("k").get<int>();
  } else {
    e.mode = ObsMode::Hadamard;
    e.noiseSigma = em.at("sigma").get<double>();
    e.obsDim = em.at("dim").get<int>();
    e.hadamard = sylvesterHadamard(e.obsDim);
  }
  if (j.contains("factored")) {
    FactoredStructure f;
    const json& fj = j.at("factored");
    f.localStates = fj.at("local_states").get<int>();
    f.neighborhoods = fj.at("neighborhoods").get<std::vector<std::vector<int>>>();
    for (const json& perStep : fj.at("factors")) {
      std::vector<Matrix> per;
      for (const json& m : perStep) per.push_back(matrixFromJson(m));
      f.factors.push_back(std::move(per));
    }
    e.factored = std::move(f);
  }
  for (const json& perStep : j.at("mb_class")) {
    std::vector<MbCandidate> per;
    for (const json& c : perStep) {
      MbCandidate cand;
      cand.decoder.map = intVectorFromJson(c.at("decoder"));
      cand.decoder.provenance = c.at("provenance").get<std::string>();
      cand.nextObs = matrixFromJson(c.at("next_obs"));
      cand.provenance = cand.decoder.provenance;
      per.push_back(std::move(cand));
    }
    g.mbClass.perStep.push_back(std::move(per));
  }
  if (!g.mbClass.perStep.empty()) {
    g.mbClass.featureDim = e.latent.latentCount * e.latent.jointActions();
  }
  for (const json& perLevel : j.at("mf_class")) {
    std::vector<CandidateDecoder> per;
    for (const json& d : perLevel) {
      CandidateDecoder dec;
      dec.map = intVectorFromJson(d.at("map"));
      dec.provenance = d.at("provenance").get<std::string>();
      per.push_back(std::move(dec));
    }
    g.mfClass.perLevel.push_back(std::move(per));
  }
  for (const json& perStep : j.at("factor_classes")) {
    std::vector<std::vector<FactorCandidate>> perH;
    for (const json& perPlayer : perStep) {
      std::vector<FactorCandidate> per;
      for (const json& c : perPlayer) {
        per.push_back({matrixFromJson(c.at("table")), c.at("provenance").get<std::string>()});
      }
      perH.push_back(std::move(per));
    }
    g.factorClasses.perStep.push_back(std::move(perH));
  }
  e.validate();
  return g;
}

void saveEnv(const GeneratedEnv& env, const std::string& path) {
  writeFile(path, envToJson(env).dump(2) + "\n");
}

GeneratedEnv loadEnv(const std::string& path) {
  return envFromJson(json::parse(readFile(path)));
}

json policyToJson(const GeneratedEnv& env, const JointPolicy& policy) {
  const EvalView view = EvalView::make(env.env);
  const PolicyTable table = policy.materialize(view);
  json j;
  j["format"] = "mgrl-policy";
  j["version"] = 1;
  j["kind"] = policy.kind() == JointPolicy::Kind::Product ? "product" : "correlated";
  j["horizon"] = policy.horizon();
  j["action_sizes"] = policy.actions().sizes;
  j["provenance_episode"] = policy.provenanceEpisode();
  j["state_space"] = env.env.mode == ObsMode::Finite ? "symbols" : "latents";
  json steps = json::array();
  for (const Matrix& m : table.table) steps.push_back(matrixToJson(m));
  j["conditionals"] = steps;
  return j;
}

JointPolicy policyFromJson(const GeneratedEnv& env, const json& j) {
  if (j.at("format").get<std::string>() != "mgrl-policy") {
    throw std::runtime_error("policyFromJson: not a policy document");
  }
  const EvalView view = EvalView::make(env.env);
  std::vector<Matrix> table;
  for (const json& m : j.at("conditionals")) table.push_back(matrixFromJson(m));
  const auto kind = j.at("kind").get<std::string>() == "product" ? JointPolicy::Kind::Product
                                                                 : JointPolicy::Kind::Correlated;
  JointPolicy policy = JointPolicy::fromTable(kind, view, std::move(table));
  policy.setProvenanceEpisode(j.at("provenance_episode").get<int>());
  return policy;
}

void savePolicy(const GeneratedEnv& env, const JointPolicy& policy, const std::string& path) {
  writeFile(path, policyToJson(env, policy).dump(2) + "\n");
}

JointPolicy loadPolicy(const GeneratedEnv& env, const std::string& path) {
  return policyFromJson(env, json::parse(readFile(path)));
}

std::string contentHash(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream os;
  os << std::hex << h;
  return os.str();
}

std::string fileHash(const std::string& path) { return contentHash(readFile(path)); }

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void writeFile(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << contents;
}

}  // namespace mgrl
