#ifndef MGRL_SERIALIZE_HPP_
#define MGRL_SERIALIZE_HPP_

#include <string>

#include <json.hpp>

#include "mgrl/envs.hpp"
#include "mgrl/policy.hpp"

namespace mgrl {

/// Versioned environment document: sizes, dense transition/reward/emission
/// arrays in row-major order, attached candidate classes, and the seed that
/// generated it. Round-trips bit-exactly.
nlohmann::json envToJson(const GeneratedEnv& env);
GeneratedEnv envFromJson(const nlohmann::json& j);

void saveEnv(const GeneratedEnv& env, const std::string& path);
GeneratedEnv loadEnv(const std::string& path);

/// Policies persist as the materialized conditionals over the evaluation
/// states; loading restores a policy that answers uniformly off-table.
nlohmann::json policyToJson(const GeneratedEnv& env, const JointPolicy& policy);
JointPolicy policyFromJson(const GeneratedEnv& env, const nlohmann::json& j);

void savePolicy(const GeneratedEnv& env, const JointPolicy& policy, const std::string& path);
JointPolicy loadPolicy(const GeneratedEnv& env, const std::string& path);

/// FNV-1a content hash used to stamp outputs with their input identity.
std::string contentHash(const std::string& bytes);
std::string fileHash(const std::string& path);

std::string readFile(const std::string& path);
void writeFile(const std::string& path, const std::string& contents);

}  // namespace mgrl

#endif  // MGRL_SERIALIZE_HPP_
