// run_config.hpp
//
// A run's configuration as canonical JSON (sorted keys, compact dump) and the
// hash embedded in every artifact the command-line tool writes.

#pragma once

#include <string>
#include <string_view>

#include <json.hpp>

#include "cubesq/core.hpp"

namespace cubesq {

struct RunConfig {
    std::string subcommand;
    nlohmann::json values = nlohmann::json::object();

    nlohmann::json to_json() const;
    static RunConfig from_json(const nlohmann::json& j);  // throws ContractError
    std::string canonical() const;                        // compact dump, keys sorted
    std::string hash() const;                             // 16 hex digits
};

u64 fnv1a64(std::string_view data);
std::string hex64(u64 v);

inline constexpr const char* kVersion = CUBESQ_VERSION;

// "# cubesq <version> config <hash>": first line of every text artifact.
std::string artifact_header(const RunConfig& cfg, const char* comment = "# ");

}  // namespace cubesq
