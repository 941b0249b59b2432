#include "cubesq/run_config.hpp"

#include <cstdio>

namespace cubesq {

nlohmann::json RunConfig::to_json() const {
    nlohmann::json j = values;
    j["subcommand"] = subcommand;
    return j;
}

RunConfig RunConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ContractError("config: top level must be a JSON object");
    RunConfig c;
    c.values = j;
    if (j.contains("subcommand")) {
        if (!j["subcommand"].is_string()) throw ContractError("config: subcommand must be a string");
        c.subcommand = j["subcommand"].get<std::string>();
        c.values.erase("subcommand");
    }
    return c;
}

std::string RunConfig::canonical() const { return to_json().dump(); }

std::string RunConfig::hash() const { return hex64(fnv1a64(canonical())); }

u64 fnv1a64(std::string_view data) {
    u64 h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string hex64(u64 v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string artifact_header(const RunConfig& cfg, const char* comment) {
    return std::string(comment) + "cubesq " + kVersion + " config " + cfg.hash();
}

}  // namespace cubesq
