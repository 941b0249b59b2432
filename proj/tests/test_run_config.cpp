#include <doctest.h>

#include "cubesq/run_config.hpp"

using namespace cubesq;

TEST_CASE("fnv-1a 64 reference vectors") {
    CHECK(hex64(fnv1a64("")) == "cbf29ce484222325");
    CHECK(hex64(fnv1a64("a")) == "af63dc4c8601ec8c");
    CHECK(hex64(fnv1a64("foobar")) == "85944171f73967e8");
}

TEST_CASE("config hash is independent of key order") {
    const auto a = RunConfig::from_json(nlohmann::json::parse(R"({"subcommand":"census","N":100,"family":true})"));
    const auto b = RunConfig::from_json(nlohmann::json::parse(R"({"family":true,"N":100,"subcommand":"census"})"));
    CHECK(a.subcommand == "census");
    CHECK(a.canonical() == b.canonical());
    CHECK(a.hash() == b.hash());
    CHECK(a.hash().size() == 16);
    const auto c = RunConfig::from_json(nlohmann::json::parse(R"({"subcommand":"census","N":101,"family":true})"));
    CHECK(c.hash() != a.hash());
    CHECK(artifact_header(a) == std::string("# cubesq ") + kVersion + " config " + a.hash());
    CHECK(RunConfig::from_json(a.to_json()).hash() == a.hash());
    CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::array()), ContractError);
    CHECK_THROWS_AS(RunConfig::from_json(nlohmann::json::parse(R"({"subcommand":3})")), ContractError);
}
