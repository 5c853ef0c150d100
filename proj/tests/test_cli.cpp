#include "regrecon/experiments.hpp"
#include "regrecon/report.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace regrecon;

namespace {

const std::string kHopf = "[run]\nseed = 4\n\n[hopf]\nd = 1\nnodes = 4\n";

std::string message_of(const std::string& name, const std::string& text) {
  try {
    run_experiment(name, Config::parse(text));
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("config errors name the offending key") {
  CHECK(message_of("hopf-selftest", "[hopf]\nd = 1\n").find("run.seed") != std::string::npos);
  CHECK(message_of("hopf-selftest", kHopf + "colour = red\n").find("hopf.colour") != std::string::npos);
  CHECK(message_of("hopf-selftest", "[run]\nseed = -3\n").find("run.seed") != std::string::npos);
  CHECK(message_of("hopf-selftest", "[run]\nseed = 1\n[hopf]\nnodes = 9\n").find("hopf.nodes") != std::string::npos);
  CHECK(message_of("mollify-rate", "[run]\nseed = 1\n[sweep]\nlambda_exp = 4..2\n").find("sweep.lambda_exp") != std::string::npos);
  CHECK(message_of("rp-lift-check", "[run]\nseed = 1\n[path]\nkind = spiral\n").find("path.kind") != std::string::npos);
  CHECK_THROWS_AS(Config::parse("seed = 1\n[run\n"), ConfigError);
  CHECK_THROWS_AS(run_experiment("no-such-thing", Config::parse(kHopf)), ConfigError);
}

TEST_CASE("resolution rejections surface as configuration errors") {
  // a partition level the lattice cannot resolve
  CHECK_THROWS_AS(run_experiment("density-rate", Config::parse("[run]\nseed = 1\n[grid]\nlevel = 8\n[sweep]\nn = 1..7\n")),
                  ConfigError);
}

TEST_CASE("summaries are deterministic and carry the config hash") {
  const auto a = run_experiment("hopf-selftest", Config::parse(kHopf));
  const auto b = run_experiment("hopf-selftest", Config::parse("[hopf]\nnodes = 4\nd = 1\n[run]\nseed = 4\n"));
  CHECK(dump_json(a.summary) == dump_json(b.summary));
  CHECK(a.summary["config_hash"].get<std::string>().size() == 64);
  CHECK(a.pass);
  // --seed overrides run.seed and changes the hash
  const auto c = run_experiment("hopf-selftest", Config::parse(kHopf), 5);
  CHECK(c.summary["config_hash"] != a.summary["config_hash"]);
  CHECK(a.summary["metrics"].contains("tolerances"));
}

TEST_CASE("outputs land in the requested directory") {
  const auto dir = std::filesystem::temp_directory_path() / "regrecon_cli_test";
  std::filesystem::remove_all(dir);
  const auto r = run_experiment("gen-path", Config::parse("[run]\nseed = 1\n[grid]\nlevel = 8\n"));
  write_outputs(r, dir);
  CHECK(std::filesystem::exists(dir / "gen-path.json"));
  CHECK(std::filesystem::exists(dir / "path.csv"));
  std::ifstream in(dir / "path.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header.rfind("t,", 0) == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("shipped configs validate") {
  for (const auto& entry : std::filesystem::directory_iterator(REGRECON_CONFIG_DIR)) {
    const auto cfg = Config::load(entry.path());
    CHECK(cfg.has("run.seed"));
  }
  CHECK(experiment_names().size() == 10);
}

TEST_CASE("sha256 of a known string") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}
