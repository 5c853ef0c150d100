// Experiment configs (INI with a per-experiment schema) and the experiment
// suites behind the command line driver.
#pragma once

#include "regrecon/parallel.hpp"

#include <boost/property_tree/ptree.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace regrecon {

// Invalid configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config parse(const std::string& text);
  static Config load(const std::filesystem::path& file);

  bool has(const std::string& key) const;
  std::string raw(const std::string& key) const;  // throws ConfigError if absent
  std::vector<std::string> keys() const;          // "section.key", sorted
  // Overrides or adds a value (used for --seed).
  void set(const std::string& key, const std::string& value);

 private:
  boost::property_tree::ptree tree_;
};

struct ExperimentResult {
  nlohmann::json summary;  // {experiment, config_hash, metrics, pass}
  bool pass = false;
  std::map<std::string, std::string> files;  // file name -> content
};

const std::vector<std::string>& experiment_names();

// Validates cfg against the experiment's schema (ConfigError on failure), then
// runs it. seed, if given, replaces run.seed.
ExperimentResult run_experiment(const std::string& name, Config cfg,
                                std::optional<std::uint64_t> seed = std::nullopt,
                                Exec exec = Exec::parallel);

// Writes <name>.json and the raw tables into dir.
void write_outputs(const ExperimentResult& r, const std::filesystem::path& dir);

}  // namespace regrecon
