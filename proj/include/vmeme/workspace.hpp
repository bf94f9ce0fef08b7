#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace vmeme {

// Flat key = value configuration. Every key has a default; unknown keys are
// rejected so typos do not silently fall back to defaults.
class Config {
 public:
  Config();

  void set(const std::string& key, const std::string& value);
  // "key = value" lines; '#' comments, blank lines and [section] headers are
  // ignored; values may be quoted.
  void load_file(const std::string& path);
  void load_string(const std::string& text);

  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  long integer(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;  // comma separated
  std::vector<double> numbers(const std::string& key) const;

  std::string to_toml() const;
  nlohmann::json subset(const std::vector<std::string>& keys) const;

  static const std::vector<std::pair<std::string, std::string>>& defaults();

 private:
  std::map<std::string, std::string> values_;
};

struct StageRecord {
  std::string stage;
  std::string key;
  nlohmann::json config;
  std::map<std::string, std::string> upstream;
};

// On-disk layout: one directory per stage holding its outputs and a
// stage.json describing what it was built from.
class Workspace {
 public:
  explicit Workspace(std::string root);

  // Flag value if given, else $VMEME_WORKSPACE, else an error.
  static std::string resolve_root(const std::string& flag);

  const std::string& root() const { return root_; }
  std::string dir(const std::string& stage) const;  // created on demand
  std::string path(const std::string& stage, const std::string& file) const;

  std::optional<StageRecord> record(const std::string& stage) const;
  void write_record(const StageRecord& record) const;
  void clear_record(const std::string& stage) const;

  std::string config_path() const { return root_ + "/config.toml"; }

 private:
  std::string root_;
};

}  // namespace vmeme
