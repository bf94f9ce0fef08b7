#include "vmeme/workspace.hpp"

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "vmeme/util.hpp"

namespace vmeme {

namespace fs = std::filesystem;

const std::vector<std::pair<std::string, std::string>>& Config::defaults() {
  static const std::vector<std::pair<std::string, std::string>> d{
      {"seed", "1"},
      {"threads", "0"},
      {"manifest", ""},
      {"vocab_cap", "2000"},
      {"shot_threshold", "0.5"},
      {"blank_entropy", "1.0"},
      {"border_var", "25"},
      {"clip_limit", "2.0"},
      {"tiles", "8"},
      {"index", "auto"},
      {"budget", "0"},
      {"trees", "4"},
      {"branching", "16"},
      {"tau", "11.5"},
      {"knn", "50"},
      {"labels", ""},
      {"tau_grid", "1,2,3,4,5,6,7,8,9,10,11.5,13,15,18,22,27,33"},
      {"eta", "0.7654"},
      {"weight_variant", "star"},
      {"topics_k", "50"},
      {"meme_vocab", "2000"},
      {"lda_iters", "50"},
      {"lda_tol", "1e-5"},
      {"delta_days", "1"},
      {"min_volume", "4"},
      {"splits", "5"},
      {"min_corr", "0.03"},
      {"targets", "volume,life"},
      {"feature_sets", "volume-d1,connectivity,influence,net-all,txt,txt+vmeme,net+txt+vmeme"},
      {"zipf_min_count", "10"},
      {"timeline_top", "10"},
  };
  return d;
}

Config::Config() {
  for (const auto& [k, v] : defaults()) values_[k] = v;
}

void Config::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw InvalidArgument("unknown configuration key '" + key + "'");
  it->second = value;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void Config::load_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty() || line.front() == '[') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(n, "expected key = value");
    std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    try {
      set(key, value);
    } catch (const InvalidArgument& e) {
      throw ParseError(n, e.what());
    }
  }
}

void Config::load_file(const std::string& path) { load_string(read_text_file(path)); }

const std::string& Config::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw InvalidArgument("unknown configuration key '" + key + "'");
  return it->second;
}

double Config::number(const std::string& key) const {
  const auto& v = get(key);
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw InvalidArgument("configuration key '" + key + "' expects a number, got '" + v + "'");
  }
}

long Config::integer(const std::string& key) const {
  const double d = number(key);
  if (d != static_cast<double>(static_cast<long>(d)))
    throw InvalidArgument("configuration key '" + key + "' expects an integer");
  return static_cast<long>(d);
}

std::vector<std::string> Config::list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ','))
    if (!trim(item).empty()) out.push_back(trim(item));
  return out;
}

std::vector<double> Config::numbers(const std::string& key) const {
  std::vector<double> out;
  for (const auto& s : list(key)) {
    try {
      out.push_back(std::stod(s));
    } catch (const std::exception&) {
      throw InvalidArgument("configuration key '" + key + "' has a non-numeric entry '" + s + "'");
    }
  }
  return out;
}

std::string Config::to_toml() const {
  std::ostringstream out;
  for (const auto& [k, v] : defaults()) out << k << " = \"" << values_.at(k) << "\"\n";
  return out.str();
}

nlohmann::json Config::subset(const std::vector<std::string>& keys) const {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& k : keys) j[k] = get(k);
  return j;
}

Workspace::Workspace(std::string root) : root_(std::move(root)) {
  if (root_.empty()) throw InvalidArgument("workspace root is empty");
  fs::create_directories(root_);
}

std::string Workspace::resolve_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("VMEME_WORKSPACE"); env && *env) return env;
  throw InvalidArgument("no workspace: pass --workspace or set VMEME_WORKSPACE");
}

std::string Workspace::dir(const std::string& stage) const {
  const auto d = fs::path(root_) / stage;
  fs::create_directories(d);
  return d.string();
}

std::string Workspace::path(const std::string& stage, const std::string& file) const {
  return (fs::path(dir(stage)) / file).string();
}

std::optional<StageRecord> Workspace::record(const std::string& stage) const {
  const auto p = fs::path(root_) / stage / "stage.json";
  if (!fs::exists(p)) return std::nullopt;
  const auto j = nlohmann::json::parse(read_text_file(p.string()));
  StageRecord r;
  r.stage = j.at("stage").get<std::string>();
  r.key = j.at("key").get<std::string>();
  r.config = j.value("config", nlohmann::json::object());
  r.upstream = j.value("upstream", std::map<std::string, std::string>{});
  return r;
}

void Workspace::write_record(const StageRecord& r) const {
  nlohmann::json j{{"stage", r.stage}, {"key", r.key}, {"config", r.config}, {"upstream", r.upstream}};
  write_text_file(path(r.stage, "stage.json"), j.dump(1) + "\n");
}

void Workspace::clear_record(const std::string& stage) const {
  std::error_code ec;
  fs::remove(fs::path(root_) / stage / "stage.json", ec);
}

}  // namespace vmeme
