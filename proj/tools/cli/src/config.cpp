#include "fpp/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <thread>

#include "fpp/errors.hpp"

namespace fpp::cli {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string s = trim(text);
  T v{};
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) {
    throw ConfigError("'" + std::string(key) + "' expects a number, got '" + s + "'");
  }
  return v;
}

std::vector<long> parse_list(std::string_view key, std::string_view text) {
  std::vector<long> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto piece = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    out.push_back(parse_number<long>(key, piece));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

using Setter = std::function<void(ExperimentConfig&, std::string_view, std::string_view)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table{
      {"dim", [](auto& c, auto k, auto v) { c.dim = parse_number<int>(k, v); }},
      {"n", [](auto& c, auto k, auto v) { c.n_list = parse_list(k, v); }},
      {"quantity", [](auto& c, auto, auto v) { c.quantity = trim(v); }},
      {"dist", [](auto& c, auto, auto v) { c.dist = trim(v); }},
      {"epsilon", [](auto& c, auto k, auto v) { c.epsilon = parse_number<double>(k, v); }},
      {"M", [](auto& c, auto k, auto v) { c.M = parse_number<double>(k, v); }},
      {"delta", [](auto& c, auto k, auto v) { c.delta = parse_number<double>(k, v); }},
      {"transverse", [](auto& c, auto k, auto v) { c.transverse = parse_number<int>(k, v); }},
      {"pad_factor", [](auto& c, auto k, auto v) { c.pad_factor = parse_number<double>(k, v); }},
      {"box_half_width", [](auto& c, auto k, auto v) { c.box_half_width = parse_number<int>(k, v); }},
      {"replicas", [](auto& c, auto k, auto v) { c.replicas = parse_number<long>(k, v); }},
      {"inner_replicas", [](auto& c, auto k, auto v) { c.inner_replicas = parse_number<int>(k, v); }},
      {"k_max", [](auto& c, auto k, auto v) { c.k_max = parse_number<int>(k, v); }},
      {"seed", [](auto& c, auto k, auto v) { c.seed = parse_number<std::uint64_t>(k, v); }},
      {"threads", [](auto& c, auto k, auto v) { c.threads = parse_number<unsigned>(k, v); }},
      {"out", [](auto& c, auto, auto v) { c.out = trim(v); }},
      {"max_vertices", [](auto& c, auto k, auto v) { c.max_vertices = parse_number<std::size_t>(k, v); }},
  };
  return table;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

void apply_setting(ExperimentConfig& cfg, std::string_view key, std::string_view value) {
  std::string k(key);
  std::replace(k.begin(), k.end(), '-', '_');
  const auto it = setters().find(k);
  if (it == setters().end()) throw ConfigError("unknown setting '" + std::string(key) + "'");
  it->second(cfg, k, value);
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": expected 'key = value'");
    }
    try {
      apply_setting(cfg, trim(std::string_view(line).substr(0, eq)), std::string_view(line).substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

unsigned default_threads() {
  if (const char* env = std::getenv("FPP_THREADS"); env != nullptr && *env != '\0') {
    const unsigned t = parse_number<unsigned>("FPP_THREADS", env);
    if (t == 0) throw ConfigError("FPP_THREADS must be at least 1");
    return t;
  }
  return std::max(1U, std::thread::hardware_concurrency());
}

void ExperimentConfig::validate() const {
  if (dim < 1 || dim > 4) throw ConfigError("dim must be between 1 and 4, got " + std::to_string(dim));
  if (n_list.empty()) throw ConfigError("n needs at least one value");
  for (long n : n_list) {
    if (n < 2) throw ConfigError("every n must be at least 2, got " + std::to_string(n));
  }
  if (!(epsilon > 0.0)) throw ConfigError("epsilon must be positive");
  if (!(epsilon < M)) throw ConfigError("epsilon must be smaller than M");
  if (!(delta > 0.0 && delta < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  if (transverse < -1) throw ConfigError("transverse must be nonnegative (or -1 for the default)");
  if (!(pad_factor >= 0.0) || !std::isfinite(pad_factor)) throw ConfigError("pad_factor must be nonnegative");
  if (box_half_width < 0) throw ConfigError("box_half_width must be nonnegative");
  if (replicas < 1) throw ConfigError("replicas must be at least 1");
  if (inner_replicas < 2) throw ConfigError("inner_replicas must be at least 2");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (out.empty()) throw ConfigError("out must name a directory");
  parsed_quantity();
  distribution();
}

DistributionSpec ExperimentConfig::distribution() const { return DistributionSpec::parse(dist); }

Quantity ExperimentConfig::parsed_quantity() const { return parse_quantity(quantity); }

TauParams ExperimentConfig::tau(long n) const {
  TauParams p;
  p.epsilon = epsilon;
  p.M = M;
  p.n = n;
  p.delta = delta;
  p.validate();
  return p;
}

EnsembleParams ExperimentConfig::ensemble() const {
  EnsembleParams p;
  p.dim = dim;
  p.tau = tau(n_list.front());
  p.transverse = transverse;
  p.pad_factor = pad_factor;
  p.box_half_width = box_half_width;
  p.max_vertices = max_vertices;
  p.threads = threads;
  return p;
}

int ExperimentConfig::verify_margin(long n) const {
  if (transverse >= 0) return transverse;
  return std::max(64, static_cast<int>(2 * n));
}

BoxGeometry ExperimentConfig::geometry(long n) const {
  BoxGeometry g;
  g.dim = dim;
  g.n = n;
  g.half_width = box_half_width;
  g.pad = verify_margin(n);
  g.transverse = verify_margin(n);
  return g;
}

nlohmann::json ExperimentConfig::to_json() const {
  return nlohmann::json{{"dim", dim},
                        {"n", n_list},
                        {"quantity", quantity},
                        {"dist", dist},
                        {"epsilon", epsilon},
                        {"M", M},
                        {"delta", delta},
                        {"transverse", transverse},
                        {"pad_factor", pad_factor},
                        {"box_half_width", box_half_width},
                        {"replicas", replicas},
                        {"inner_replicas", inner_replicas},
                        {"k_max", k_max},
                        {"seed", seed},
                        {"max_vertices", max_vertices}};
}

}  // namespace fpp::cli
