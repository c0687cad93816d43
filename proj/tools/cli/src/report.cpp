#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fpp/cli/commands.hpp"
#include "fpp/errors.hpp"

namespace fpp::cli {

namespace {

using nlohmann::json;

std::string g(const json& v) {
  if (v.is_null()) return "n/a";
  if (v.is_boolean()) return v.get<bool>() ? "yes" : "no";
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_number()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v.get<double>());
    return buf;
  }
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

std::string ci(const json& v) {
  if (!v.is_array() || v.size() != 2) return "n/a";
  return "[" + g(v[0]) + ", " + g(v[1]) + "]";
}

const json& at(const json& j, const char* key) {
  static const json null_value;
  return j.contains(key) ? j.at(key) : null_value;
}

json load(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot read " + p.string());
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + p.string() + ": " + e.what());
  }
}

struct Doc {
  std::string name;
  json body;
};

}  // namespace

std::string build_report(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw ConfigError("'" + dir.string() + "' is not a directory");
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(dir)) {
    const auto name = e.path().filename().string();
    if (e.is_regular_file() && (name == "summary.json" || name == "martingale.json")) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ConfigError("no summary.json or martingale.json under '" + dir.string() + "'");

  std::vector<Doc> summaries, martingales;
  for (const auto& f : files) {
    json j = load(f);
    const std::string rel = std::filesystem::relative(f, dir).string();
    if (f.filename() == "summary.json") {
      if (!j.is_object() || !j.contains("ensembles") || !j["ensembles"].is_array()) {
        throw ConfigError("malformed summary in " + f.string() + ": missing 'ensembles'");
      }
      summaries.push_back({rel, std::move(j)});
    } else {
      if (!j.is_object() || !j.contains("per_k")) {
        throw ConfigError("malformed martingale summary in " + f.string() + ": missing 'per_k'");
      }
      martingales.push_back({rel, std::move(j)});
    }
  }

  std::ostringstream os;
  os << "# Experiment report\n\n";
  os << "Source directory: `" << dir.string() << "`\n\n";

  if (!summaries.empty()) {
    bool zero_variance = true;
    for (const auto& d : summaries)
      for (const auto& e : d.body["ensembles"]) zero_variance = zero_variance && at(e, "var") == json(0.0);
    os << "## Ensembles" << (zero_variance ? " (zero variance)" : "") << "\n\n";
    os << "| file | quantity | distribution | n | N | mean | var | std error |\n";
    os << "|---|---|---|---|---|---|---|---|\n";
    for (const auto& d : summaries) {
      const json& cfg = at(d.body, "config");
      for (const auto& e : d.body["ensembles"]) {
        os << "| " << d.name << " | " << g(at(e, "quantity")) << " | " << g(at(cfg, "dist")) << " | " << g(at(e, "n"))
           << " | " << g(at(e, "N")) << " | " << g(at(e, "mean")) << " | " << g(at(e, "var")) << " | "
           << g(at(e, "std_error")) << " |\n";
      }
    }
    os << "\n## Variance scaling\n\n";
    os << "| file | gamma | 95% CI | c | R^2 | upper limit < 1 | notes |\n|---|---|---|---|---|---|---|\n";
    for (const auto& d : summaries) {
      const json& f = at(d.body, "variance_scaling");
      if (f.is_null()) {
        os << "| " << d.name << " | n/a | n/a | n/a | n/a | n/a | fewer than three n values |\n";
        continue;
      }
      if (at(f, "degenerate") == json(true)) {
        os << "| " << d.name << " | n/a | n/a | n/a | n/a | n/a | zero variance |\n";
        continue;
      }
      std::string notes;
      for (const auto& s : at(f, "notes")) notes += (notes.empty() ? "" : "; ") + s.get<std::string>();
      os << "| " << d.name << " | " << g(f["params"]["gamma"]) << " | " << ci(f["ci"]["gamma"]) << " | "
         << g(f["params"]["c"]) << " | " << g(at(f, "r2")) << " | " << g(at(f, "consistent")) << " | " << notes
         << " |\n";
    }
    os << "\n## Moment growth\n\n";
    os << "| file | m | slope | 95% CI | envelope | within envelope |\n|---|---|---|---|---|---|\n";
    for (const auto& d : summaries) {
      for (const auto& f : at(d.body, "moment_growth")) {
        if (at(f, "degenerate") == json(true)) {
          os << "| " << d.name << " | n/a | n/a | n/a | n/a | zero moment |\n";
          continue;
        }
        os << "| " << d.name << " | " << g(f["params"]["m"]) << " | " << g(f["params"]["slope"]) << " | "
           << ci(f["ci"]["slope"]) << " | " << g(f["params"]["envelope"]) << " | " << g(at(f, "consistent"))
           << " |\n";
      }
    }
    os << "\n## Time constant\n\n";
    os << "| file | mu upper | allowance | mu hat | n mu_hat <= mean | gap >= -3 se | trend ok | c | R^2 |\n";
    os << "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& d : summaries) {
      const json& t = at(d.body, "time_constant");
      if (t.is_null()) {
        os << "| " << d.name << " | n/a | n/a | n/a | n/a | n/a | n/a | n/a | fewer than four n values |\n";
        continue;
      }
      os << "| " << d.name << " | " << g(t["mu_upper"]) << " | " << g(t["allowance"]) << " | " << g(t["mu_hat"])
         << " | " << g(t["lower_bound_exact"]) << " | " << g(t["gap_nonnegative"]) << " | " << g(t["trend_ok"])
         << " | " << g(t["shape"]["c"]) << " | " << g(t["shape"]["r2"]) << " |\n";
    }
    os << "\n## Tau-equality rates\n\n";
    bool any = false;
    for (const auto& d : summaries) {
      for (const auto& e : d.body["ensembles"]) {
        if (!e.contains("tau_mismatch")) continue;
        if (!any) os << "| file | n | N | mismatches | rate | Wilson 95% |\n|---|---|---|---|---|---|\n";
        any = true;
        const json& m = e["tau_mismatch"];
        os << "| " << d.name << " | " << g(at(e, "n")) << " | " << g(m["N"]) << " | " << g(m["events"]) << " | "
           << g(m["rate"]) << " | " << ci(m["ci"]) << " |\n";
      }
    }
    if (!any) os << "No T_box ensembles found.\n";
  }

  os << "\n## Martingale differences\n\n";
  if (martingales.empty()) {
    os << "No martingale.json found.\n";
  } else {
    os << "| file | n | N | R | max abs difference | max shape constant | telescoping residual | collapse max | "
          "k within 3 se |\n";
    os << "|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& d : martingales) {
      double shape = 0.0;
      for (const auto& s : at(d.body, "shape_constant")) shape = std::max(shape, s.get<double>());
      std::size_t within = 0, total = 0;
      for (const auto& k : d.body["per_k"]) {
        ++total;
        within += at(k, "within_3se") == json(true) ? 1 : 0;
      }
      os << "| " << d.name << " | " << g(at(d.body, "n")) << " | " << g(at(d.body, "N")) << " | "
         << g(at(d.body, "R")) << " | " << g(at(d.body, "max_abs_difference")) << " | " << g(json(shape)) << " | "
         << g(at(d.body, "max_telescoping_residual")) << " | " << g(at(at(d.body, "collapse"), "max_abs")) << " | "
         << within << "/" << total << " |\n";
    }
  }
  return os.str();
}

}  // namespace fpp::cli
