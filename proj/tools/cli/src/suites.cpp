#include "fpp/cli/suites.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "fpp/clusters.hpp"
#include "fpp/errors.hpp"
#include "fpp/parallel.hpp"

namespace fpp::cli {

namespace {

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Skip;
  std::string detail;
};

Outcome pass() { return {Status::Pass, {}}; }
Outcome skip(std::string why = {}) { return {Status::Skip, std::move(why)}; }
Outcome check(bool ok, std::string detail = {}) { return {ok ? Status::Pass : Status::Fail, std::move(detail)}; }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

struct Context {
  const ExperimentConfig& cfg;
  DistributionSpec dist;
  long n;
  std::uint64_t seed;
};

using Runner = std::function<std::vector<Outcome>(const Context&)>;

struct Suite {
  std::vector<std::string> checks;
  Runner run;
};

constexpr std::uint32_t kPickTag = 0x5049434b;
constexpr int kEndless = 1 << 20;

std::uint64_t pick(std::uint64_t seed, std::uint64_t a, std::uint64_t range) {
  return derive_seed(seed, kPickTag, a) % range;
}

struct BoxSetup {
  Region window;
  BoxPair boxes;
  WeightField field;
  TauParams tau;
};

BoxSetup box_setup(const Context& c) {
  const BoxGeometry g = c.cfg.geometry(c.n);
  Region w = g.window(c.cfg.max_vertices);
  BoxPair b = g.boxes(w);
  WeightField f = sample_configuration(w, c.dist, c.seed);
  return {std::move(w), std::move(b), std::move(f), c.cfg.tau(c.n)};
}

std::vector<Outcome> run_lemma1(const Context& c) {
  const BoxSetup s = box_setup(c);
  const Region& r = s.window;
  const ClusterReport rep = open_ld_clusters(s.field, c.cfg.M);
  std::vector<std::int32_t> eligible;
  for (std::size_t l = 0; l < rep.num_clusters(); ++l) {
    const VertexSet a = rep.members(static_cast<std::int32_t>(l));
    bool inner = true;
    for (VertexId v : a.members()) inner = inner && r.face_margin(v) >= 2;
    if (inner) eligible.push_back(static_cast<std::int32_t>(l));
  }
  if (eligible.empty()) return {skip("no open cluster"), skip("no open cluster")};
  const VertexSet a = rep.members(eligible[pick(c.seed, 0, eligible.size())]);
  const auto delta = exterior_boundary(a).members();
  const VertexId x = delta[pick(c.seed, 1, delta.size())];
  const VertexId y = delta[pick(c.seed, 2, delta.size())];
  std::vector<VertexId> path;
  try {
    path = lemma1_bypass(a, s.field, c.cfg.M, x, y);
  } catch (const WindowTooSmallError& e) {
    return {check(false, e.what()), check(false, e.what())};
  }
  const double bound = std::pow(3.0, r.dim()) * static_cast<double>(a.size());
  const double len = static_cast<double>(path.size() - 1);
  const double mx = path_max_edge(s.field, path);
  return {check(len <= bound, "length " + fmt(len) + " > " + fmt(bound)),
          check(mx <= c.cfg.M, "max edge " + fmt(mx))};
}

struct BallSetup {
  BoxSetup box;
  TauField tf;
  BallSequence seq;
};

BallSetup ball_setup(const Context& c) {
  BoxSetup s = box_setup(c);
  TauField tf = tau_transform(s.field, s.tau);
  BallSequence seq = ball_growth(tf, s.boxes.source, s.boxes.target, kEndless);
  return {std::move(s), std::move(tf), std::move(seq)};
}

std::vector<Outcome> run_lemma2(const Context& c) {
  const BallSetup b = ball_setup(c);
  if (b.seq.status() != BallStatus::Hit) return {skip("window truncated"), skip("window truncated")};
  const int ks = *b.seq.k_star();
  if (ks == 0) return {skip("k* = 0"), skip("k* = 0")};
  Outcome id = pass(), vb = pass();
  for (int k = 0; k < ks; ++k) {
    const Lemma2Check l = verify_lemma2(b.seq, b.tf, b.box.boxes.target, k);
    if (l.skipped) continue;
    if (!l.identity && id.status == Status::Pass) {
      id = check(false, "k = " + std::to_string(k) + " residual " + fmt(l.residual));
    }
    if (!l.vertex_bounds && vb.status == Status::Pass) vb = check(false, "k = " + std::to_string(k));
  }
  return {id, vb};
}

Outcome bound_outcome(const BoundCheck& b) {
  if (b.skipped) return skip();
  return check(b.holds, fmt(b.value) + " > " + fmt(b.bound));
}

std::vector<Outcome> run_lemma3(const Context& c) {
  const BoxSetup s = box_setup(c);
  const TauField tf = tau_transform(s.field, s.tau);
  return {bound_outcome(verify_lemma3(tf, passage_time(tf, s.boxes.source, s.boxes.target)))};
}

std::vector<Outcome> run_lemma5(const Context& c) {
  const BallSetup b = ball_setup(c);
  if (b.seq.status() == BallStatus::WindowTruncated) return {skip("window truncated")};
  return {bound_outcome(verify_lemma5(b.seq, b.box.tau.threshold()))};
}

std::vector<Outcome> run_lemma7(const Context& c) {
  const BallSetup b = ball_setup(c);
  if (b.seq.status() != BallStatus::Hit) return {skip("window truncated")};
  return {bound_outcome(verify_lemma7(b.seq, b.tf, b.box.boxes.target, *b.seq.k_star()))};
}

std::vector<Outcome> run_ball_invariants(const Context& c) {
  const BallSetup b = ball_setup(c);
  if (b.seq.status() == BallStatus::WindowTruncated) {
    return std::vector<Outcome>(5, skip("window truncated"));
  }
  const BallInvariants inv = check_ball_invariants(b.seq);
  return {check(inv.nested), check(inv.contains_source), check(inv.connected), check(inv.inside_le_k),
          check(inv.outside_gt_k)};
}

std::vector<Outcome> run_sandwich(const Context& c) {
  const BoxSetup s = box_setup(c);
  const SandwichCheck sc = sandwich_check(s.field, s.boxes, c.n);
  return {check(sc.lower, fmt(sc.box_time) + " > " + fmt(sc.point_time)),
          check(sc.upper, fmt(sc.point_time) + " > " + fmt(sc.box_time) + " + " + fmt(sc.box_weight))};
}

std::vector<Outcome> run_crossing(const Context& c) {
  const int margin = c.cfg.verify_margin(c.n);
  const Region r = line_window(c.cfg.dim, 4 * c.n, margin, margin, c.cfg.max_vertices);
  const WeightField f = sample_configuration(r, c.dist, c.seed);
  const int h = face_cube_half_width(c.n, c.cfg.delta);
  const CrossingCheck cc = crossing_check(f, c.n, h);
  const double a = a_0n(f, c.n).time;
  const double b = b_0n(f, c.n).time;
  const double s = s_0n(f, c.n, h).time;
  return {check(cc.holds, fmt(cc.phi_sum) + " > " + fmt(cc.s)), check(b <= a + 1e-9, fmt(b) + " > " + fmt(a)),
          check(s <= a + 1e-9, fmt(s) + " > " + fmt(a))};
}

std::vector<Outcome> run_tau_locality(const Context& c) {
  const TauParams p = c.cfg.tau(c.n);
  const double theta = p.threshold();
  const int half = static_cast<int>(std::ceil(std::max(theta, locality_radius(theta, c.cfg.dim)))) + 4;
  const Region r = Region::cube(c.cfg.dim, half);
  const WeightField f = sample_configuration(r, c.dist, c.seed);
  Coord at{};
  const int axis = static_cast<int>(pick(c.seed, 0, static_cast<std::uint64_t>(c.cfg.dim)));
  const EdgeId e = r.edge_index(r.index(at), axis);
  const LocalityResult res = tau_locality_check(f, e, p, theta);
  return {check(res.holds, "tau changed in round " + std::to_string(res.first_change))};
}

const std::map<std::string, Suite>& suites() {
  static const std::map<std::string, Suite> table{
      {"lemma1", {{"bypass_length", "bypass_max_edge"}, run_lemma1}},
      {"lemma2", {{"identity", "vertex_bounds"}, run_lemma2}},
      {"lemma3", {{"max_tau_on_path"}, run_lemma3}},
      {"lemma5", {{"cube_containment"}, run_lemma5}},
      {"lemma7", {{"path_in_ball"}, run_lemma7}},
      {"ball_invariants", {{"nested", "contains_source", "connected", "inside_le_k", "outside_gt_k"},
                           run_ball_invariants}},
      {"sandwich", {{"lower", "upper"}, run_sandwich}},
      {"crossing", {{"crossing", "b_le_a", "s_le_a"}, run_crossing}},
      {"tau_locality", {{"tau_unchanged"}, run_tau_locality}},
  };
  return table;
}

constexpr std::size_t kKeptFailures = 5;

}  // namespace

std::size_t SuiteReport::failures() const {
  std::size_t f = 0;
  for (const auto& c : checks) f += c.fail;
  return f;
}

bool SuiteReport::all_skipped() const {
  for (const auto& c : checks) {
    if (c.pass > 0 || c.fail > 0) return false;
  }
  return true;
}

const CheckTally& SuiteReport::check(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return c;
  }
  throw DomainError("suite " + suite + " has no check named " + std::string(name));
}

std::string SuiteReport::text() const {
  std::ostringstream os;
  os << "suite " << suite << ": " << configurations << " configurations, n =";
  for (std::size_t i = 0; i < n.size(); ++i) os << (i ? "," : " ") << n[i];
  os << "\n";
  for (const auto& c : checks) {
    const std::size_t ran = c.pass + c.fail;
    os << "  " << c.name << ": " << c.pass << "/" << ran << " pass";
    if (c.skip > 0) os << ", " << c.skip << " skipped";
    os << "\n";
    for (const auto& f : c.failures) os << "    FAIL " << f << "\n";
  }
  if (all_skipped()) {
    os << "result: ALL SKIPPED (preconditions never held)\n";
  } else {
    os << "result: " << (passed() ? "PASS" : "FAIL") << "\n";
  }
  return os.str();
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : suites()) k.push_back(name);
    return k;
  }();
  return names;
}

SuiteReport verify_suite(std::string_view name, const ExperimentConfig& cfg) {
  const auto it = suites().find(std::string(name));
  if (it == suites().end()) {
    std::string known;
    for (const auto& s : suite_names()) known += (known.empty() ? "" : ", ") + s;
    throw ConfigError("unknown suite '" + std::string(name) + "' (known: " + known + ")");
  }
  cfg.validate();
  const Suite& suite = it->second;
  const DistributionSpec dist = cfg.distribution();
  const auto N = static_cast<std::size_t>(cfg.replicas);

  SuiteReport rep;
  rep.suite = std::string(name);
  rep.n = cfg.n_list;
  rep.configurations = N * cfg.n_list.size();
  for (const auto& c : suite.checks) rep.checks.push_back(CheckTally{c, 0, 0, 0, {}});

  for (long n : cfg.n_list) {
    cfg.tau(n);
    std::vector<std::vector<Outcome>> results(N);
    parallel_for(N, cfg.threads, [&](std::size_t i) {
      const Context ctx{cfg, dist, n, replica_seed(cfg.seed, n, i)};
      results[i] = suite.run(ctx);
    });
    for (std::size_t i = 0; i < N; ++i) {
      for (std::size_t j = 0; j < suite.checks.size(); ++j) {
        const Outcome& o = results[i][j];
        CheckTally& t = rep.checks[j];
        switch (o.status) {
          case Status::Pass: ++t.pass; break;
          case Status::Skip: ++t.skip; break;
          case Status::Fail:
            ++t.fail;
            if (t.failures.size() < kKeptFailures) {
              t.failures.push_back("n=" + std::to_string(n) + " replica=" + std::to_string(i) +
                                   " seed=" + std::to_string(replica_seed(cfg.seed, n, i)) + ": " + o.detail);
            }
            break;
        }
      }
    }
  }
  return rep;
}

}  // namespace fpp::cli
