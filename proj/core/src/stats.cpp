#include "fpp/stats.hpp"

#include <algorithm>
#include <cmath>

#include "fpp/errors.hpp"
#include "fpp/parallel.hpp"

namespace fpp {

namespace {

constexpr std::uint32_t kReplicaTag = 0x52455043;
constexpr std::uint32_t kCorrelationTag = 0x434f5252;
constexpr double kTimeTol = 1e-9;

}  // namespace

std::string_view to_string(Quantity q) {
  switch (q) {
    case Quantity::A0n: return "a0n";
    case Quantity::B0n: return "b0n";
    case Quantity::S0n: return "s0n";
    case Quantity::Phi: return "phi";
    case Quantity::TBox: return "T_box";
    case Quantity::TTauBox: return "T_tau_box";
  }
  return "?";
}

Quantity parse_quantity(std::string_view name) {
  for (Quantity q : {Quantity::A0n, Quantity::B0n, Quantity::S0n, Quantity::Phi, Quantity::TBox, Quantity::TTauBox}) {
    if (name == to_string(q)) return q;
  }
  throw ConfigError("unknown quantity '" + std::string(name) + "' (expected a0n, b0n, s0n, phi, T_box, T_tau_box)");
}

int EnsembleParams::transverse_for(long n) const {
  return transverse >= 0 ? transverse : static_cast<int>(4 * n);
}

int EnsembleParams::pad_for(long n) const {
  if (!(pad_factor >= 0.0)) throw ConfigError("padding factor must be nonnegative");
  return static_cast<int>(std::ceil(pad_factor * static_cast<double>(n)));
}

int EnsembleParams::box_half_width_for(long n) const {
  return box_half_width >= 0 ? box_half_width : fpp::box_half_width(dim, n, tau.M, tau.delta);
}

int EnsembleParams::face_half_width_for(long n) const {
  return face_half_width >= 0 ? face_half_width : face_cube_half_width(n, tau.delta);
}

Region EnsembleParams::window_for(long n) const {
  return line_window(dim, n, pad_for(n), transverse_for(n), max_vertices);
}

std::vector<double> ReplicaStats::values() const {
  std::vector<double> v;
  v.reserve(replicas.size());
  for (const auto& r : replicas) v.push_back(r.value);
  return v;
}

double ReplicaStats::std_error() const { return N > 0 ? std::sqrt(var / static_cast<double>(N)) : 0.0; }

std::uint64_t replica_seed(std::uint64_t master, long n, std::size_t replica) {
  return derive_seed(master, kReplicaTag, static_cast<std::uint64_t>(n), replica);
}

ReplicaStats summarize(Quantity q, long n, std::vector<Replica> replicas, int max_moment_order) {
  if (replicas.empty()) throw DomainError("cannot summarize an empty sample");
  std::sort(replicas.begin(), replicas.end(), [](const Replica& a, const Replica& b) { return a.index < b.index; });
  ReplicaStats s;
  s.quantity = q;
  s.n = n;
  s.N = replicas.size();
  std::vector<double> xs;
  xs.reserve(s.N);
  for (const auto& r : replicas) xs.push_back(r.value);
  const double N = static_cast<double>(s.N);
  s.mean = pairwise_sum(xs) / N;
  const int top = 2 * std::max(1, max_moment_order);
  std::vector<CompensatedSum> sums(top + 1);
  for (double x : xs) {
    const double dx = x - s.mean;
    double p = 1.0;
    for (int k = 0; k <= top; ++k) {
      sums[k].add(p);
      p *= dx;
    }
  }
  s.central_moments.resize(top + 1);
  for (int k = 0; k <= top; ++k) s.central_moments[k] = sums[k].value() / N;
  s.central_moments[1] = 0.0;
  for (int k = 2; k <= top; k += 2) s.central_moments[k] = std::max(0.0, s.central_moments[k]);
  s.var = s.N > 1 ? std::max(0.0, sums[2].value()) / (N - 1.0) : 0.0;
  s.replicas = std::move(replicas);
  return s;
}

Replica evaluate(Quantity q, const WeightField& field, long n, const EnsembleParams& params) {
  Replica rep;
  PathResult r;
  switch (q) {
    case Quantity::A0n: r = a_0n(field, n); break;
    case Quantity::B0n: r = b_0n(field, n); break;
    case Quantity::S0n: r = s_0n(field, n, params.face_half_width_for(n)); break;
    case Quantity::Phi: r = phi(field, 0, n); break;
    case Quantity::TBox:
    case Quantity::TTauBox: {
      const BoxPair boxes = box_pair(field.region(), n, params.box_half_width_for(n));
      TauParams tp = params.tau;
      tp.n = n;
      const TauField tf = tau_transform(field, tp);
      const PathResult rt = passage_time(tf, boxes.source, boxes.target);
      if (q == Quantity::TTauBox) {
        r = rt;
      } else {
        r = passage_time(field, boxes.source, boxes.target);
        rep.tau_mismatch = !(std::abs(r.time - rt.time) <= kTimeTol);
      }
      break;
    }
  }
  rep.value = r.time;
  rep.path_len = r.length();
  rep.max_edge = r.max_edge;
  return rep;
}

std::vector<ReplicaStats> run_ensemble(Quantity q, const std::vector<long>& n_list, std::size_t N,
                                       const DistributionSpec& dist, const EnsembleParams& params,
                                       std::uint64_t seed) {
  if (N < 2) throw ConfigError("an ensemble needs at least 2 replicas");
  if (n_list.empty()) throw ConfigError("the n list is empty");
  TauParams tp = params.tau;
  for (long n : n_list) {
    tp.n = n;
    tp.validate();
  }
  // Build every window first so capacity errors surface before any work.
  std::vector<Region> windows;
  for (long n : n_list) windows.push_back(params.window_for(n));

  std::vector<ReplicaStats> out;
  for (std::size_t j = 0; j < n_list.size(); ++j) {
    const long n = n_list[j];
    std::vector<Replica> reps(N);
    parallel_for(N, params.threads, [&](std::size_t i) {
      const std::uint64_t s = replica_seed(seed, n, i);
      const WeightField field = sample_configuration(windows[j], dist, s);
      reps[i] = evaluate(q, field, n, params);
      reps[i].index = i;
      reps[i].seed = s;
    });
    std::size_t mismatches = 0;
    for (const auto& r : reps) mismatches += r.tau_mismatch ? 1 : 0;
    ReplicaStats st = summarize(q, n, std::move(reps), params.max_moment_order);
    if (q == Quantity::TBox) {
      st.tau_mismatch = RateEstimate{n, N, mismatches, static_cast<double>(mismatches) / static_cast<double>(N),
                                     wilson_interval(mismatches, N)};
    }
    out.push_back(std::move(st));
  }
  return out;
}

std::vector<TailPoint> tail_profile(const ReplicaStats& stats, const std::vector<double>& x_grid) {
  std::vector<TailPoint> out;
  const double scale = std::sqrt(static_cast<double>(stats.n));
  for (double x : x_grid) {
    TailPoint t;
    t.x = x;
    for (const auto& r : stats.replicas) {
      if (std::abs(r.value - stats.mean) >= x * scale) ++t.count;
    }
    t.p = static_cast<double>(t.count) / static_cast<double>(stats.N);
    const Interval ci = wilson_interval(t.count, stats.N);
    t.lo = ci.lo;
    t.hi = ci.hi;
    out.push_back(t);
  }
  return out;
}

TailShape tail_shape(const std::vector<TailPoint>& tail, std::size_t N) {
  (void)N;
  TailShape s;
  std::vector<double> u, y;
  for (const auto& t : tail) {
    if (t.count >= 10) {
      u.push_back(t.x * t.x);
      y.push_back(std::log(t.p));
    }
  }
  s.points = u.size();
  if (u.size() < 2) return s;
  s.decreasing = true;
  for (std::size_t i = 1; i < y.size(); ++i) s.decreasing = s.decreasing && y[i] <= y[i - 1];
  s.decreasing = s.decreasing && y.back() < y.front();
  if (u.size() >= 3) {
    const LinearFit f = fit_line(u, y);
    s.slope = f.slope;
    s.slope_ci = f.slope_ci;
    double worst = -kUnreachable;
    for (std::size_t i = 0; i + 2 < u.size(); ++i) {
      const double a = (y[i + 1] - y[i]) / (u[i + 1] - u[i]);
      const double b = (y[i + 2] - y[i + 1]) / (u[i + 2] - u[i + 1]);
      worst = std::max(worst, b - a);
    }
    s.max_second_difference = worst;
  } else {
    s.slope = (y[1] - y[0]) / (u[1] - u[0]);
    s.slope_ci = {s.slope, s.slope};
  }
  return s;
}

namespace {

void require_distinct_n(const std::vector<ReplicaStats>& stats, std::size_t at_least) {
  std::vector<long> ns;
  for (const auto& s : stats) ns.push_back(s.n);
  std::sort(ns.begin(), ns.end());
  if (std::unique(ns.begin(), ns.end()) - ns.begin() < static_cast<long>(at_least)) {
    throw DomainError("fit needs at least " + std::to_string(at_least) + " distinct n values");
  }
}

}  // namespace

FitReport variance_scaling(const std::vector<ReplicaStats>& stats) {
  require_distinct_n(stats, 3);
  FitReport f;
  f.model = "power_law";
  for (const auto& s : stats) {
    if (!(s.var > 0.0)) {
      f.degenerate = true;
      f.notes.push_back("zero variance at n = " + std::to_string(s.n));
    }
  }
  if (f.degenerate) return f;
  for (const auto& s : stats) {
    f.x.push_back(std::log(static_cast<double>(s.n)));
    f.y.push_back(std::log(s.var));
  }
  const LinearFit lf = fit_line(f.x, f.y);
  f.params["gamma"] = lf.slope;
  f.params["c"] = std::exp(lf.intercept);
  f.ci["gamma"] = lf.slope_ci;
  f.ci["log_c"] = lf.intercept_ci;
  f.residuals = lf.residuals;
  f.r2 = lf.r2;
  f.consistent = lf.slope_ci.hi < 1.0;
  const bool two_thirds = lf.slope_ci.lo <= 2.0 / 3.0 && 2.0 / 3.0 <= lf.slope_ci.hi;
  f.notes.push_back(std::string("exponent 2/3 ") + (two_thirds ? "inside" : "outside") + " the 95% interval");
  return f;
}

FitReport moment_growth(const std::vector<ReplicaStats>& stats, int m) {
  if (m < 1) throw DomainError("moment order m must be at least 1");
  require_distinct_n(stats, 3);
  FitReport f;
  f.model = "moment_growth";
  long n_max = 0;
  for (const auto& s : stats) {
    if (s.central_moments.size() <= static_cast<std::size_t>(2 * m)) {
      throw DomainError("central moment of order " + std::to_string(2 * m) + " was not recorded");
    }
    if (!(s.central_moments[2 * m] > 0.0)) {
      f.degenerate = true;
      f.notes.push_back("zero moment at n = " + std::to_string(s.n));
    }
    n_max = std::max(n_max, s.n);
  }
  const double wanted = 500.0 * std::pow(4.0, m);
  for (const auto& s : stats) {
    if (static_cast<double>(s.N) < wanted) {
      f.notes.push_back("N = " + std::to_string(s.N) + " at n = " + std::to_string(s.n) + " is below " +
                        std::to_string(static_cast<long>(wanted)) + "; order " + std::to_string(2 * m) +
                        " moment is noisy");
    }
  }
  if (f.degenerate) return f;
  for (const auto& s : stats) {
    f.x.push_back(std::log(static_cast<double>(s.n)));
    f.y.push_back(std::log(s.central_moments[2 * m]));
  }
  const LinearFit lf = fit_line(f.x, f.y);
  const double ln = std::log(static_cast<double>(n_max));
  const double envelope = m + 10.0 * m * std::log(ln) / ln;
  f.params["slope"] = lf.slope;
  f.params["intercept"] = lf.intercept;
  f.params["envelope"] = envelope;
  f.params["m"] = m;
  f.ci["slope"] = lf.slope_ci;
  f.residuals = lf.residuals;
  f.r2 = lf.r2;
  f.consistent = lf.slope_ci.lo <= envelope;
  return f;
}

TimeConstantReport time_constant(const std::vector<ReplicaStats>& point_stats,
                                 const std::vector<ReplicaStats>& face_stats) {
  require_distinct_n(point_stats, 4);
  std::vector<ReplicaStats> pts = point_stats;
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.n < b.n; });
  TimeConstantReport r;
  r.mu_upper = kUnreachable;
  for (const auto& s : pts) {
    r.n.push_back(s.n);
    r.mean.push_back(s.mean);
    r.std_error.push_back(s.std_error());
    r.mu_upper = std::min(r.mu_upper, s.mean / static_cast<double>(s.n));
  }
  double lower = -kUnreachable;
  for (const auto& s : face_stats) lower = std::max(lower, s.mean / static_cast<double>(s.n));
  r.allowance = face_stats.empty() ? 0.0 : std::max(0.0, r.mu_upper - lower);
  r.mu_hat = std::max(0.0, r.mu_upper - r.allowance);

  r.lower_bound_exact = true;
  r.gap_nonnegative = true;
  std::vector<double> xs, shape_x;
  for (std::size_t i = 0; i < r.n.size(); ++i) {
    const double n = static_cast<double>(r.n[i]);
    const double g = r.mean[i] - n * r.mu_hat;
    r.gap.push_back(g);
    r.lower_bound_exact = r.lower_bound_exact && n * r.mu_hat <= r.mean[i];
    r.gap_nonnegative = r.gap_nonnegative && g >= -3.0 * r.std_error[i];
    xs.push_back(n);
    shape_x.push_back(std::sqrt(n) * std::pow(std::log(n), 4));
    if (i > 0) {
      const double prev = r.mean[i - 1] / static_cast<double>(r.n[i - 1]);
      const double cur = r.mean[i] / n;
      const double se = std::hypot(r.std_error[i - 1] / static_cast<double>(r.n[i - 1]), r.std_error[i] / n);
      if (cur > prev + 3.0 * se) {
        r.warnings.push_back("mean/n increases between n = " + std::to_string(r.n[i - 1]) + " and n = " +
                             std::to_string(r.n[i]));
      }
    }
  }
  // Upper limit of a 90% two-sided interval is the one-sided 95% limit.
  r.trend = fit_line(xs, r.gap, 0.90);
  r.trend_ok = r.trend.slope_ci.hi >= 0.0;
  r.shape = fit_proportional(shape_x, r.gap);
  return r;
}

RateEstimate tau_equality_rate(const DistributionSpec& dist, const EnsembleParams& params, long n, std::size_t N,
                               std::uint64_t seed) {
  const auto stats = run_ensemble(Quantity::TBox, {n}, N, dist, params, seed);
  return *stats.front().tau_mismatch;
}

CorrelationReport distant_tau_correlation(const DistributionSpec& dist, const TauParams& tau, int dim,
                                          std::size_t N, std::uint64_t seed, unsigned threads) {
  tau.validate();
  if (N < 2) throw DomainError("correlation needs at least 2 pairs");
  const double theta = tau.threshold();
  const int gap = static_cast<int>(std::floor(2.0 * theta)) + 1;
  const int margin = static_cast<int>(std::ceil(locality_radius(theta, dim))) + 3;
  const Region window = line_window(dim, gap + 2, margin, margin);
  const EdgeId e1 = window.edge_index(window.index(axis_point(0)), 0);
  const EdgeId e2 = window.edge_index(window.index(axis_point(gap + 1)), 0);
  std::vector<double> a(N), b(N);
  parallel_for(N, threads, [&](std::size_t i) {
    const WeightField f = sample_configuration(window, dist, derive_seed(seed, kCorrelationTag, i));
    a[i] = tau_of_edge(f, e1, tau).first;
    b[i] = tau_of_edge(f, e2, tau).first;
  });
  CorrelationReport c;
  c.N = N;
  c.separation = edge_distance(window, e1, e2);
  c.rho = pearson(a, b);
  c.bound = 3.0 / std::sqrt(static_cast<double>(N));
  c.within = std::abs(c.rho) < c.bound;
  return c;
}

}  // namespace fpp
