#include "fpp/weights.hpp"

#include <sodium.h>

#include <charconv>
#include <cmath>
#include <cstring>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>

#include "fpp/errors.hpp"

namespace fpp {

namespace {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialisation failed");
  });
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

std::array<unsigned char, crypto_shorthash_KEYBYTES> make_key(std::uint64_t seed) {
  static_assert(crypto_shorthash_KEYBYTES == 16);
  std::array<unsigned char, crypto_shorthash_KEYBYTES> key{};
  for (int i = 0; i < 8; ++i) key[i] = static_cast<unsigned char>(seed >> (8 * i));
  // Fixed domain tag in the upper half of the key.
  constexpr std::uint64_t tag = 0x6670702d77656967ULL;
  for (int i = 0; i < 8; ++i) key[8 + i] = static_cast<unsigned char>(tag >> (8 * i));
  return key;
}

std::uint64_t siphash(const std::array<unsigned char, 16>& key, std::span<const std::int32_t> words) {
  unsigned char msg[64];
  const std::size_t len = words.size() * 4;
  if (len > sizeof msg) throw std::length_error("prf counter too long");
  for (std::size_t i = 0; i < words.size(); ++i) {
    const auto w = static_cast<std::uint32_t>(words[i]);
    for (int b = 0; b < 4; ++b) msg[4 * i + b] = static_cast<unsigned char>(w >> (8 * b));
  }
  unsigned char out[crypto_shorthash_BYTES];
  crypto_shorthash(out, msg, len, key.data());
  std::uint64_t r = 0;
  for (int i = 0; i < 8; ++i) r |= static_cast<std::uint64_t>(out[i]) << (8 * i);
  return r;
}

double to_unit_open(std::uint64_t x) noexcept {
  // 53 random bits, centred in their cell: strictly inside (0, 1).
  return (static_cast<double>(x >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace

// ---------------------------------------------------------------------------

DistributionSpec DistributionSpec::point_mass(double c) {
  require(std::isfinite(c) && c >= 0.0, "point_mass requires c >= 0");
  return {Family::PointMass, c, 0.0, 0.0};
}

DistributionSpec DistributionSpec::bernoulli(double a, double b, double p) {
  require(std::isfinite(a) && std::isfinite(b) && a >= 0.0 && a < b, "bernoulli requires 0 <= a < b");
  require(p >= 0.0 && p <= 1.0, "bernoulli requires p in [0, 1]");
  return {Family::Bernoulli, a, b, p};
}

DistributionSpec DistributionSpec::uniform(double lo, double hi) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo >= 0.0 && lo < hi, "uniform requires 0 <= lo < hi");
  return {Family::Uniform, lo, hi, 0.0};
}

DistributionSpec DistributionSpec::exponential(double rate) {
  require(std::isfinite(rate) && rate > 0.0, "exponential requires rate > 0");
  return {Family::Exponential, rate, 0.0, 0.0};
}

DistributionSpec DistributionSpec::pareto(double alpha, double scale) {
  require(std::isfinite(alpha) && alpha > 1.0, "pareto requires alpha > 1 (finite mean)");
  require(std::isfinite(scale) && scale > 0.0, "pareto requires scale > 0");
  return {Family::Pareto, alpha, scale, 0.0};
}

DistributionSpec DistributionSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string family(text.substr(0, colon));
  std::map<std::string, double, std::less<>> kv;
  if (colon != std::string_view::npos) {
    std::string_view rest = text.substr(colon + 1);
    while (!rest.empty()) {
      const auto comma = rest.find(',');
      const std::string_view item = rest.substr(0, comma);
      const auto eq = item.find('=');
      require(eq != std::string_view::npos, "distribution parameter '" + std::string(item) + "' lacks '='");
      const std::string key(item.substr(0, eq));
      const std::string_view val = item.substr(eq + 1);
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), x);
      require(ec == std::errc() && ptr == val.data() + val.size(),
              "distribution parameter '" + key + "' is not a number");
      require(kv.emplace(key, x).second, "distribution parameter '" + key + "' given twice");
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
  }
  auto take = [&](const char* key) {
    const auto it = kv.find(key);
    require(it != kv.end(), family + " requires parameter '" + key + "'");
    const double x = it->second;
    kv.erase(it);
    return x;
  };
  std::optional<DistributionSpec> spec;
  if (family == "point_mass") {
    spec = point_mass(take("c"));
  } else if (family == "bernoulli") {
    const double a = take("a"), b = take("b"), p = take("p");
    spec = bernoulli(a, b, p);
  } else if (family == "uniform") {
    const double lo = take("lo"), hi = take("hi");
    spec = uniform(lo, hi);
  } else if (family == "exponential") {
    spec = exponential(take("rate"));
  } else if (family == "pareto") {
    const double alpha = take("alpha"), scale = take("scale");
    spec = pareto(alpha, scale);
  } else {
    throw ConfigError("unknown distribution family '" + family + "'");
  }
  require(kv.empty(), "unexpected parameter '" + (kv.empty() ? std::string() : kv.begin()->first) +
                          "' for " + family);
  return *spec;
}

std::string DistributionSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (family_) {
    case Family::PointMass: os << "point_mass:c=" << p0_; break;
    case Family::Bernoulli: os << "bernoulli:a=" << p0_ << ",b=" << p1_ << ",p=" << p2_; break;
    case Family::Uniform: os << "uniform:lo=" << p0_ << ",hi=" << p1_; break;
    case Family::Exponential: os << "exponential:rate=" << p0_; break;
    case Family::Pareto: os << "pareto:alpha=" << p0_ << ",scale=" << p1_; break;
  }
  return os.str();
}

double DistributionSpec::tail_mass(double x) const noexcept {
  switch (family_) {
    case Family::PointMass: return x <= p0_ ? 1.0 : 0.0;
    case Family::Bernoulli: return x <= p0_ ? 1.0 : (x <= p1_ ? 1.0 - p2_ : 0.0);
    case Family::Uniform:
      if (x <= p0_) return 1.0;
      if (x >= p1_) return 0.0;
      return (p1_ - x) / (p1_ - p0_);
    case Family::Exponential: return x <= 0.0 ? 1.0 : std::exp(-p0_ * x);
    case Family::Pareto: return x <= p1_ ? 1.0 : std::pow(p1_ / x, p0_);
  }
  return 0.0;
}

double DistributionSpec::cdf_below(double x) const noexcept { return 1.0 - tail_mass(x); }

double DistributionSpec::cdf(double x) const noexcept {
  switch (family_) {
    case Family::PointMass: return x >= p0_ ? 1.0 : 0.0;
    case Family::Bernoulli: return x >= p1_ ? 1.0 : (x >= p0_ ? p2_ : 0.0);
    default: return 1.0 - tail_mass(x);  // continuous: P[t = x] = 0
  }
}

double DistributionSpec::quantile(double u) const noexcept {
  switch (family_) {
    case Family::PointMass: return p0_;
    case Family::Bernoulli: return u < p2_ ? p0_ : p1_;
    case Family::Uniform: return p0_ + u * (p1_ - p0_);
    case Family::Exponential: return -std::log1p(-u) / p0_;
    case Family::Pareto: return p1_ * std::pow(1.0 - u, -1.0 / p0_);
  }
  return 0.0;
}

double DistributionSpec::mean() const noexcept {
  switch (family_) {
    case Family::PointMass: return p0_;
    case Family::Bernoulli: return p0_ * p2_ + p1_ * (1.0 - p2_);
    case Family::Uniform: return 0.5 * (p0_ + p1_);
    case Family::Exponential: return 1.0 / p0_;
    case Family::Pareto: return p0_ * p1_ / (p0_ - 1.0);
  }
  return 0.0;
}

bool DistributionSpec::heavy_tail() const noexcept { return family_ == Family::Pareto && p0_ <= 2.0; }

bool DistributionSpec::continuous() const noexcept {
  return family_ != Family::PointMass && family_ != Family::Bernoulli;
}

double tail_mass(const DistributionSpec& dist, double x) {
  if (x < 0.0) throw DomainError("tail_mass requires x >= 0");
  return dist.tail_mass(x);
}

double p_open(const DistributionSpec& dist, double M, int dim) {
  if (!(M > 0.0)) throw DomainError("p_open requires M > 0");
  return 1.0 - std::pow(dist.cdf_below(M), 2 * dim);
}

// ---------------------------------------------------------------------------

std::uint64_t prf_u64(std::uint64_t seed, std::span<const std::int32_t> words) {
  ensure_sodium();
  return siphash(make_key(seed), words);
}

double prf_uniform(std::uint64_t seed, std::span<const std::int32_t> words) {
  return to_unit_open(prf_u64(seed, words));
}

std::uint64_t derive_seed(std::uint64_t master, std::uint32_t tag, std::uint64_t a, std::uint64_t b) {
  const std::array<std::int32_t, 5> words{static_cast<std::int32_t>(tag), static_cast<std::int32_t>(a),
                                          static_cast<std::int32_t>(a >> 32), static_cast<std::int32_t>(b),
                                          static_cast<std::int32_t>(b >> 32)};
  return prf_u64(master ^ 0x9e3779b97f4a7c15ULL, words);
}

namespace {

double draw_with_key(const DistributionSpec& dist, const std::array<unsigned char, 16>& key, const Region& region,
                     EdgeId edge, std::uint32_t round) {
  std::array<std::int32_t, kMaxDim + 2> words{};
  const auto gk = region.global_edge_key(edge);
  std::copy(gk.begin(), gk.end(), words.begin());
  words[kMaxDim + 1] = static_cast<std::int32_t>(round);
  return dist.quantile(to_unit_open(siphash(key, words)));
}

}  // namespace

double draw_weight(const DistributionSpec& dist, std::uint64_t seed, const Region& region, EdgeId edge,
                   std::uint32_t round) {
  ensure_sodium();
  return draw_with_key(dist, make_key(seed), region, edge, round);
}

WeightField::WeightField(Region region, std::vector<double> weights)
    : region_(std::move(region)), weights_(std::move(weights)), rounds_(weights_.size(), 0) {
  if (weights_.size() != region_.num_edges()) throw DomainError("weight vector does not match region edges");
  for (double w : weights_) {
    if (!(w >= 0.0)) throw DomainError("passage times must be nonnegative");
  }
}

WeightField::WeightField(Region region, DistributionSpec dist, std::uint64_t seed)
    : region_(std::move(region)), dist_(dist), seed_(seed) {}

WeightField WeightField::with_weight(EdgeId e, double w) const {
  if (!(w >= 0.0)) throw DomainError("passage times must be nonnegative");
  WeightField out = *this;
  out.weights_.at(e) = w;
  return out;
}

WeightField sample_configuration(const Region& region, const DistributionSpec& dist, std::uint64_t seed) {
  ensure_sodium();
  WeightField f(region, dist, seed);
  const auto key = make_key(seed);
  const std::size_t ne = region.num_edges();
  f.weights_.resize(ne);
  f.rounds_.assign(ne, 0);
  for (std::size_t e = 0; e < ne; ++e) {
    f.weights_[e] = draw_with_key(dist, key, region, static_cast<EdgeId>(e), 0);
  }
  return f;
}

WeightField resample_edges(const WeightField& field, const std::function<bool(EdgeId)>& keep, std::uint32_t advance) {
  if (!field.dist_) throw PreconditionError("cannot resample a hand-built weight field");
  if (advance == 0) throw DomainError("resample must advance the round");
  ensure_sodium();
  WeightField out = field;
  const auto key = make_key(field.seed_);
  for (std::size_t i = 0; i < out.weights_.size(); ++i) {
    const auto e = static_cast<EdgeId>(i);
    if (keep(e)) continue;
    out.rounds_[i] += advance;
    out.weights_[i] = draw_with_key(*field.dist_, key, field.region_, e, out.rounds_[i]);
  }
  return out;
}

WeightField resample_outside(const WeightField& field, const VertexSet& keep, std::uint32_t advance) {
  if (!(keep.region() == field.region())) throw DomainError("keep set lives on a different region");
  const Region& r = field.region();
  VertexSet closure = keep;
  for (VertexId v : keep.members()) {
    r.for_each_zd_neighbor(v, [&](VertexId u, EdgeId) { closure.insert(u); });
  }
  return resample_edges(
      field,
      [&](EdgeId e) {
        const auto [a, b] = r.endpoints(e);
        return closure.contains(a) && closure.contains(b);
      },
      advance);
}

}  // namespace fpp
