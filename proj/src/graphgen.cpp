#include "streamcorr/graphgen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

namespace streamcorr {

DegreeDistribution DegreeDistribution::zipfian(std::size_t n) {
  if (n == 0) throw std::invalid_argument("zipfian: n must be positive");
  DegreeDistribution d;
  d.kind = Kind::zipfian;
  d.n = n;
  d.d_max = std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(n)))));
  double z = 0.0;
  for (int j = 1; j <= d.d_max; ++j) z += 1.0 / (static_cast<double>(j) * j);
  d.c = 1.0 / z;
  return d;
}

DegreeDistribution DegreeDistribution::explicit_table(
    std::size_t n, std::vector<std::pair<int, double>> probs) {
  if (n == 0) throw std::invalid_argument("explicit_table: n must be positive");
  if (probs.empty()) throw std::invalid_argument("explicit_table: empty table");
  double total = 0.0;
  int dmax = 1;
  for (auto& [deg, p] : probs) {
    if (deg < 1) throw std::invalid_argument("explicit_table: degrees must be >= 1");
    if (p < 0.0) throw std::invalid_argument("explicit_table: negative probability");
    total += p;
    dmax = std::max(dmax, deg);
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("explicit_table: probabilities must sum to 1");
  DegreeDistribution d;
  d.kind = Kind::explicit_table;
  d.n = n;
  d.d_max = dmax;
  d.probs = std::move(probs);
  return d;
}

double DegreeDistribution::prob(int degree) const {
  if (kind == Kind::zipfian) {
    if (degree < 1 || degree > d_max) return 0.0;
    return c / (static_cast<double>(degree) * degree);
  }
  double p = 0.0;
  for (const auto& [deg, pr] : probs)
    if (deg == degree) p += pr;
  return p;
}

double DegreeDistribution::mean_degree() const {
  double m = 0.0;
  if (kind == Kind::zipfian) {
    for (int j = 1; j <= d_max; ++j) m += j * prob(j);
  } else {
    for (const auto& [deg, pr] : probs) m += deg * pr;
  }
  return m;
}

double DegreeDistribution::mean_degree_sq() const {
  double m = 0.0;
  if (kind == Kind::zipfian) {
    for (int j = 1; j <= d_max; ++j) m += static_cast<double>(j) * j * prob(j);
  } else {
    for (const auto& [deg, pr] : probs) m += static_cast<double>(deg) * deg * pr;
  }
  return m;
}

void DynamicsConfig::validate(std::size_t n) const {
  if (q < 2) throw std::invalid_argument("dynamics: q must be >= 2");
  if (p_in < 0.0 || p_in > 1.0)
    throw std::invalid_argument("dynamics: p_in must be in [0,1]");
  if (mode != DynamicsMode::uniform && S.empty())
    throw std::invalid_argument("dynamics: S must be nonempty for this mode");
  if (mode == DynamicsMode::step && step_length <= 0)
    throw std::invalid_argument("dynamics: step_length must be positive");
  if (tick_interval <= 0.0)
    throw std::invalid_argument("dynamics: tick_interval must be positive");
  for (auto u : S)
    if (u >= n) throw std::invalid_argument("dynamics: S contains an unknown node");
}

bool DynamicsConfig::concentrated_at(long tick) const {
  switch (mode) {
    case DynamicsMode::uniform: return false;
    case DynamicsMode::concentrated: return true;
    case DynamicsMode::step:
      return tick >= step_start && tick < step_start + step_length;
  }
  return false;
}

std::vector<int> sample_degrees(const DegreeDistribution& dist, std::uint64_t rng_seed) {
  Rng rng = Rng::derive(rng_seed, 0x5eed5);
  std::vector<int> degrees(dist.n);

  if (dist.kind == DegreeDistribution::Kind::zipfian) {
    // Inverse-CDF table over 1..d_max.
    std::vector<double> cdf(static_cast<std::size_t>(dist.d_max));
    double acc = 0.0;
    for (int j = 1; j <= dist.d_max; ++j) {
      acc += dist.prob(j);
      cdf[static_cast<std::size_t>(j - 1)] = acc;
    }
    cdf.back() = 1.0;
    for (auto& d : degrees) {
      double u = rng.unit();
      auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
      d = static_cast<int>(it - cdf.begin()) + 1;
    }
  } else {
    std::vector<double> cdf(dist.probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < dist.probs.size(); ++i) {
      acc += dist.probs[i].second;
      cdf[i] = acc;
    }
    cdf.back() = std::max(cdf.back(), 1.0);
    for (auto& d : degrees) {
      double u = rng.unit();
      auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
      d = dist.probs[static_cast<std::size_t>(it - cdf.begin())].first;
    }
  }

  long long total = std::accumulate(degrees.begin(), degrees.end(), 0LL);
  if (total % 2 != 0) degrees[rng.below(degrees.size())] += 1;
  return degrees;
}

StubGraph configuration_graph(const std::vector<int>& degrees, std::uint64_t rng_seed) {
  long long total = std::accumulate(degrees.begin(), degrees.end(), 0LL);
  if (total % 2 != 0)
    throw std::invalid_argument("configuration_graph: odd stub total");

  Rng rng = Rng::derive(rng_seed, 0xc0f1);
  std::vector<std::uint32_t> stubs;
  stubs.reserve(static_cast<std::size_t>(total));
  for (std::uint32_t u = 0; u < degrees.size(); ++u)
    for (int i = 0; i < degrees[u]; ++i) stubs.push_back(u);

  rng.shuffle(stubs);

  StubGraph g;
  g.degrees = degrees;
  g.edges.reserve(stubs.size() / 2);
  for (std::size_t i = 0; i + 1 < stubs.size(); i += 2)
    g.edges.emplace_back(stubs[i], stubs[i + 1]);
  return g;
}

bool giant_component_criterion(const DegreeDistribution& dist) {
  return dist.mean_degree_sq() - 2.0 * dist.mean_degree() > 0.0;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> advance_pairs(
    StubGraph& graph, const DynamicsConfig& cfg, long tick, Rng& rng) {
  const std::size_t q = static_cast<std::size_t>(cfg.q);
  if (q > graph.edges.size())
    throw std::invalid_argument("advance: q exceeds the current edge count");

  // Free 2q stubs by removing q uniformly chosen edges (swap with the tail so
  // removal stays O(1) per edge).
  std::vector<std::uint32_t> freed;
  freed.reserve(2 * q);
  for (std::size_t r = 0; r < q; ++r) {
    std::size_t i = rng.below(graph.edges.size());
    freed.push_back(graph.edges[i].first);
    freed.push_back(graph.edges[i].second);
    graph.edges[i] = graph.edges.back();
    graph.edges.pop_back();
  }

  std::vector<std::pair<std::uint32_t, std::uint32_t>> fresh;
  fresh.reserve(q);

  if (!cfg.concentrated_at(tick)) {
    rng.shuffle(freed);
    for (std::size_t i = 0; i + 1 < freed.size(); i += 2)
      fresh.emplace_back(freed[i], freed[i + 1]);
  } else {
    std::unordered_set<std::uint32_t> in_s(cfg.S.begin(), cfg.S.end());
    std::vector<std::uint32_t> s_stubs, out_stubs;
    for (auto u : freed)
      (in_s.count(u) ? s_stubs : out_stubs).push_back(u);
    rng.shuffle(s_stubs);
    rng.shuffle(out_stubs);

    // Each S-stub pairs inside S with probability p_in, otherwise outside.
    // When the wanted side is exhausted the other side is used, and the total
    // stub count is even, so no stub is ever left unmatched.
    while (!s_stubs.empty()) {
      std::uint32_t a = s_stubs.back();
      s_stubs.pop_back();
      bool inside = rng.chance(cfg.p_in);
      std::uint32_t b;
      if (inside && !s_stubs.empty()) {
        b = s_stubs.back();
        s_stubs.pop_back();
      } else if (!inside && !out_stubs.empty()) {
        b = out_stubs.back();
        out_stubs.pop_back();
      } else if (!s_stubs.empty()) {
        b = s_stubs.back();
        s_stubs.pop_back();
      } else {
        b = out_stubs.back();
        out_stubs.pop_back();
      }
      fresh.emplace_back(a, b);
    }
    while (out_stubs.size() >= 2) {
      std::uint32_t a = out_stubs.back();
      out_stubs.pop_back();
      std::uint32_t b = out_stubs.back();
      out_stubs.pop_back();
      fresh.emplace_back(a, b);
    }
  }

  graph.edges.insert(graph.edges.end(), fresh.begin(), fresh.end());
  return fresh;
}

std::vector<TimedEdge> advance(StubGraph& graph, const DynamicsConfig& cfg,
                               long tick, std::uint64_t rng_seed) {
  cfg.validate(graph.node_count());
  Rng rng = Rng::derive(rng_seed, static_cast<std::uint64_t>(tick) + 0xAD7A);
  auto pairs = advance_pairs(graph, cfg, tick, rng);
  std::vector<TimedEdge> out;
  out.reserve(pairs.size());
  const double t = static_cast<double>(tick) * cfg.tick_interval;
  for (auto [u, v] : pairs)
    out.push_back({t, "g" + std::to_string(u), "g" + std::to_string(v)});
  return out;
}

std::vector<TimedEdge> stream_from_dynamics(const DynamicsConfig& cfg,
                                            const DegreeDistribution& dist,
                                            long ticks, std::uint64_t rng_seed,
                                            const std::string& tag_prefix) {
  if (ticks < 0) throw std::invalid_argument("stream_from_dynamics: ticks must be >= 0");
  auto degrees = sample_degrees(dist, rng_seed);
  StubGraph graph = configuration_graph(degrees, rng_seed + 1);
  cfg.validate(graph.node_count());

  auto name = [&](std::uint32_t u) { return tag_prefix + std::to_string(u); };

  std::vector<TimedEdge> out;
  out.reserve(graph.edges.size() + static_cast<std::size_t>(ticks) * static_cast<std::size_t>(cfg.q));
  for (auto [u, v] : graph.edges) out.push_back({0.0, name(u), name(v)});

  Rng rng = Rng::derive(rng_seed, 0xD15EA5E);
  for (long tick = 1; tick <= ticks; ++tick) {
    auto pairs = advance_pairs(graph, cfg, tick, rng);
    const double t = static_cast<double>(tick) * cfg.tick_interval;
    for (auto [u, v] : pairs) out.push_back({t, name(u), name(v)});
  }
  return out;
}

std::vector<std::uint32_t> nodes_by_degree(const std::vector<int>& degrees) {
  std::vector<std::uint32_t> ids(degrees.size());
  std::iota(ids.begin(), ids.end(), 0u);
  std::stable_sort(ids.begin(), ids.end(), [&](std::uint32_t a, std::uint32_t b) {
    return degrees[a] > degrees[b];
  });
  return ids;
}

std::size_t internal_edge_count(const StubGraph& graph,
                                const std::vector<std::uint32_t>& S) {
  std::unordered_set<std::uint32_t> in_s(S.begin(), S.end());
  std::size_t count = 0;
  for (auto [u, v] : graph.edges)
    if (in_s.count(u) && in_s.count(v)) ++count;
  return count;
}

}  // namespace streamcorr
