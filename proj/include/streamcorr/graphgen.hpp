#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "streamcorr/edge.hpp"
#include "streamcorr/rng.hpp"

namespace streamcorr {

// Degree law for the Configuration Model. Either the truncated power law
// Prob[d=j] = c/j^2 for 1 <= j <= floor(sqrt(n)), or an explicit table.
struct DegreeDistribution {
  enum class Kind { zipfian, explicit_table };

  Kind kind = Kind::zipfian;
  std::size_t n = 0;
  int d_max = 1;
  double c = 1.0;                                // zipfian normalization
  std::vector<std::pair<int, double>> probs;     // explicit table (degree, prob)

  static DegreeDistribution zipfian(std::size_t n);
  static DegreeDistribution explicit_table(std::size_t n,
                                           std::vector<std::pair<int, double>> probs);

  double prob(int degree) const;
  double mean_degree() const;
  double mean_degree_sq() const;
};

// Multigraph realized by stub matching. Degrees are fixed for the lifetime of
// the graph; dynamics rewire edges but never change any node's degree.
struct StubGraph {
  std::vector<int> degrees;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;

  std::size_t node_count() const { return degrees.size(); }
};

enum class DynamicsMode { uniform, concentrated, step };

struct DynamicsConfig {
  DynamicsMode mode = DynamicsMode::uniform;
  std::vector<std::uint32_t> S;   // planted set (concentrated and step modes)
  int q = 2;                      // edges rematched per tick
  double p_in = 0.8;              // concentrated: freed S-stub stays inside S
  long step_start = 0;            // step mode: first concentrated tick
  long step_length = 0;           // step mode: concentrated tick count
  double tick_interval = 1.0;     // simulated time per tick

  void validate(std::size_t n) const;  // throws std::invalid_argument
  bool concentrated_at(long tick) const;
};

// n i.i.d. draws from dist; one uniformly chosen degree is incremented when
// the sum comes out odd so a stub matching exists.
std::vector<int> sample_degrees(const DegreeDistribution& dist, std::uint64_t rng_seed);

// Uniform random stub matching. A stub never pairs with itself; two stubs of
// the same node may pair (self-loop).
StubGraph configuration_graph(const std::vector<int>& degrees, std::uint64_t rng_seed);

// True iff E[D^2] - 2 E[D] > 0, the supercriticality test for the emergence
// of a giant component under this degree law.
bool giant_component_criterion(const DegreeDistribution& dist);

// One dynamics tick: remove q uniformly chosen edges and rematch the 2q freed
// stubs, uniformly or by the concentrated rule depending on cfg and tick.
// Returns the q new edges stamped tick * tick_interval.
std::vector<TimedEdge> advance(StubGraph& graph, const DynamicsConfig& cfg,
                               long tick, std::uint64_t rng_seed);

// Integer-pair variant used by the simulation harnesses; `advance` wraps it.
std::vector<std::pair<std::uint32_t, std::uint32_t>> advance_pairs(
    StubGraph& graph, const DynamicsConfig& cfg, long tick, Rng& rng);

// Full synthetic stream: the initial graph's edges at t=0 followed by the
// emissions of `ticks` advance calls. Node i is named prefix + decimal i.
std::vector<TimedEdge> stream_from_dynamics(const DynamicsConfig& cfg,
                                            const DegreeDistribution& dist,
                                            long ticks, std::uint64_t rng_seed,
                                            const std::string& tag_prefix = "g");

// Node ids ordered by descending degree (ties by id); S is conventionally the
// first |S| entries, the high-degree nodes.
std::vector<std::uint32_t> nodes_by_degree(const std::vector<int>& degrees);

// Internal edge count of S in the current multigraph, the density witness
// E(S) behind the gamma-cluster definition.
std::size_t internal_edge_count(const StubGraph& graph,
                                const std::vector<std::uint32_t>& S);

}  // namespace streamcorr
