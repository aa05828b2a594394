#include "streamcorr/clusters.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace streamcorr {

void ClusterParams::validate() const {
  if (!(gamma > 0.0) || gamma > 1.0)
    throw std::invalid_argument("cluster params: gamma must be in (0,1]");
  if (alpha < 2) throw std::invalid_argument("cluster params: alpha must be >= 2");
  if (min_store < 2)
    throw std::invalid_argument("cluster params: min_store must be >= 2");
}

int ClusterParams::default_alpha(std::size_t n, int min_store) {
  int log_term = n > 1 ? static_cast<int>(std::ceil(std::log(static_cast<double>(n)))) : 1;
  return std::max(min_store, log_term);
}

std::vector<std::string> Cluster::high_degree(std::size_t top) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < members.size() && i < top; ++i)
    out.push_back(members[i].first);
  return out;
}

bool Cluster::contains(const std::string& tag) const {
  return std::any_of(members.begin(), members.end(),
                     [&](const auto& m) { return m.first == tag; });
}

namespace {

// Union-find over dense indices with path halving.
struct UnionFind {
  std::vector<std::size_t> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[a] = b;
  }
};

}  // namespace

std::vector<Component> connected_components(const std::vector<TimedEdge>& edges) {
  std::unordered_map<std::string, std::size_t> id;
  std::vector<const std::string*> tags;
  auto intern = [&](const std::string& tag) {
    auto [it, fresh] = id.try_emplace(tag, tags.size());
    if (fresh) tags.push_back(&it->first);
    return it->second;
  };

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(edges.size());
  for (const auto& e : edges) pairs.emplace_back(intern(e.src), intern(e.dst));

  UnionFind uf(tags.size());
  std::vector<int> degree(tags.size(), 0);
  for (auto [u, v] : pairs) {
    uf.unite(u, v);
    degree[u] += 1;
    degree[v] += 1;  // self-loops contribute 2 this way
  }

  std::unordered_map<std::size_t, std::size_t> root_slot;
  std::vector<Component> comps;
  for (std::size_t u = 0; u < tags.size(); ++u) {
    std::size_t root = uf.find(u);
    auto [it, fresh] = root_slot.try_emplace(root, comps.size());
    if (fresh) comps.emplace_back();
    comps[it->second].members.emplace_back(*tags[u], degree[u]);
  }

  for (auto& c : comps) {
    std::sort(c.members.begin(), c.members.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
  }
  std::sort(comps.begin(), comps.end(), [](const Component& a, const Component& b) {
    if (a.size() != b.size()) return a.size() > b.size();
    return a.members.front().first < b.members.front().first;
  });
  return comps;
}

Decision detect_static(const std::vector<TimedEdge>& closed_samples,
                       const ClusterParams& params) {
  params.validate();
  auto comps = connected_components(closed_samples);
  if (comps.empty()) return Decision::Reject;
  return comps.front().size() >= static_cast<std::size_t>(params.alpha)
             ? Decision::Accept
             : Decision::Reject;
}

Decision detect_dynamic(const std::vector<std::vector<TimedEdge>>& closed_windows,
                        const ClusterParams& params) {
  params.validate();
  if (closed_windows.empty())
    throw std::invalid_argument("detect_dynamic: need at least one window");
  for (const auto& w : closed_windows)
    if (detect_static(w, params) == Decision::Accept) return Decision::Accept;
  return Decision::Reject;
}

std::vector<Cluster> extract_large(const std::vector<TimedEdge>& closed_samples,
                                   const ClusterParams& params,
                                   const std::string& stream, long window_index,
                                   double t_i) {
  params.validate();
  std::vector<Cluster> out;
  for (auto& comp : connected_components(closed_samples)) {
    if (comp.size() < static_cast<std::size_t>(params.min_store)) continue;
    Cluster c;
    c.stream = stream;
    c.window_index = window_index;
    c.timestamp = t_i;
    c.name = comp.members.front().first;  // max degree, ties lexicographic
    c.members = std::move(comp.members);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace streamcorr
