#include "streamcorr/search.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace streamcorr {

double coefficient(double t_i, double t_j, double t, double dist) {
  if (t <= 0.0) throw std::invalid_argument("coefficient: t must be positive");
  if (dist < 0.0 || dist > 1.0)
    throw std::invalid_argument("coefficient: dist must be in [0,1]");
  if (t_j < 0.0 || t_j > t_i || t_i > t)
    throw std::invalid_argument("coefficient: need 0 <= t_j <= t_i <= t");
  double delta = t_i - t_j;
  double value = (1.0 - delta / t) * (t_i / t) * (1.0 - dist);
  return std::max(0.0, value);
}

namespace {

struct Accum {
  double score = 0.0;
  int degree = 0;
  std::set<Witness> witnesses;
};

int degree_in(const Cluster& c, const std::string& tag) {
  for (const auto& [member, deg] : c.members)
    if (member == tag) return deg;
  return 0;
}

bool same_entry(const Cluster& a, const Cluster& b) {
  return a.stream == b.stream && a.window_index == b.window_index &&
         a.name == b.name;
}

Witness witness_of(const Cluster& c) {
  return {c.name, c.stream, c.timestamp};
}

}  // namespace

SearchResult search(const Store& store, const PhyloTree* tree,
                    const std::vector<std::string>& tags, double t,
                    std::size_t limit, int horizon) {
  if (tags.empty()) throw std::invalid_argument("search: no input tags");
  if (t <= 0.0) throw std::invalid_argument("search: t must be positive");
  if (horizon < 0) throw std::invalid_argument("search: negative horizon");

  std::unordered_set<std::string> input(tags.begin(), tags.end());

  // Distance between streams through the phylogeny; 0 when the tree cannot
  // place both streams.
  auto stream_dist = [&](const std::string& a, const std::string& b) {
    if (a == b || tree == nullptr) return 0.0;
    if (tree->leaf_index(a) < 0 || tree->leaf_index(b) < 0) return 0.0;
    return leaf_distance(*tree, a, b);
  };

  auto resolve_at = [&](const std::string& tag, std::size_t window_depth) {
    return store.recent_clusters(tag, t, window_depth);
  };

  std::vector<std::size_t> live;  // indices of resolvable input tags
  std::vector<std::vector<Cluster>> base(tags.size());
  for (std::size_t i = 0; i < tags.size(); ++i) {
    base[i] = resolve_at(tags[i], 1);
    if (!base[i].empty()) live.push_back(i);
  }
  if (live.empty()) return {SearchStatus::unknown_tags, {}};

  std::map<std::string, Accum> acc;

  auto credit = [&](const std::string& tag, double score, int deg,
                    std::initializer_list<const Cluster*> from) {
    if (input.count(tag)) return;  // query tags are never answers
    Accum& a = acc[tag];
    a.score += score;
    a.degree = std::max(a.degree, deg);
    for (const Cluster* c : from) a.witnesses.insert(witness_of(*c));
  };

  auto score_pair = [&](const Cluster& ca, const Cluster& cb) {
    if (same_entry(ca, cb)) return;
    double t_i = std::max(ca.timestamp, cb.timestamp);
    double t_j = std::min(ca.timestamp, cb.timestamp);
    double coef = coefficient(t_i, t_j, t, stream_dist(ca.stream, cb.stream));
    if (coef <= 0.0) return;
    // Common members of the two clusters.
    std::unordered_map<std::string, int> in_a;
    for (const auto& [tag, deg] : ca.members) in_a.emplace(tag, deg);
    for (const auto& [tag, deg] : cb.members) {
      auto it = in_a.find(tag);
      if (it == in_a.end()) continue;
      credit(tag, coef, std::max(deg, it->second), {&ca, &cb});
    }
  };

  auto score_containment = [&](const Cluster& ca, const std::string& other_tag,
                               const std::vector<Cluster>& other_resolved) {
    if (!ca.contains(other_tag)) return;
    double other_ts = 0.0;
    for (const auto& c : other_resolved)
      other_ts = std::max(other_ts, c.timestamp);
    double t_i = std::max(ca.timestamp, other_ts);
    double t_j = std::min(ca.timestamp, other_ts);
    double coef = coefficient(t_i, t_j, t, 0.0);
    if (coef <= 0.0) return;
    for (const auto& tag : ca.high_degree(limit))
      credit(tag, coef, degree_in(ca, tag), {&ca});
  };

  auto run_round = [&](const std::vector<std::vector<Cluster>>& cand) {
    acc.clear();
    if (live.size() == 1) {
      // Single resolvable tag: its clusters' high-degree members, by recency.
      // The pool is padded so filtering out the query tags still leaves
      // `limit` answers when the cluster is large enough.
      for (const auto& c : cand[live[0]]) {
        double coef = coefficient(c.timestamp, c.timestamp, t, 0.0);
        for (const auto& tag : c.high_degree(limit + tags.size()))
          credit(tag, coef, degree_in(c, tag), {&c});
      }
      return;
    }
    for (std::size_t x = 0; x < live.size(); ++x) {
      for (std::size_t y = x + 1; y < live.size(); ++y) {
        for (const auto& ca : cand[live[x]])
          for (const auto& cb : cand[live[y]]) score_pair(ca, cb);
      }
    }
    for (std::size_t x = 0; x < live.size(); ++x) {
      for (std::size_t y = 0; y < live.size(); ++y) {
        if (x == y) continue;
        for (const auto& ca : cand[live[x]])
          score_containment(ca, tags[live[y]], cand[live[y]]);
      }
    }
  };

  run_round(base);

  // Fallback 1: pull in the most recent clusters of phylogeny-adjacent
  // streams, nearest leaf first.
  if (acc.empty() && tree != nullptr && live.size() > 1) {
    std::set<std::string> resolved_streams;
    for (std::size_t i : live)
      for (const auto& c : base[i]) resolved_streams.insert(c.stream);

    std::vector<std::pair<double, std::string>> neighbors;
    for (int leaf : tree->leaves()) {
      const std::string& s = tree->nodes[static_cast<std::size_t>(leaf)].label;
      if (resolved_streams.count(s)) continue;
      double nearest = 2.0;
      for (const auto& rs : resolved_streams)
        if (tree->leaf_index(rs) >= 0)
          nearest = std::min(nearest, leaf_distance(*tree, s, rs));
      neighbors.emplace_back(nearest, s);
    }
    std::sort(neighbors.begin(), neighbors.end());

    std::vector<std::vector<Cluster>> widened = base;
    for (const auto& [dist, s] : neighbors) {
      auto extra = store.recent_clusters(s, t, 1);
      if (extra.empty()) continue;
      for (std::size_t i : live)
        widened[i].insert(widened[i].end(), extra.begin(), extra.end());
      run_round(widened);
      if (!acc.empty()) break;
    }
  }

  // Fallback 2: step back one window at a time.
  if (acc.empty()) {
    for (int back = 1; back <= horizon && acc.empty(); ++back) {
      std::vector<std::vector<Cluster>> older(tags.size());
      for (std::size_t i : live)
        older[i] = resolve_at(tags[i], 1 + static_cast<std::size_t>(back));
      run_round(older);
    }
  }

  SearchResult result;
  result.status = SearchStatus::ok;
  for (auto& [tag, a] : acc) {
    SearchHit hit;
    hit.tag = tag;
    hit.score = a.score;
    hit.degree = a.degree;
    hit.explanation.assign(a.witnesses.begin(), a.witnesses.end());
    result.hits.push_back(std::move(hit));
  }
  std::sort(result.hits.begin(), result.hits.end(),
            [](const SearchHit& a, const SearchHit& b) {
              if (a.score != b.score) return a.score > b.score;
              if (a.degree != b.degree) return a.degree > b.degree;
              return a.tag < b.tag;
            });
  if (result.hits.size() > limit) result.hits.resize(limit);
  return result;
}

std::vector<std::pair<double, SearchResult>> time_ranked_answers(
    const Store& store, const PhyloTree* tree, const std::string& tag,
    const std::vector<double>& times, std::size_t limit, int horizon) {
  std::vector<std::pair<double, SearchResult>> out;
  out.reserve(times.size());
  for (double t : times)
    out.emplace_back(t, search(store, tree, {tag}, t, limit, horizon));
  return out;
}

}  // namespace streamcorr
