#pragma once

#include <string>
#include <tuple>
#include <vector>

#include "streamcorr/phylo.hpp"
#include "streamcorr/store.hpp"

namespace streamcorr {

// One witnessing cluster behind a hit: (cluster name, stream, timestamp).
using Witness = std::tuple<std::string, std::string, double>;

struct SearchHit {
  std::string tag;
  double score = 0.0;
  int degree = 0;  // largest degree of the tag among witnessing clusters
  std::vector<Witness> explanation;
};

enum class SearchStatus { ok, unknown_tags };

struct SearchResult {
  SearchStatus status = SearchStatus::ok;
  std::vector<SearchHit> hits;
};

// Correlation coefficient (1 - delta/t) * (t_i/t) * (1 - dist) with
// delta = t_i - t_j; clamped at 0. Requires 0 <= t_j <= t_i <= t, t > 0 and
// dist in [0,1].
double coefficient(double t_i, double t_j, double t, double dist);

// Search by correlation over the stored clusters at time t.
//
//   1. Each input tag resolves (stream, then cluster name, then node) to the
//      clusters of its most recent stored window at or before t.
//   2. A single resolvable tag answers with the high-degree members of its
//      resolved clusters, scored by recency.
//   3. With several tags, every intersection of two resolved clusters scores
//      its common tags with `coefficient`; a tag found in an input tag's
//      cluster additionally pulls in that cluster's high-degree members.
//      Scores add up across witnessing pairs.
//   4. Without any intersection the candidate clusters widen, first to
//      phylogeny-adjacent streams (nearest leaf first), then window by window
//      into the past, up to `horizon` extra windows.
//
// Input tags never appear among the hits. Hits are sorted by descending
// score, then descending degree, then tag. `tree` may be null when no
// phylogeny is available; fallback then skips to older windows directly.
SearchResult search(const Store& store, const PhyloTree* tree,
                    const std::vector<std::string>& tags, double t,
                    std::size_t limit = 5, int horizon = 10);

// The same query evaluated at several report times; answers depend on t.
std::vector<std::pair<double, SearchResult>> time_ranked_answers(
    const Store& store, const PhyloTree* tree, const std::string& tag,
    const std::vector<double>& times, std::size_t limit = 5, int horizon = 10);

}  // namespace streamcorr
