#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "streamcorr/clusters.hpp"

namespace streamcorr {

// Append-only persistence over four line-oriented table files in one data
// directory:
//
//   cluster.tbl      name TAB stream TAB window TAB timestamp TAB
//                    high1,high2,... TAB node:deg,node:deg,...
//   stream.tbl       stream TAB cluster-name TAB timestamp
//   nodes.tbl        node TAB stream TAB cluster-name TAB timestamp
//   correlation.tbl  tag1 TAB tag2 TAB rho TAB timestamp   (tag1 < tag2)
//
// Timestamps are printed with %.17g so reloaded values compare exactly.
// Tags must not contain TAB, newline, comma, or colon. The full index is
// rebuilt in memory when the store is opened; nothing is ever rewritten.
class Store {
 public:
  enum class TagKind { stream, cluster, node, unknown };

  explicit Store(std::filesystem::path dir);

  // Appends to the cluster, stream, and nodes tables. Storing a cluster with
  // an already-seen (stream, window, name) triple is a no-op.
  void put_cluster(const Cluster& c);

  // Appends one correlation point; the pair is stored in sorted order.
  void append_correlation(const std::string& a, const std::string& b,
                          double rho, double t);

  // Clusters visible at time t for a tag resolved as stream name first, then
  // cluster name, then plain node. `limit` counts distinct window close
  // times, most recent first; all clusters of a counted window are returned.
  std::vector<Cluster> recent_clusters(const std::string& tag, double t,
                                       std::size_t limit) const;

  TagKind resolve(const std::string& tag) const;

  std::vector<std::string> stream_tags() const;  // sorted
  std::size_t cluster_count() const { return entries_.size(); }

  // Full (t, rho) history of a pair in append order; empty when unknown.
  std::vector<std::pair<double, double>> correlation_history(
      const std::string& a, const std::string& b) const;

  // Latest rho at timestamp <= t; 0 when the pair has no point yet.
  double latest_correlation(const std::string& a, const std::string& b,
                            double t) const;

  std::uint64_t bytes_on_disk() const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  void load();
  void index_entry(std::size_t slot);

  std::filesystem::path dir_;
  std::ofstream cluster_out_, stream_out_, nodes_out_, correlation_out_;

  std::vector<Cluster> entries_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_stream_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_name_;
  std::unordered_map<std::string, std::vector<std::size_t>> by_node_;
  std::unordered_set<std::string> dedup_;
  std::unordered_map<std::string, std::vector<std::pair<double, double>>> correlations_;
};

}  // namespace streamcorr
