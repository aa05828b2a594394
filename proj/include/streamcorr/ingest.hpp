#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "streamcorr/clusters.hpp"
#include "streamcorr/correlation.hpp"
#include "streamcorr/edge.hpp"
#include "streamcorr/graphgen.hpp"
#include "streamcorr/windows.hpp"

namespace streamcorr {

// Edge line: <timestamp> TAB <src> TAB <dst>. Returns nothing for malformed
// lines; the caller counts the warning.
std::optional<TimedEdge> parse_edge_line(const std::string& line);

// Tweet line: <timestamp> TAB <author> TAB <hashtags> TAB <mentions>, the two
// lists comma separated with "-" for empty. Yields one edge (author, tag) per
// hashtag and per mention. Returns nothing for malformed lines; a valid tweet
// with neither hashtags nor mentions yields an empty list.
std::optional<std::vector<TimedEdge>> parse_tweet_line(const std::string& line);

void write_edge_file(const std::filesystem::path& path,
                     const std::vector<TimedEdge>& edges);

struct StreamSource {
  enum class Format { edges, tweets };
  std::string name;
  std::filesystem::path path;
  Format format = Format::edges;
};

struct PipelineConfig {
  std::vector<StreamSource> streams;
  WindowConfig window;
  ClusterParams params;
  std::filesystem::path data_dir;
  std::filesystem::path report_dir;  // empty: no series files written
  double end_time = -1.0;            // < 0: the largest timestamp seen
  std::uint64_t seed = 1;

  void validate() const;
};

struct StreamCounters {
  std::string name;
  std::size_t lines = 0;
  std::size_t skipped_lines = 0;   // malformed, counted and dropped
  std::size_t edges = 0;           // parsed edges
  std::size_t invalid_tag = 0;     // edges dropped for reserved characters
  std::size_t stale = 0;           // older than every open window
  std::size_t routed = 0;          // offered to at least one reservoir
};

struct WindowStat {
  std::string stream;
  long window = 0;
  double close_time = 0.0;
  std::size_t edges_seen = 0;                // m of the reservoir
  std::vector<std::size_t> component_sizes;  // large-component spectrum
  std::size_t stored_clusters = 0;
};

struct PipelineReport {
  std::vector<StreamCounters> streams;
  std::vector<WindowStat> window_stats;
  long windows_closed = 0;  // per stream
  // Pair histories keyed by (s1, s2), s1 < s2; values are (t_i, rho).
  std::map<std::pair<std::string, std::string>,
           std::vector<std::pair<double, double>>> rho;
  std::uint64_t input_bytes = 0;
  std::uint64_t stored_bytes = 0;

  double compression_ratio() const {
    return stored_bytes ? static_cast<double>(input_bytes) / static_cast<double>(stored_bytes)
                        : 0.0;
  }
  std::string to_text() const;
};

// Replays the configured streams through windows, reservoirs, cluster
// extraction, the store, and the pairwise correlation states. Every window
// opened before end_time closes exactly once, in close-time order, even when
// it saw no edges; correlation points are appended at every close.
PipelineReport run_pipeline(const PipelineConfig& cfg);

// Plain key=value configuration text (one pair per line, '#' comments).
// Repeated keys collect in order.
std::vector<std::pair<std::string, std::string>> parse_kv_file(
    const std::filesystem::path& path);

// Pipeline configuration from key=value text. Recognized keys: tau, lambda,
// k, gamma, alpha, min_store, seed, data_dir, report_dir, end_time,
// stream.<name>=<path>, format.<name>=edges|tweets.
PipelineConfig pipeline_config_from_kv(
    const std::vector<std::pair<std::string, std::string>>& kv);

// Generator configuration from key=value text. Recognized keys: mode, n, q,
// p_in, tick_interval, step_start, step_length, ticks, seed, prefix, s_size,
// dist (zipfian | explicit), probs (deg:prob comma list, explicit only).
struct GeneratorSpec {
  DegreeDistribution dist = DegreeDistribution::zipfian(1000);
  DynamicsConfig dynamics;
  std::size_t s_size = 0;  // planted set = this many highest-degree nodes
  long ticks = 0;
  std::uint64_t seed = 1;
  std::string prefix = "g";
};
GeneratorSpec generator_spec_from_kv(
    const std::vector<std::pair<std::string, std::string>>& kv);

// Realizes a GeneratorSpec: samples degrees, builds the graph, plants S as
// the s_size highest-degree nodes, and emits the full stream.
std::vector<TimedEdge> generate_stream(const GeneratorSpec& spec);

std::uint64_t fnv1a(const std::string& s);

}  // namespace streamcorr
