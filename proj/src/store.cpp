#include "streamcorr/store.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>

namespace streamcorr {

namespace {

const char* kClusterFile = "cluster.tbl";
const char* kStreamFile = "stream.tbl";
const char* kNodesFile = "nodes.tbl";
const char* kCorrelationFile = "correlation.tbl";

std::string fmt_ts(double t) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

void check_tag(const std::string& tag, const char* what) {
  if (tag.empty())
    throw std::invalid_argument(std::string("store: empty ") + what);
  if (tag.find_first_of("\t\n,:") != std::string::npos)
    throw std::invalid_argument(std::string("store: ") + what +
                                " contains a reserved character: " + tag);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      parts.push_back(line.substr(start));
      return parts;
    }
    parts.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string dedup_key(const std::string& stream, long window, const std::string& name) {
  return stream + '\x1f' + std::to_string(window) + '\x1f' + name;
}

std::string pair_key(const std::string& a, const std::string& b) {
  return a <= b ? a + '\x1f' + b : b + '\x1f' + a;
}

}  // namespace

Store::Store(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
  load();
  auto open_append = [&](const char* name) {
    std::ofstream out(dir_ / name, std::ios::app);
    if (!out) throw std::runtime_error("store: cannot open " + (dir_ / name).string());
    return out;
  };
  cluster_out_ = open_append(kClusterFile);
  stream_out_ = open_append(kStreamFile);
  nodes_out_ = open_append(kNodesFile);
  correlation_out_ = open_append(kCorrelationFile);
}

void Store::load() {
  // cluster.tbl alone carries every cluster field; the stream and nodes
  // tables are derived views and are not needed to rebuild the index.
  std::ifstream in(dir_ / kClusterFile);
  std::string line;
  while (in && std::getline(in, line)) {
    if (line.empty()) continue;
    auto parts = split(line, '\t');
    if (parts.size() != 6)
      throw std::runtime_error("store: malformed cluster.tbl line: " + line);
    Cluster c;
    c.name = parts[0];
    c.stream = parts[1];
    c.window_index = std::stol(parts[2]);
    c.timestamp = std::strtod(parts[3].c_str(), nullptr);
    for (const auto& item : split(parts[5], ',')) {
      auto colon = item.find(':');
      if (colon == std::string::npos)
        throw std::runtime_error("store: malformed member entry: " + item);
      c.members.emplace_back(item.substr(0, colon),
                             std::stoi(item.substr(colon + 1)));
    }
    entries_.push_back(std::move(c));
    index_entry(entries_.size() - 1);
  }

  std::ifstream corr(dir_ / kCorrelationFile);
  while (corr && std::getline(corr, line)) {
    if (line.empty()) continue;
    auto parts = split(line, '\t');
    if (parts.size() != 4)
      throw std::runtime_error("store: malformed correlation.tbl line: " + line);
    correlations_[pair_key(parts[0], parts[1])].emplace_back(
        std::strtod(parts[3].c_str(), nullptr),
        std::strtod(parts[2].c_str(), nullptr));
  }
}

void Store::index_entry(std::size_t slot) {
  const Cluster& c = entries_[slot];
  by_stream_[c.stream].push_back(slot);
  by_name_[c.name].push_back(slot);
  for (const auto& [tag, deg] : c.members) by_node_[tag].push_back(slot);
  dedup_.insert(dedup_key(c.stream, c.window_index, c.name));
}

void Store::put_cluster(const Cluster& c) {
  if (c.members.empty())
    throw std::invalid_argument("store: cluster without members");
  check_tag(c.stream, "stream tag");
  check_tag(c.name, "cluster name");
  int max_deg = 0;
  bool name_found = false;
  for (const auto& [tag, deg] : c.members) {
    check_tag(tag, "member tag");
    if (deg < 1) throw std::invalid_argument("store: member degree must be >= 1");
    max_deg = std::max(max_deg, deg);
    if (tag == c.name) name_found = true;
  }
  if (!name_found)
    throw std::invalid_argument("store: cluster name is not a member");
  for (const auto& [tag, deg] : c.members)
    if (tag == c.name && deg != max_deg)
      throw std::invalid_argument("store: cluster name must have maximum degree");

  if (dedup_.count(dedup_key(c.stream, c.window_index, c.name))) return;

  std::string high;
  for (const auto& tag : c.high_degree()) {
    if (!high.empty()) high += ',';
    high += tag;
  }
  std::string members;
  for (const auto& [tag, deg] : c.members) {
    if (!members.empty()) members += ',';
    members += tag + ':' + std::to_string(deg);
  }
  const std::string ts = fmt_ts(c.timestamp);

  // The cluster line lands first so that, on any prefix of the files, every
  // stream and node line still resolves to a stored cluster.
  cluster_out_ << c.name << '\t' << c.stream << '\t' << c.window_index << '\t'
               << ts << '\t' << high << '\t' << members << '\n';
  cluster_out_.flush();
  if (!cluster_out_) throw std::runtime_error("store: cluster.tbl write failed");

  stream_out_ << c.stream << '\t' << c.name << '\t' << ts << '\n';
  for (const auto& [tag, deg] : c.members)
    nodes_out_ << tag << '\t' << c.stream << '\t' << c.name << '\t' << ts << '\n';
  stream_out_.flush();
  nodes_out_.flush();
  if (!stream_out_ || !nodes_out_)
    throw std::runtime_error("store: table write failed");

  entries_.push_back(c);
  index_entry(entries_.size() - 1);
}

void Store::append_correlation(const std::string& a, const std::string& b,
                               double rho, double t) {
  check_tag(a, "stream tag");
  check_tag(b, "stream tag");
  if (rho < 0.0 || rho > 1.0)
    throw std::invalid_argument("store: rho outside [0,1]");
  const std::string& first = a <= b ? a : b;
  const std::string& second = a <= b ? b : a;
  correlation_out_ << first << '\t' << second << '\t' << fmt_ts(rho) << '\t'
                   << fmt_ts(t) << '\n';
  correlation_out_.flush();
  if (!correlation_out_) throw std::runtime_error("store: correlation.tbl write failed");
  correlations_[pair_key(a, b)].emplace_back(t, rho);
}

Store::TagKind Store::resolve(const std::string& tag) const {
  if (by_stream_.count(tag)) return TagKind::stream;
  if (by_name_.count(tag)) return TagKind::cluster;
  if (by_node_.count(tag)) return TagKind::node;
  return TagKind::unknown;
}

std::vector<Cluster> Store::recent_clusters(const std::string& tag, double t,
                                            std::size_t limit) const {
  if (t < 0.0) throw std::invalid_argument("recent_clusters: negative time");
  const std::vector<std::size_t>* slots = nullptr;
  switch (resolve(tag)) {
    case TagKind::stream: slots = &by_stream_.at(tag); break;
    case TagKind::cluster: slots = &by_name_.at(tag); break;
    case TagKind::node: slots = &by_node_.at(tag); break;
    case TagKind::unknown: return {};
  }

  // Group by close time, newest first; each group keeps name order stable.
  std::map<double, std::vector<std::size_t>, std::greater<double>> by_time;
  for (std::size_t slot : *slots)
    if (entries_[slot].timestamp <= t) by_time[entries_[slot].timestamp].push_back(slot);

  std::vector<Cluster> out;
  std::size_t windows = 0;
  for (const auto& [ts, group] : by_time) {
    if (windows++ == limit) break;
    std::vector<std::size_t> ordered = group;
    std::sort(ordered.begin(), ordered.end(), [&](std::size_t a, std::size_t b) {
      return entries_[a].name < entries_[b].name;
    });
    for (std::size_t slot : ordered) out.push_back(entries_[slot]);
  }
  return out;
}

std::vector<std::string> Store::stream_tags() const {
  std::vector<std::string> tags;
  tags.reserve(by_stream_.size());
  for (const auto& [tag, slots] : by_stream_) tags.push_back(tag);
  std::sort(tags.begin(), tags.end());
  return tags;
}

std::vector<std::pair<double, double>> Store::correlation_history(
    const std::string& a, const std::string& b) const {
  auto it = correlations_.find(pair_key(a, b));
  return it == correlations_.end() ? std::vector<std::pair<double, double>>{}
                                   : it->second;
}

double Store::latest_correlation(const std::string& a, const std::string& b,
                                 double t) const {
  auto it = correlations_.find(pair_key(a, b));
  if (it == correlations_.end()) return 0.0;
  double rho = 0.0;
  for (const auto& [ts, value] : it->second)
    if (ts <= t) rho = value;
  return rho;
}

std::uint64_t Store::bytes_on_disk() const {
  std::uint64_t total = 0;
  for (const char* name : {kClusterFile, kStreamFile, kNodesFile, kCorrelationFile}) {
    std::error_code ec;
    auto size = std::filesystem::file_size(dir_ / name, ec);
    if (!ec) total += size;
  }
  return total;
}

}  // namespace streamcorr
