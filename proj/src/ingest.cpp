#include "streamcorr/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include "streamcorr/store.hpp"

namespace streamcorr {

namespace {

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

bool parse_double(const std::string& s, double& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last && std::isfinite(out);
}

bool parse_long(const std::string& s, long long& out) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

bool valid_tag(const std::string& tag) {
  return !tag.empty() && tag.find_first_of("\t\n\r,:") == std::string::npos;
}

std::string fmt_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", t);
  return buf;
}

void strip_cr(std::string& line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
}

}  // namespace

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::optional<TimedEdge> parse_edge_line(const std::string& line) {
  auto parts = split(line, '\t');
  if (parts.size() != 3) return std::nullopt;
  double ts;
  if (!parse_double(parts[0], ts) || ts < 0) return std::nullopt;
  if (parts[1].empty() || parts[2].empty()) return std::nullopt;
  return TimedEdge{ts, parts[1], parts[2]};
}

std::optional<std::vector<TimedEdge>> parse_tweet_line(const std::string& line) {
  auto parts = split(line, '\t');
  if (parts.size() != 4) return std::nullopt;
  double ts;
  if (!parse_double(parts[0], ts) || ts < 0) return std::nullopt;
  const std::string& author = parts[1];
  if (author.empty()) return std::nullopt;

  std::vector<TimedEdge> edges;
  for (int field = 2; field <= 3; ++field) {
    if (parts[field].empty()) return std::nullopt;
    if (parts[field] == "-") continue;
    for (const auto& tok : split(parts[field], ','))
      edges.push_back({ts, author, tok});
  }
  return edges;
}

void write_edge_file(const std::filesystem::path& path,
                     const std::vector<TimedEdge>& edges) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  for (const auto& e : edges)
    out << fmt_time(e.ts) << '\t' << e.src << '\t' << e.dst << '\n';
  out.flush();
  if (!out) throw std::runtime_error("short write to " + path.string());
}

void PipelineConfig::validate() const {
  if (streams.empty())
    throw std::invalid_argument("pipeline: no input streams");
  std::unordered_set<std::string> names;
  for (const auto& s : streams) {
    if (!valid_tag(s.name))
      throw std::invalid_argument("pipeline: bad stream name: " + s.name);
    if (!names.insert(s.name).second)
      throw std::invalid_argument("pipeline: duplicate stream name: " + s.name);
    if (s.path.empty())
      throw std::invalid_argument("pipeline: stream without a path: " + s.name);
  }
  window.validate();
  params.validate();
  if (data_dir.empty())
    throw std::invalid_argument("pipeline: data_dir is required");
}

namespace {

struct ParsedStream {
  std::vector<TimedEdge> edges;  // file order
  StreamCounters counters;
};

ParsedStream read_stream(const StreamSource& src) {
  std::ifstream in(src.path);
  if (!in)
    throw std::runtime_error("cannot read stream " + src.name + " from " +
                             src.path.string());
  ParsedStream out;
  out.counters.name = src.name;
  std::string line;
  while (std::getline(in, line)) {
    strip_cr(line);
    if (line.empty()) continue;
    ++out.counters.lines;
    if (src.format == StreamSource::Format::edges) {
      auto e = parse_edge_line(line);
      if (!e) {
        ++out.counters.skipped_lines;
        continue;
      }
      out.edges.push_back(std::move(*e));
    } else {
      auto batch = parse_tweet_line(line);
      if (!batch) {
        ++out.counters.skipped_lines;
        continue;
      }
      for (auto& e : *batch) out.edges.push_back(std::move(e));
    }
  }
  out.counters.edges = out.edges.size();
  return out;
}

}  // namespace

PipelineReport run_pipeline(const PipelineConfig& cfg) {
  cfg.validate();

  // Read and parse everything up front so an unreadable input aborts the run
  // before the store directory is touched.
  std::vector<ParsedStream> inputs;
  inputs.reserve(cfg.streams.size());
  std::uint64_t input_bytes = 0;
  for (const auto& src : cfg.streams) {
    inputs.push_back(read_stream(src));
    input_bytes += std::filesystem::file_size(src.path);
  }

  Store store(cfg.data_dir);
  const std::size_t ns = cfg.streams.size();

  PipelineReport report;
  report.input_bytes = input_bytes;
  for (auto& in : inputs) report.streams.push_back(in.counters);

  // Per-stream reservoirs by window index, created on first touch. The seed
  // folds in the stream name so equal inputs under different names stay
  // independent.
  std::vector<std::unordered_map<long, WindowReservoir>> open(ns);
  std::vector<std::uint64_t> stream_seed(ns);
  for (std::size_t s = 0; s < ns; ++s)
    stream_seed[s] = cfg.seed ^ fnv1a(cfg.streams[s].name);

  auto reservoir = [&](std::size_t s, long w) -> WindowReservoir& {
    auto it = open[s].find(w);
    if (it == open[s].end())
      it = open[s].emplace(w, WindowReservoir(w, cfg.window, stream_seed[s])).first;
    return it->second;
  };

  // Pairwise correlation states in stream order, s1 < s2.
  std::map<std::pair<std::size_t, std::size_t>, CorrelationState> pairs;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = i + 1; j < ns; ++j)
      pairs.emplace(std::make_pair(i, j),
                    CorrelationState(cfg.streams[i].name, cfg.streams[j].name));

  long next_close = 1;

  auto close_window = [&](long w) {
    const double t_i = cfg.window.close_time(w);
    std::vector<std::vector<std::string>> fresh(ns);
    for (std::size_t s = 0; s < ns; ++s) {
      auto [samples, m] = reservoir(s, w).close();
      open[s].erase(w);

      WindowStat stat;
      stat.stream = cfg.streams[s].name;
      stat.window = w;
      stat.close_time = t_i;
      stat.edges_seen = m;

      auto comps = connected_components(samples);
      for (const auto& c : comps)
        if (c.size() >= 2) stat.component_sizes.push_back(c.size());

      auto clusters = extract_large(samples, cfg.params, cfg.streams[s].name, w, t_i);
      stat.stored_clusters = clusters.size();
      for (const auto& c : clusters) {
        store.put_cluster(c);
        for (const auto& [tag, deg] : c.members) fresh[s].push_back(tag);
      }
      report.window_stats.push_back(std::move(stat));
    }
    for (auto& [key, state] : pairs) {
      rho_step(state, fresh[key.first], fresh[key.second], t_i);
      store.append_correlation(state.s1, state.s2, state.rho(), t_i);
    }
    ++report.windows_closed;
  };

  // Merge the streams on (timestamp, stream order, file order). Within one
  // stream the file order is preserved, so late edges still route into any
  // window that has not closed yet and are dropped as stale otherwise.
  std::vector<std::size_t> cursor(ns, 0);
  double clock = 0.0;
  bool saw_edge = false;
  const double eps = 1e-9;

  while (true) {
    std::size_t best = ns;
    for (std::size_t s = 0; s < ns; ++s) {
      if (cursor[s] >= inputs[s].edges.size()) continue;
      if (best == ns ||
          inputs[s].edges[cursor[s]].ts < inputs[best].edges[cursor[best]].ts)
        best = s;
    }
    if (best == ns) break;

    const TimedEdge& e = inputs[best].edges[cursor[best]++];
    auto& counters = report.streams[best];

    if (!valid_tag(e.src) || !valid_tag(e.dst)) {
      ++counters.invalid_tag;
      continue;
    }

    if (e.ts > clock) {
      clock = e.ts;
      while (cfg.window.close_time(next_close) + eps < clock)
        close_window(next_close++);
    }
    saw_edge = true;

    auto windows = windows_for(e.ts, cfg.window);
    bool routed = false;
    bool covered = !windows.empty();
    for (long w : windows) {
      if (w < next_close) continue;
      reservoir(best, w).offer(e);
      routed = true;
    }
    if (routed)
      ++counters.routed;
    else if (covered)
      ++counters.stale;
  }

  // Close everything opened before the end of input.
  double end_time = cfg.end_time >= 0 ? cfg.end_time : (saw_edge ? clock : 0.0);
  long last =
      std::max<long>(next_close - 1,
                     static_cast<long>(std::ceil(end_time / cfg.window.lambda - eps)));
  while (next_close <= last) close_window(next_close++);

  for (auto& [key, state] : pairs)
    report.rho[{state.s1, state.s2}] = state.history;
  report.stored_bytes = store.bytes_on_disk();

  if (!cfg.report_dir.empty()) {
    std::filesystem::create_directories(cfg.report_dir);

    std::ofstream win(cfg.report_dir / "windows.tsv", std::ios::trunc);
    win << "stream\twindow\tclose_time\tedges\tstored\tcomponent_sizes\n";
    for (const auto& st : report.window_stats) {
      win << st.stream << '\t' << st.window << '\t' << fmt_time(st.close_time)
          << '\t' << st.edges_seen << '\t' << st.stored_clusters << '\t';
      for (std::size_t i = 0; i < st.component_sizes.size(); ++i) {
        if (i) win << ' ';
        win << st.component_sizes[i];
      }
      win << '\n';
    }

    for (const auto& [key, series] : report.rho) {
      std::ofstream rho_out(
          cfg.report_dir / ("rho_" + key.first + "_" + key.second + ".tsv"),
          std::ios::trunc);
      rho_out << "t\trho\trho_avg\n";
      auto avg = rho_averaged(series);
      std::unordered_map<double, double> avg_at;
      for (auto [t, v] : avg) avg_at[t] = v;
      for (auto [t, v] : series) {
        rho_out << fmt_time(t) << '\t' << v << '\t';
        auto it = avg_at.find(t);
        if (it != avg_at.end()) rho_out << it->second;
        rho_out << '\n';
      }
    }

    std::ofstream sum(cfg.report_dir / "summary.txt", std::ios::trunc);
    sum << report.to_text();
  }
  return report;
}

std::string PipelineReport::to_text() const {
  std::ostringstream out;
  out << "streams:\n";
  for (const auto& s : streams)
    out << "  " << s.name << ": lines=" << s.lines
        << " skipped=" << s.skipped_lines << " edges=" << s.edges
        << " routed=" << s.routed << " stale=" << s.stale
        << " invalid_tag=" << s.invalid_tag << '\n';
  out << "windows closed per stream: " << windows_closed << '\n';
  std::size_t stored = 0;
  for (const auto& st : window_stats) stored += st.stored_clusters;
  out << "clusters stored: " << stored << '\n';
  out << "input bytes: " << input_bytes << '\n';
  out << "stored bytes: " << stored_bytes << '\n';
  char ratio[64];
  std::snprintf(ratio, sizeof ratio, "%.2f", compression_ratio());
  out << "compression ratio: " << ratio << '\n';
  for (const auto& [key, series] : rho) {
    out << "rho " << key.first << " x " << key.second << ":";
    char buf[64];
    for (auto [t, v] : series) {
      std::snprintf(buf, sizeof buf, " (%g, %.4f)", t, v);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

std::vector<std::pair<std::string, std::string>> parse_kv_file(
    const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read config " + path.string());
  std::vector<std::pair<std::string, std::string>> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    strip_cr(line);
    std::size_t begin = line.find_first_not_of(" \t");
    if (begin == std::string::npos || line[begin] == '#') continue;
    std::size_t end = line.find_last_not_of(" \t");
    std::string body = line.substr(begin, end - begin + 1);
    std::size_t eq = body.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::runtime_error(path.string() + ":" + std::to_string(lineno) +
                               ": expected key=value");
    std::string key = body.substr(0, eq);
    std::string value = body.substr(eq + 1);
    while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
    std::size_t vb = value.find_first_not_of(" \t");
    value = vb == std::string::npos ? std::string() : value.substr(vb);
    kv.emplace_back(key, value);
  }
  return kv;
}

namespace {

double kv_double(const std::string& key, const std::string& value) {
  double out;
  if (!parse_double(value, out))
    throw std::runtime_error("config: bad number for " + key + ": " + value);
  return out;
}

long long kv_long(const std::string& key, const std::string& value) {
  long long out;
  if (!parse_long(value, out))
    throw std::runtime_error("config: bad integer for " + key + ": " + value);
  return out;
}

}  // namespace

PipelineConfig pipeline_config_from_kv(
    const std::vector<std::pair<std::string, std::string>>& kv) {
  PipelineConfig cfg;
  std::unordered_map<std::string, StreamSource::Format> formats;
  for (const auto& [key, value] : kv) {
    if (key == "tau")
      cfg.window.tau = kv_double(key, value);
    else if (key == "lambda")
      cfg.window.lambda = kv_double(key, value);
    else if (key == "k")
      cfg.window.k = static_cast<std::size_t>(kv_long(key, value));
    else if (key == "gamma")
      cfg.params.gamma = kv_double(key, value);
    else if (key == "alpha")
      cfg.params.alpha = static_cast<int>(kv_long(key, value));
    else if (key == "min_store")
      cfg.params.min_store = static_cast<int>(kv_long(key, value));
    else if (key == "seed")
      cfg.seed = static_cast<std::uint64_t>(kv_long(key, value));
    else if (key == "data_dir")
      cfg.data_dir = value;
    else if (key == "report_dir")
      cfg.report_dir = value;
    else if (key == "end_time")
      cfg.end_time = kv_double(key, value);
    else if (key.rfind("stream.", 0) == 0)
      cfg.streams.push_back({key.substr(7), value, StreamSource::Format::edges});
    else if (key.rfind("format.", 0) == 0) {
      if (value == "edges")
        formats[key.substr(7)] = StreamSource::Format::edges;
      else if (value == "tweets")
        formats[key.substr(7)] = StreamSource::Format::tweets;
      else
        throw std::runtime_error("config: unknown format: " + value);
    } else
      throw std::runtime_error("config: unknown key: " + key);
  }
  for (auto& s : cfg.streams) {
    auto it = formats.find(s.name);
    if (it != formats.end()) {
      s.format = it->second;
      formats.erase(it);
    }
  }
  if (!formats.empty())
    throw std::runtime_error("config: format for undeclared stream: " +
                             formats.begin()->first);
  return cfg;
}

GeneratorSpec generator_spec_from_kv(
    const std::vector<std::pair<std::string, std::string>>& kv) {
  GeneratorSpec spec;
  long long n = 1000;
  std::string dist_kind = "zipfian";
  std::vector<std::pair<int, double>> probs;
  for (const auto& [key, value] : kv) {
    if (key == "mode") {
      if (value == "uniform")
        spec.dynamics.mode = DynamicsMode::uniform;
      else if (value == "concentrated")
        spec.dynamics.mode = DynamicsMode::concentrated;
      else if (value == "step")
        spec.dynamics.mode = DynamicsMode::step;
      else
        throw std::runtime_error("config: unknown mode: " + value);
    } else if (key == "n")
      n = kv_long(key, value);
    else if (key == "q")
      spec.dynamics.q = static_cast<int>(kv_long(key, value));
    else if (key == "p_in")
      spec.dynamics.p_in = kv_double(key, value);
    else if (key == "tick_interval")
      spec.dynamics.tick_interval = kv_double(key, value);
    else if (key == "step_start")
      spec.dynamics.step_start = static_cast<long>(kv_long(key, value));
    else if (key == "step_length")
      spec.dynamics.step_length = static_cast<long>(kv_long(key, value));
    else if (key == "ticks")
      spec.ticks = static_cast<long>(kv_long(key, value));
    else if (key == "seed")
      spec.seed = static_cast<std::uint64_t>(kv_long(key, value));
    else if (key == "prefix")
      spec.prefix = value;
    else if (key == "s_size")
      spec.s_size = static_cast<std::size_t>(kv_long(key, value));
    else if (key == "dist")
      dist_kind = value;
    else if (key == "probs") {
      for (const auto& tok : split(value, ',')) {
        auto colon = tok.find(':');
        if (colon == std::string::npos)
          throw std::runtime_error("config: probs entries are deg:prob");
        probs.emplace_back(
            static_cast<int>(kv_long("probs", tok.substr(0, colon))),
            kv_double("probs", tok.substr(colon + 1)));
      }
    } else
      throw std::runtime_error("config: unknown key: " + key);
  }
  if (n < 1) throw std::runtime_error("config: n must be >= 1");
  if (dist_kind == "zipfian")
    spec.dist = DegreeDistribution::zipfian(static_cast<std::size_t>(n));
  else if (dist_kind == "explicit")
    spec.dist = DegreeDistribution::explicit_table(static_cast<std::size_t>(n),
                                                   std::move(probs));
  else
    throw std::runtime_error("config: unknown dist: " + dist_kind);
  return spec;
}

std::vector<TimedEdge> generate_stream(const GeneratorSpec& spec) {
  DynamicsConfig dyn = spec.dynamics;
  if (spec.s_size > 0) {
    if (spec.s_size > spec.dist.n)
      throw std::invalid_argument("generator: s_size exceeds n");
    auto degrees = sample_degrees(spec.dist, spec.seed);
    auto order = nodes_by_degree(degrees);
    dyn.S.assign(order.begin(), order.begin() + spec.s_size);
  }
  return stream_from_dynamics(dyn, spec.dist, spec.ticks, spec.seed, spec.prefix);
}

}  // namespace streamcorr
