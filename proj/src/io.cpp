#include "ips/io.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "ips/errors.hpp"

namespace ips {

MarkedGraph graph_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("vertices") || !j.contains("edges"))
    throw input_error("graph file: expected object with \"vertices\" and \"edges\"");
  const auto& jv = j["vertices"];
  if (!jv.is_array() || jv.empty()) throw input_error("graph file: \"vertices\" must be a nonempty array");
  const std::size_t n = jv.size();
  std::vector<Mark> marks(n);
  std::set<VertexId> seen;
  for (const auto& entry : jv) {
    if (!entry.is_object() || !entry.contains("id") || !entry.contains("mark"))
      throw input_error("graph file: each vertex needs \"id\" and \"mark\"");
    const auto id = entry["id"].get<VertexId>();
    if (id < 0 || static_cast<std::size_t>(id) >= n)
      throw input_error("graph file: vertex ids must be dense 0..n-1, got id " +
                        std::to_string(id));
    if (!seen.insert(id).second)
      throw input_error("graph file: duplicate vertex id " + std::to_string(id));
    marks[id] = entry["mark"];
  }
  const auto& je = j["edges"];
  if (!je.is_array()) throw input_error("graph file: \"edges\" must be an array");
  std::vector<std::pair<VertexId, VertexId>> edges;
  for (const auto& e : je) {
    if (!e.is_array() || e.size() != 2)
      throw input_error("graph file: each edge must be a pair [u,v]");
    edges.emplace_back(e[0].get<VertexId>(), e[1].get<VertexId>());
  }
  return MarkedGraph(n, std::move(edges), std::move(marks));
}

nlohmann::json graph_to_json(const MarkedGraph& g) {
  nlohmann::json j;
  j["vertices"] = nlohmann::json::array();
  for (std::size_t v = 0; v < g.size(); ++v)
    j["vertices"].push_back({{"id", v}, {"mark", g.mark(static_cast<VertexId>(v))}});
  j["edges"] = nlohmann::json::array();
  for (const auto& [u, v] : g.edges()) j["edges"].push_back({u, v});
  return j;
}

MarkedGraph load_graph(const std::string& path) { return graph_from_json(read_json_file(path)); }

Model model_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string())
    throw input_error("model file: expected object with string field \"name\"");
  return make_builtin(j["name"].get<std::string>(),
                      j.contains("params") ? j["params"] : nlohmann::json::object());
}

Model load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

namespace {

MarkDist mark_dist_from_json(const nlohmann::json& j, const MarkedGraph& g, VertexId v) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw input_error("marks sampler: distribution needs a string field \"type\"");
  const std::string type = j["type"].get<std::string>();
  MarkDist d;
  if (type == "fixed") {
    if (!j.contains("value")) throw input_error("marks sampler: fixed needs \"value\"");
    d.kind = MarkDist::Kind::Fixed;
    d.value = j["value"];
  } else if (type == "bernoulli") {
    d.kind = MarkDist::Kind::Bernoulli;
    d.p = j.value("p", 0.5);
    if (d.p < 0 || d.p > 1) throw input_error("marks sampler: field \"p\" must lie in [0,1]");
  } else if (type == "choice") {
    if (!j.contains("values") || !j["values"].is_array() || j["values"].empty())
      throw input_error("marks sampler: choice needs a nonempty \"values\" array");
    d.kind = MarkDist::Kind::Choice;
    for (const auto& c : j["values"]) d.choices.push_back(c);
  } else if (type == "graph") {
    d.kind = MarkDist::Kind::Fixed;
    d.value = g.mark(v);
  } else {
    throw input_error("marks sampler: unknown type \"" + type + "\"");
  }
  return d;
}

}  // namespace

MarksSampler marks_sampler_from_json(const nlohmann::json& j, const MarkedGraph& g) {
  MarksSampler s;
  s.per_vertex.resize(g.size());
  nlohmann::json def = j;
  nlohmann::json overrides = nlohmann::json::object();
  if (j.is_object() && j.contains("default")) {
    def = j["default"];
    if (j.contains("overrides")) {
      overrides = j["overrides"];
      if (!overrides.is_object())
        throw input_error("marks sampler: \"overrides\" must map vertex ids to distributions");
    }
  }
  for (std::size_t v = 0; v < g.size(); ++v)
    s.per_vertex[v] = mark_dist_from_json(def, g, static_cast<VertexId>(v));
  for (const auto& [key, dist] : overrides.items()) {
    VertexId v{};
    const auto [ptr, ec] = std::from_chars(key.data(), key.data() + key.size(), v);
    if (ec != std::errc() || ptr != key.data() + key.size())
      throw input_error("marks sampler: override key \"" + key + "\" is not a vertex id");
    g.check_vertex(v);
    s.per_vertex[v] = mark_dist_from_json(dist, g, v);
  }
  return s;
}

MarksSampler load_marks_sampler(const std::string& path, const MarkedGraph& g) {
  return marks_sampler_from_json(read_json_file(path), g);
}

std::string trajectory_to_jsonl(const Trajectory& x, std::uint64_t seed) {
  nlohmann::json header;
  header["horizon"] = x.horizon;
  nlohmann::json initial = nlohmann::json::object();
  for (std::size_t v = 0; v < x.initial.size(); ++v)
    initial[std::to_string(v)] = x.initial[v];
  header["initial"] = initial;
  header["seed"] = seed;
  std::string out = header.dump();
  out += '\n';
  for (const Event& e : x.events) {
    nlohmann::json line;
    line["t"] = e.t;
    line["v"] = e.v;
    line["j"] = e.jump;
    line["s"] = e.state;
    out += line.dump();
    out += '\n';
  }
  return out;
}

void save_trajectory(const Trajectory& x, std::uint64_t seed, const std::string& path) {
  write_text_file(path, trajectory_to_jsonl(x, seed));
}

Trajectory trajectory_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw input_error("trajectory log: empty file");
  nlohmann::json header = nlohmann::json::parse(line, nullptr, false);
  if (header.is_discarded() || !header.contains("horizon") || !header.contains("initial"))
    throw input_error("trajectory log: malformed header line");
  Trajectory x;
  x.horizon = header["horizon"].get<double>();
  const auto& initial = header["initial"];
  x.initial.resize(initial.size());
  for (const auto& [key, val] : initial.items()) {
    const auto v = static_cast<std::size_t>(std::stoll(key));
    if (v >= x.initial.size())
      throw input_error("trajectory log: header field \"initial\" has non-dense ids");
    x.initial[v] = val.get<State>();
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json e = nlohmann::json::parse(line, nullptr, false);
    if (e.is_discarded() || !e.contains("t") || !e.contains("v") || !e.contains("j") ||
        !e.contains("s"))
      throw input_error("trajectory log: malformed event line: " + line);
    x.events.push_back({e["t"].get<double>(), e["v"].get<VertexId>(), e["j"].get<int>(),
                        e["s"].get<State>()});
  }
  x.validate();  // event logs are self-checking
  return x;
}

Trajectory load_trajectory(const std::string& path) {
  return trajectory_from_jsonl(read_text_file(path));
}

nlohmann::json read_json_file(const std::string& path) {
  const std::string text = read_text_file(path);
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw input_error("failed to parse JSON file " + path);
  return j;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw input_error("cannot open " + path + " for writing");
  out << text;
  if (!out) throw input_error("failed writing " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw input_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc()) throw numeric_error("format_double failed");
  return std::string(buf, ptr);
}

std::string pmf_checksum(const std::vector<std::vector<std::int32_t>>& atoms,
                         const std::vector<double>& probs) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  const auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
  };
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    for (std::int32_t v : atoms[i]) {
      mix(std::to_string(v));
      mix(",");
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), ":%.12e\n", probs[i]);
    mix(buf);
  }
  char out[20];
  std::snprintf(out, sizeof(out), "%016llx", static_cast<unsigned long long>(h));
  return std::string(out);
}

}  // namespace ips
