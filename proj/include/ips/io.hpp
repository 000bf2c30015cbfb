#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "ips/graph.hpp"
#include "ips/model.hpp"
#include "ips/trajectory.hpp"

namespace ips {

// Graph files: {"vertices":[{"id":0,"mark":0},...],"edges":[[0,1],...]}.
// Ids must be exactly 0..n-1; duplicate ids, self-loops and duplicate edges
// are rejected.
MarkedGraph graph_from_json(const nlohmann::json& j);
nlohmann::json graph_to_json(const MarkedGraph& g);
MarkedGraph load_graph(const std::string& path);

// Model configs: {"name":"contact","params":{"lambda":1.5,"mu":1.0}} or
// {"name":"counterexample"}.
Model model_from_json(const nlohmann::json& j);
Model load_model(const std::string& path);

// Marks samplers: either a single distribution applied to every vertex or
// {"default":{...},"overrides":{"2":{...}}}. Distributions:
//   {"type":"fixed","value":<mark>} | {"type":"bernoulli","p":0.5} |
//   {"type":"choice","values":[...]} | {"type":"graph"} (use graph marks).
MarksSampler marks_sampler_from_json(const nlohmann::json& j, const MarkedGraph& g);
MarksSampler load_marks_sampler(const std::string& path, const MarkedGraph& g);

// Trajectory logs: JSONL with one header line
//   {"horizon":T,"initial":{"0":s0,...},"seed":S}
// followed by one line per event {"t":..,"v":..,"j":..,"s":..}. Loading
// re-validates the state chain, so corrupted logs are rejected.
void save_trajectory(const Trajectory& x, std::uint64_t seed, const std::string& path);
std::string trajectory_to_jsonl(const Trajectory& x, std::uint64_t seed);
Trajectory load_trajectory(const std::string& path);
Trajectory trajectory_from_jsonl(const std::string& text);

nlohmann::json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

/// Stable stringification for result files: shortest round-trip for doubles.
std::string format_double(double x);

/// FNV-1a hash of a canonical pmf rendering, for result-file checksums.
std::string pmf_checksum(const std::vector<std::vector<std::int32_t>>& atoms,
                         const std::vector<double>& probs);

}  // namespace ips
