#include "ips/mrftest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "ips/errors.hpp"
#include "ips/parallel.hpp"
#include "ips/rng.hpp"
#include "ips/sim.hpp"

namespace ips {

SummaryScheme default_scheme(double t) {
  return GridStatesScheme{{0.0, 0.5 * t, t}};
}

std::vector<std::int32_t> summarize(const Trajectory& x, VertexId v, const SummaryScheme& scheme,
                                    double t) {
  if (t <= 0 || t > x.horizon + 1e-12)
    throw input_error("summarize: t must lie in (0, horizon]");
  if (v < 0 || static_cast<std::size_t>(v) >= x.n_vertices())
    throw input_error("summarize: unknown vertex");
  const PathView view(x);

  std::vector<std::int32_t> code;
  if (const auto* gs = std::get_if<GridStatesScheme>(&scheme)) {
    if (gs->grid.empty()) throw input_error("summarize: empty grid");
    for (double s : gs->grid) {
      if (s < 0 || s > t) throw input_error("summarize: grid time outside [0, t]");
      const State val = s < t ? view.state_at(v, s) : view.state_before(v, t);
      code.push_back(static_cast<std::int32_t>(val));
    }
    return code;
  }
  const auto& js = std::get<JumpSignatureScheme>(scheme);
  if (js.max_jumps < 1) throw input_error("summarize: max_jumps must be >= 1");
  if (js.bin_edges.size() < 2 || js.bin_edges.front() != 0 || js.bin_edges.back() < t)
    throw input_error("summarize: bin edges must start at 0 and cover (0, t]");
  int emitted = 0;
  for (const Event& e : view.vertex_events(v)) {
    if (e.t >= t || emitted == js.max_jumps) break;
    const auto it = std::lower_bound(js.bin_edges.begin(), js.bin_edges.end(), e.t);
    code.push_back(static_cast<std::int32_t>(it - js.bin_edges.begin()));  // 1-based bin
    code.push_back(e.jump);
    ++emitted;
  }
  for (; emitted < js.max_jumps; ++emitted) {
    code.push_back(0);
    code.push_back(0);
  }
  return code;
}

namespace {

constexpr std::size_t kMinStratum = 5;

// Dictionary-coded per-sample block values.
struct CodedBlocks {
  std::vector<std::int32_t> a, b, s;
  std::size_t n_a = 0, n_b = 0, n_s = 0;
};

std::int32_t intern(std::map<std::vector<std::int32_t>, std::int32_t>& dict,
                    const std::vector<std::int32_t>& key) {
  return dict.emplace(key, static_cast<std::int32_t>(dict.size())).first->second;
}

double cmi_from_counts(const std::vector<std::int64_t>& n_abs,
                       const std::vector<std::int64_t>& n_as,
                       const std::vector<std::int64_t>& n_bs,
                       const std::vector<std::int64_t>& n_s, std::size_t n_a, std::size_t n_b,
                       std::size_t n_strata, double n_total) {
  double info = 0;
  for (std::size_t s = 0; s < n_strata; ++s) {
    for (std::size_t a = 0; a < n_a; ++a) {
      for (std::size_t b = 0; b < n_b; ++b) {
        const std::int64_t c = n_abs[(s * n_a + a) * n_b + b];
        if (c == 0) continue;
        info += static_cast<double>(c) *
                std::log(static_cast<double>(c) * static_cast<double>(n_s[s]) /
                         (static_cast<double>(n_as[s * n_a + a]) *
                          static_cast<double>(n_bs[s * n_b + b])));
      }
    }
  }
  return info / n_total;
}

CITestReport run_coded_test(CodedBlocks blocks, double level, int n_permutations,
                            std::uint64_t seed, int threads) {
  const std::size_t n = blocks.a.size();
  if (n == 0) throw insufficient_data_error("ci_test: empty ensemble");
  if (n_permutations < 1) throw input_error("ci_test: need at least one permutation");

  // Merge thin strata into a single "other" stratum.
  std::vector<std::int64_t> stratum_count(blocks.n_s, 0);
  for (std::int32_t s : blocks.s) ++stratum_count[s];
  std::vector<std::int32_t> remap(blocks.n_s, -1);
  std::int32_t next_id = 0;
  bool any_small = false;
  for (std::size_t s = 0; s < blocks.n_s; ++s) {
    if (stratum_count[s] >= static_cast<std::int64_t>(kMinStratum))
      remap[s] = next_id++;
    else
      any_small = true;
  }
  const std::int32_t other = any_small ? next_id++ : -1;
  for (std::size_t s = 0; s < blocks.n_s; ++s)
    if (remap[s] < 0) remap[s] = other;
  const auto n_strata = static_cast<std::size_t>(next_id);
  for (auto& s : blocks.s) s = remap[s];

  if (n_strata == 1 && n < 10)
    throw insufficient_data_error("ci_test: a single stratum with fewer than 10 samples");

  const std::size_t n_a = blocks.n_a, n_b = blocks.n_b;
  std::vector<std::int64_t> n_abs(n_strata * n_a * n_b, 0), n_as(n_strata * n_a, 0),
      n_bs(n_strata * n_b, 0), n_s(n_strata, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t s = blocks.s[i], a = blocks.a[i], b = blocks.b[i];
    ++n_abs[(s * n_a + a) * n_b + b];
    ++n_as[s * n_a + a];
    ++n_bs[s * n_b + b];
    ++n_s[s];
  }
  const double observed =
      cmi_from_counts(n_abs, n_as, n_bs, n_s, n_a, n_b, n_strata, static_cast<double>(n));

  // Sample positions grouped by stratum, in sample order.
  std::vector<std::vector<std::int32_t>> positions(n_strata);
  for (std::size_t i = 0; i < n; ++i)
    positions[blocks.s[i]].push_back(static_cast<std::int32_t>(i));

  // Shuffling a-codes within strata leaves every marginal fixed; only the
  // joint (a, b) cells need recounting per permutation.
  const auto perm_stats = replicate_map<double>(
      static_cast<std::size_t>(n_permutations), seed, threads,
      [&](std::size_t, std::uint64_t perm_seed) {
        Rng rng(perm_seed);
        std::vector<std::int64_t> counts(n_strata * n_a * n_b, 0);
        std::vector<std::int32_t> shuffled;
        for (std::size_t s = 0; s < n_strata; ++s) {
          const auto& pos = positions[s];
          shuffled.resize(pos.size());
          for (std::size_t i = 0; i < pos.size(); ++i) shuffled[i] = blocks.a[pos[i]];
          for (std::size_t i = pos.size(); i > 1; --i)
            std::swap(shuffled[i - 1], shuffled[rng.below(i)]);
          for (std::size_t i = 0; i < pos.size(); ++i)
            ++counts[(s * n_a + shuffled[i]) * n_b + blocks.b[pos[i]]];
        }
        return cmi_from_counts(counts, n_as, n_bs, n_s, n_a, n_b, n_strata,
                               static_cast<double>(n));
      });

  std::size_t exceed = 0;
  for (double stat : perm_stats)
    if (stat >= observed) ++exceed;

  CITestReport report;
  report.cmi = observed;
  report.p_value = static_cast<double>(1 + exceed) / static_cast<double>(1 + n_permutations);
  report.n_samples = n;
  report.n_permutations = n_permutations;
  report.level = level;
  report.reject = report.p_value < level;
  report.n_strata = n_strata;
  return report;
}

// Combined (mark, summary) code of one vertex in one sample.
std::vector<std::int32_t> vertex_code(const Mark& mark, const std::vector<std::int32_t>& summary) {
  std::vector<std::int32_t> code;
  code.reserve(summary.size() + 1);
  // integer marks coded directly, anything else by hashing its serialization
  code.push_back(mark.is_number_integer() ? mark.get<std::int32_t>()
                                          : static_cast<std::int32_t>(
                                                std::hash<std::string>{}(mark.dump()) & 0x7fffffff));
  code.insert(code.end(), summary.begin(), summary.end());
  return code;
}

CodedBlocks code_blocks(std::span<const std::vector<std::int32_t>> per_vertex_codes,
                        std::size_t n_samples, const VertexSet& a, const VertexSet& b,
                        const VertexSet& s) {
  CodedBlocks out;
  out.a.resize(n_samples);
  out.b.resize(n_samples);
  out.s.resize(n_samples);
  std::map<std::vector<std::int32_t>, std::int32_t> dict_a, dict_b, dict_s;
  std::vector<std::int32_t> key;
  const std::size_t n_vertices = per_vertex_codes.size() / n_samples;
  for (std::size_t i = 0; i < n_samples; ++i) {
    const auto encode = [&](const VertexSet& block, auto& dict) {
      key.clear();
      for (VertexId v : block.members()) {
        const auto& code = per_vertex_codes[i * n_vertices + static_cast<std::size_t>(v)];
        key.insert(key.end(), code.begin(), code.end());
        key.push_back(INT32_MIN);  // separator
      }
      return intern(dict, key);
    };
    out.a[i] = encode(a, dict_a);
    out.b[i] = encode(b, dict_b);
    out.s[i] = encode(s, dict_s);
  }
  out.n_a = dict_a.size();
  out.n_b = dict_b.empty() ? 1 : dict_b.size();
  out.n_s = dict_s.empty() ? 1 : dict_s.size();
  if (out.n_a == 0) out.n_a = 1;
  return out;
}

void check_blocks(const MarkedGraph& g, const VertexSet& a, const VertexSet& b,
                  const VertexSet& s) {
  g.check_subset(a);
  g.check_subset(b);
  g.check_subset(s);
  if (!a.disjoint_with(b) || !a.disjoint_with(s) || !b.disjoint_with(s))
    throw input_error("ci_test: blocks must be pairwise disjoint");
  if (a.empty() || b.empty()) throw input_error("ci_test: blocks a and b must be nonempty");
}

}  // namespace

CITestReport ci_test(std::span<const EnsembleSample> ensemble, const VertexSet& a,
                     const VertexSet& b, const VertexSet& s, const SummaryScheme& scheme,
                     double t, double level, int n_permutations, std::uint64_t seed,
                     int threads) {
  if (ensemble.empty()) throw insufficient_data_error("ci_test: empty ensemble");
  const std::size_t n_vertices = ensemble.front().traj.n_vertices();
  std::vector<std::vector<std::int32_t>> codes(ensemble.size() * n_vertices);
  const VertexSet all = a.set_union(b).set_union(s);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    if (ensemble[i].marks.size() != n_vertices || ensemble[i].traj.n_vertices() != n_vertices)
      throw input_error("ci_test: ragged ensemble");
    for (VertexId v : all.members())
      codes[i * n_vertices + static_cast<std::size_t>(v)] =
          vertex_code(ensemble[i].marks[v], summarize(ensemble[i].traj, v, scheme, t));
  }
  CITestReport report = run_coded_test(code_blocks(codes, ensemble.size(), a, b, s), level,
                                       n_permutations, seed, threads);
  report.a.assign(a.members().begin(), a.members().end());
  report.b.assign(b.members().begin(), b.members().end());
  report.s.assign(s.members().begin(), s.members().end());
  return report;
}

std::vector<VertexSet> suite_blocks(const MarkedGraph& g, int alpha) {
  if (alpha < 1) throw input_error("mrf_suite: alpha must be >= 1");
  std::vector<VertexSet> blocks;
  for (std::size_t v = 0; v < g.size(); ++v) blocks.push_back(VertexSet({static_cast<VertexId>(v)}));
  for (const auto& [u, v] : g.edges()) blocks.push_back(VertexSet({u, v}));
  std::vector<VertexSet> out;
  for (const auto& a : blocks) {
    const VertexSet s = neighborhood(g, a, alpha);
    if (a.size() + s.size() < g.size()) out.push_back(a);  // nonempty remainder
  }
  return out;
}

SuiteResult mrf_suite(const MarkedGraph& g, const Model& m, const MarksSampler& sampler,
                      int alpha, double t, std::size_t n_samples, std::uint64_t seed,
                      const SuiteOptions& options) {
  if (n_samples < 10) throw insufficient_data_error("mrf_suite: too few samples");
  const SummaryScheme scheme =
      options.use_default_scheme ? default_scheme(t) : options.scheme;

  const auto a_blocks = suite_blocks(g, alpha);
  SuiteResult result;
  if (a_blocks.empty()) return result;

  // One ensemble, summarized per vertex as it is generated.
  const std::size_t n_vertices = g.size();
  std::vector<std::vector<std::int32_t>> codes(n_samples * n_vertices);
  parallel_for(n_samples, options.threads, [&](std::size_t i) {
    const auto draw = sample_replicate(g, m, sampler, t, VertexSet{}, seed_split(seed, i));
    for (std::size_t v = 0; v < n_vertices; ++v)
      codes[i * n_vertices + v] = vertex_code(
          draw.marks[v], summarize(draw.traj, static_cast<VertexId>(v), scheme, t));
  });

  result.bonferroni_level = options.level / static_cast<double>(a_blocks.size());
  for (std::size_t idx = 0; idx < a_blocks.size(); ++idx) {
    const VertexSet& a = a_blocks[idx];
    const VertexSet s = neighborhood(g, a, alpha);
    const VertexSet b = VertexSet::range(0, static_cast<VertexId>(g.size()))
                            .set_minus(a)
                            .set_minus(s);
    check_blocks(g, a, b, s);
    CITestReport report =
        run_coded_test(code_blocks(codes, n_samples, a, b, s), options.level,
                       options.n_permutations, seed_split(seed, 0xC1000000ULL + idx),
                       options.threads);
    report.a.assign(a.members().begin(), a.members().end());
    report.b.assign(b.members().begin(), b.members().end());
    report.s.assign(s.members().begin(), s.members().end());
    report.alpha = alpha;
    report.level = result.bonferroni_level;
    report.reject = report.p_value < result.bonferroni_level;
    result.any_rejection = result.any_rejection || report.reject;
    result.reports.push_back(std::move(report));
  }
  return result;
}

}  // namespace ips
