#include "ips/reproduce.hpp"

#include <cmath>

#include "ips/errors.hpp"
#include "ips/parallel.hpp"
#include "ips/sim.hpp"

namespace ips {

Example35Result example35_reproduction(std::size_t n_samples, std::uint64_t seed, int threads,
                                       int n_permutations) {
  if (n_samples < 100) throw input_error("example35: need at least 100 samples");
  const MarkedGraph g = counterexample_graph();
  const Model m = make_counterexample_model();
  const MarksSampler sampler = counterexample_marks();
  const double t = 1.0;

  struct Row {
    bool conditioned;
    bool end_one;
    bool other_end_one;
  };
  const auto rows = replicate_map<Row>(
      n_samples, seed, threads, [&](std::size_t, std::uint64_t rep_seed) {
        const auto draw = sample_replicate(g, m, sampler, t, VertexSet{}, rep_seed);
        const PathView view(draw.traj);
        Row r{};
        r.conditioned = view.state_before(1, t) == 1;
        r.end_one = draw.traj.initial[0] == 1;
        r.other_end_one = draw.traj.initial[2] == 1;
        return r;
      });

  Example35Result out;
  out.n_samples = n_samples;
  out.complement_relation_held = true;
  std::size_t ones = 0;
  std::size_t by_other[2] = {0, 0}, ones_by_other[2] = {0, 0};
  for (const Row& r : rows) {
    if (!r.conditioned) continue;
    ++out.n_conditioned;
    if (r.end_one) ++ones;
    ++by_other[r.other_end_one];
    ones_by_other[r.other_end_one] += r.end_one;
    if (r.end_one != !r.other_end_one) out.complement_relation_held = false;
  }
  if (out.n_conditioned == 0) throw insufficient_data_error("example35: no conditioned samples");
  out.p_end_given_middle = static_cast<double>(ones) / static_cast<double>(out.n_conditioned);
  out.four_std_errors = 4.0 * std::sqrt(0.25 / static_cast<double>(out.n_conditioned));
  for (int k : {0, 1})
    out.p_end_given_both[k] =
        by_other[k] ? static_cast<double>(ones_by_other[k]) / static_cast<double>(by_other[k])
                    : 0.0;

  SuiteOptions options;
  options.level = 0.01;
  options.n_permutations = n_permutations;
  options.threads = threads;
  out.alpha1_suite = mrf_suite(g, m, sampler, /*alpha=*/1, t, n_samples,
                               seed_split(seed, 0xE35ULL), options);
  return out;
}

}  // namespace ips
