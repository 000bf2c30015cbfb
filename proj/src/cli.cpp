#include "ips/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <limits>

#include <CLI11.hpp>

#include "ips/errors.hpp"
#include "ips/girsanov.hpp"
#include "ips/io.hpp"
#include "ips/mrftest.hpp"
#include "ips/oracle.hpp"
#include "ips/parallel.hpp"
#include "ips/reproduce.hpp"
#include "ips/sim.hpp"

namespace ips {

namespace {

VertexSet parse_vertex_list(const std::string& text) {
  std::vector<VertexId> ids;
  std::string token;
  for (char c : text + ",") {
    if (c == ',') {
      if (!token.empty()) {
        ids.push_back(static_cast<VertexId>(std::stol(token)));
        token.clear();
      }
    } else {
      token += c;
    }
  }
  return VertexSet(std::move(ids));
}

std::vector<double> parse_double_list(const std::string& text) {
  std::vector<double> out;
  std::string token;
  for (char c : text + ",") {
    if (c == ',') {
      if (!token.empty()) {
        out.push_back(std::stod(token));
        token.clear();
      }
    } else {
      token += c;
    }
  }
  return out;
}

// "A=0;B=2;S=1" with comma-separated ids per block.
struct BlockSpec {
  VertexSet a, b, s;
};

BlockSpec parse_blocks(const std::string& text) {
  BlockSpec spec;
  std::string rest = text;
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    const std::string part = rest.substr(0, semi);
    rest = semi == std::string::npos ? "" : rest.substr(semi + 1);
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw input_error("bad block spec \"" + part + "\"");
    const std::string key = part.substr(0, eq);
    const VertexSet ids = parse_vertex_list(part.substr(eq + 1));
    if (key == "A" || key == "a")
      spec.a = ids;
    else if (key == "B" || key == "b")
      spec.b = ids;
    else if (key == "S" || key == "s")
      spec.s = ids;
    else
      throw input_error("bad block name \"" + key + "\" (expected A, B or S)");
  }
  return spec;
}

MarksSampler sampler_for(const MarkedGraph& g, const std::string& marks_path) {
  if (marks_path.empty()) return MarksSampler::fixed(g.marks());
  return load_marks_sampler(marks_path, g);
}

int cmd_simulate(const std::string& graph_path, const std::string& model_path, double horizon,
                 const std::string& frozen_list, std::size_t reps, std::uint64_t seed,
                 const std::string& out_dir, const std::string& marks_path, int threads) {
  const MarkedGraph g = load_graph(graph_path);
  const Model m = load_model(model_path);
  const VertexSet frozen = parse_vertex_list(frozen_list);
  const MarksSampler sampler = sampler_for(g, marks_path);
  std::filesystem::create_directories(out_dir);
  std::vector<std::string> logs(reps);
  parallel_for(reps, threads, [&](std::size_t k) {
    const std::uint64_t rep_seed = seed_split(seed, k);
    const auto draw = sample_replicate(g, m, sampler, horizon, frozen, rep_seed);
    logs[k] = trajectory_to_jsonl(draw.traj, rep_seed);
  });
  for (std::size_t k = 0; k < reps; ++k) {
    char name[32];
    std::snprintf(name, sizeof(name), "rep_%06zu.jsonl", k);
    write_text_file((std::filesystem::path(out_dir) / name).string(), logs[k]);
  }
  std::cout << "wrote " << reps << " trajectories to " << out_dir << "\n";
  return 0;
}

int cmd_weight(const std::string& graph_path, const std::string& model_path,
               const std::string& traj_path, const std::string& w_list, double t, bool open) {
  const MarkedGraph g = load_graph(graph_path);
  const Model m = load_model(model_path);
  const Trajectory xhat = load_trajectory(traj_path);
  const VertexSet w = parse_vertex_list(w_list);
  const LikelihoodWeight lw = weight(m, g, xhat, w, t, open);
  nlohmann::json out;
  out["value"] = lw.value();
  if (lw.weight_is_zero)
    out["log_value"] = nullptr;
  else
    out["log_value"] = lw.log_value();
  out["log_jump_term"] = lw.log_jump_term;
  out["compensator"] = lw.compensator;
  out["quad_error"] = lw.quad_error;
  out["weight_is_zero"] = lw.weight_is_zero;
  nlohmann::json pv = nlohmann::json::object();
  for (const auto& [v, lg] : lw.per_vertex) pv[std::to_string(v)] = lg;
  out["per_vertex"] = pv;
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_importance(const std::string& graph_path, const std::string& model_path,
                   const std::string& marks_path, const std::string& w_list, double horizon,
                   VertexId f_vertex, double f_time, State f_value, std::size_t reps,
                   std::uint64_t seed, int threads) {
  const MarkedGraph g = load_graph(graph_path);
  const Model m = load_model(model_path);
  const VertexSet w = parse_vertex_list(w_list);
  const MarksSampler sampler = sampler_for(g, marks_path);
  g.check_vertex(f_vertex);
  if (f_time <= 0 || f_time > horizon) throw input_error("importance: --f-time outside (0, horizon]");
  const PathFunctional f = [f_vertex, f_time, f_value](std::span<const Mark>,
                                                       const Trajectory& x) {
    return PathView(x).state_before(f_vertex, f_time) == f_value ? 1.0 : 0.0;
  };
  const Estimate est = importance_estimate(m, g, sampler, w, horizon, f, reps, seed, threads);
  std::cout << "estimate,std_error,n_reps,seed\n"
            << format_double(est.estimate) << "," << format_double(est.std_error) << ","
            << est.n_reps << "," << seed << "\n";
  return 0;
}

int cmd_oracle(const std::string& graph_path, const std::string& model_path,
               const std::string& marks_path, const std::string& grid_list,
               const std::vector<std::string>& cmi_specs) {
  const MarkedGraph g = load_graph(graph_path);
  const Model m = load_model(model_path);
  const MarksSampler sampler = sampler_for(g, marks_path);
  const std::vector<double> grid = parse_double_list(grid_list);
  const FinitePMF initial = initial_pmf_from_marks(m, sampler);
  const ConfigurationChain chain = build_chain(g, m, pmf_support(initial));
  const FinitePMF law = grid_path_law(chain, initial, grid);

  nlohmann::json out;
  out["n_states"] = chain.states.size();
  out["grid"] = grid;
  out["n_atoms"] = law.size();
  out["pmf_checksum"] = pmf_checksum(law.atoms, law.probs);
  out["cmi"] = nlohmann::json::array();
  for (const std::string& spec_text : cmi_specs) {
    const BlockSpec spec = parse_blocks(spec_text);
    const auto coords = [&](const VertexSet& block) {
      std::vector<int> idx;
      for (std::size_t i = 0; i < grid.size(); ++i)
        for (VertexId v : block.members())
          idx.push_back(static_cast<int>(i * g.size() + static_cast<std::size_t>(v)));
      return idx;
    };
    const double value = conditional_mutual_information(law, coords(spec.a), coords(spec.b),
                                                        coords(spec.s));
    nlohmann::json entry;
    entry["A"] = spec.a.members();
    entry["B"] = spec.b.members();
    entry["S"] = spec.s.members();
    entry["value"] = value;
    out["cmi"].push_back(entry);
  }
  std::cout << out.dump() << "\n";
  return 0;
}

int cmd_mrf_test(const std::string& graph_path, const std::string& model_path,
                 const std::string& marks_path, int alpha, double t, std::size_t samples,
                 std::uint64_t seed, double level, int perms, int threads,
                 const std::string& out_csv, bool expect_pass) {
  const MarkedGraph g = load_graph(graph_path);
  const Model m = load_model(model_path);
  const MarksSampler sampler = sampler_for(g, marks_path);
  SuiteOptions options;
  options.level = level;
  options.n_permutations = perms;
  options.threads = threads;
  const SuiteResult result = mrf_suite(g, m, sampler, alpha, t, samples, seed, options);

  std::string csv = "A,B,S,alpha,cmi,p_value,n_samples,n_permutations,level,reject\n";
  const auto join = [](const std::vector<VertexId>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
      if (i) s += ' ';
      s += std::to_string(ids[i]);
    }
    return s;
  };
  for (const auto& r : result.reports) {
    csv += join(r.a) + "," + join(r.b) + "," + join(r.s) + "," + std::to_string(r.alpha) + "," +
           format_double(r.cmi) + "," + format_double(r.p_value) + "," +
           std::to_string(r.n_samples) + "," + std::to_string(r.n_permutations) + "," +
           format_double(r.level) + "," + (r.reject ? "1" : "0") + "\n";
  }
  if (!out_csv.empty()) write_text_file(out_csv, csv);
  std::cout << csv;
  std::cout << (result.any_rejection ? "FAIL" : "PASS") << ": " << result.reports.size()
            << " partition(s) at Bonferroni level " << format_double(result.bonferroni_level)
            << "\n";
  return expect_pass && result.any_rejection ? 1 : 0;
}

int cmd_validate(const std::string& model_path, const std::string& graph_path,
                 std::uint64_t seed) {
  const Model m = load_model(model_path);
  const MarkedGraph g = graph_path.empty() ? path_graph(5) : load_graph(graph_path);
  validate_model(m, g, seed);
  std::cout << "model \"" << m.name << "\" satisfies its declared contract\n";
  return 0;
}

int cmd_reproduce(std::size_t samples, std::uint64_t seed, int threads) {
  const Example35Result r = example35_reproduction(samples, seed, threads);
  std::cout << "P(x0(0)=1 | x1(1-)=1) = " << format_double(r.p_end_given_middle) << "  ("
            << r.n_conditioned << " conditioned samples, target 0.5 +- "
            << format_double(r.four_std_errors) << ")\n";
  std::cout << "P(x0(0)=1 | x1(1-)=1, x2(0)=0) = " << format_double(r.p_end_given_both[0])
            << ", P(x0(0)=1 | x1(1-)=1, x2(0)=1) = " << format_double(r.p_end_given_both[1])
            << "  (target: 1 - x2(0) exactly)\n";
  std::cout << "complement relation x0(0) = 1 - x2(0) held on "
            << (r.complement_relation_held ? "every" : "NOT every") << " conditioned sample\n";
  for (const auto& rep : r.alpha1_suite.reports) {
    std::cout << "alpha=1 test A={" << rep.a.front() << "}: cmi=" << format_double(rep.cmi)
              << " p=" << format_double(rep.p_value) << (rep.reject ? " -> reject" : "")
              << "\n";
  }
  const bool ok = std::abs(r.p_end_given_middle - 0.5) <= r.four_std_errors &&
                  r.complement_relation_held && r.alpha1_suite.any_rejection;
  std::cout << (ok ? "PASS" : "FAIL")
            << ": conditional coin, complement relation, first-order rejection\n";
  return ok ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"Exact simulation and change-of-measure toolkit for locally interacting jump processes"};
  app.require_subcommand(1);
  int threads_flag = 0;

  std::string graph_path, model_path, marks_path, traj_path, out_path, frozen_list, w_list;
  std::string grid_list = "0,0.5,1";
  std::vector<std::string> cmi_specs;
  double horizon = 1.0, t = 1.0, level = 0.01, f_time = 1.0;
  std::size_t reps = 1000, samples = 10000;
  std::uint64_t seed = 1;
  int alpha = 2, perms = 999;
  VertexId f_vertex = 0;
  State f_value = 1;
  bool open_interval = false, expect_pass = false;

  auto* sim = app.add_subcommand("simulate", "simulate replicates and write JSONL logs");
  sim->add_option("--graph", graph_path)->required();
  sim->add_option("--model", model_path)->required();
  sim->add_option("--horizon", horizon)->required();
  sim->add_option("--frozen", frozen_list, "comma-separated vertex ids forced to unit rate");
  sim->add_option("--reps", reps);
  sim->add_option("--seed", seed);
  sim->add_option("--out", out_path)->required();
  sim->add_option("--marks", marks_path, "marks sampler JSON (default: graph marks)");
  sim->add_option("--threads", threads_flag);

  auto* wgt = app.add_subcommand("weight", "likelihood weight of a trajectory");
  wgt->add_option("--graph", graph_path)->required();
  wgt->add_option("--model", model_path)->required();
  wgt->add_option("--traj", traj_path)->required();
  wgt->add_option("--w", w_list)->required();
  wgt->add_option("--t", t)->required();
  wgt->add_flag("--open", open_interval, "product over jumps strictly before t");

  auto* imp = app.add_subcommand("importance", "importance-sampling estimate");
  imp->add_option("--graph", graph_path)->required();
  imp->add_option("--model", model_path)->required();
  imp->add_option("--marks", marks_path);
  imp->add_option("--w", w_list)->required();
  imp->add_option("--horizon", horizon)->required();
  imp->add_option("--f-vertex", f_vertex)->required();
  imp->add_option("--f-time", f_time)->required();
  imp->add_option("--f-value", f_value);
  imp->add_option("--reps", reps);
  imp->add_option("--seed", seed);
  imp->add_option("--threads", threads_flag);

  auto* orc = app.add_subcommand("oracle", "exact transient laws and conditional MI");
  orc->add_option("--graph", graph_path)->required();
  orc->add_option("--model", model_path)->required();
  orc->add_option("--marks", marks_path);
  orc->add_option("--grid", grid_list);
  orc->add_option("--cmi", cmi_specs, "block spec like A=0;B=2;S=1 (repeatable)");

  auto* mrf = app.add_subcommand("mrf-test", "conditional-independence test suite");
  mrf->add_option("--graph", graph_path)->required();
  mrf->add_option("--model", model_path)->required();
  mrf->add_option("--marks", marks_path);
  mrf->add_option("--alpha", alpha)->required();
  mrf->add_option("--t", t)->required();
  mrf->add_option("--samples", samples);
  mrf->add_option("--seed", seed);
  mrf->add_option("--level", level);
  mrf->add_option("--perms", perms);
  mrf->add_option("--threads", threads_flag);
  mrf->add_option("--out", out_path, "also write the CSV report here");
  mrf->add_flag("--expect-pass", expect_pass, "exit 1 if the suite rejects");

  auto* val = app.add_subcommand("validate-model", "fuzz a model against its contract");
  val->add_option("--model", model_path)->required();
  val->add_option("--graph", graph_path);
  val->add_option("--seed", seed);

  auto* rep = app.add_subcommand("reproduce-example-3-5",
                                 "three-vertex counterexample reproduction");
  rep->add_option("--samples", samples);
  rep->add_option("--seed", seed);
  rep->add_option("--threads", threads_flag);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    const int threads = resolve_threads(threads_flag);
    if (sim->parsed())
      return cmd_simulate(graph_path, model_path, horizon, frozen_list, reps, seed, out_path,
                          marks_path, threads);
    if (wgt->parsed())
      return cmd_weight(graph_path, model_path, traj_path, w_list, t, open_interval);
    if (imp->parsed())
      return cmd_importance(graph_path, model_path, marks_path, w_list, horizon, f_vertex,
                            f_time, f_value, reps, seed, threads);
    if (orc->parsed()) return cmd_oracle(graph_path, model_path, marks_path, grid_list, cmi_specs);
    if (mrf->parsed())
      return cmd_mrf_test(graph_path, model_path, marks_path, alpha, t, samples, seed, level,
                          perms, threads, out_path, expect_pass);
    if (val->parsed()) return cmd_validate(model_path, graph_path, seed);
    if (rep->parsed()) return cmd_reproduce(samples, seed, threads);
    std::cerr << "error: no subcommand\n";
    return 2;
  } catch (const input_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

int run_cli(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args);
}

}  // namespace ips
