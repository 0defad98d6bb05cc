// Command-line front end: network generation, equilibrium solves, simulation,
// zealot-placement optimizers and the House composition pipeline.
//
// Exit status: 0 success, 2 usage error, 3 input error, 4 numerical failure.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "zealotry/zealotry.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace zealotry;

namespace {

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2, kInput = 3, kNumerical = 4 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  double tolerance = 1e-10;
  std::size_t threads = 1;
};

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t k = 0; k < parts.size(); ++k) out += (k ? sep : "") + parts[k];
  return out;
}

/// "a:b:step" (inclusive), a comma list, or a single number.
std::vector<double> parse_grid(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError("bad number '" + s + "' in grid '" + text + "'");
    return v;
  };
  std::vector<double> out;
  if (text.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("grid must be start:stop:step, got '" + text + "'");
    const double start = number(parts[0]), stop = number(parts[1]), step = number(parts[2]);
    if (!(step > 0.0) || stop < start) throw UsageError("grid needs step > 0 and stop >= start: '" + text + "'");
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (std::size_t k = 0; k < count; ++k) {
      // Snap to 12 decimals so 0.15 prints as 0.15.
      out.push_back(std::round((start + static_cast<double>(k) * step) * 1e12) / 1e12);
    }
  } else {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  }
  if (out.empty()) throw UsageError("empty grid");
  return out;
}

// ---------------------------------------------------------------------------
// Run manifest

class Run {
 public:
  Run(const CLI::App& leaf, const Globals& globals, std::vector<std::string> argv)
      : globals_(globals), argv_(std::move(argv)) {
    std::vector<std::string> path;
    for (const CLI::App* a = &leaf; a->get_parent() != nullptr; a = a->get_parent()) path.insert(path.begin(), a->get_name());
    command_ = join(path, " ");
    params_["seed"] = globals.seed;
    params_["tolerance"] = globals.tolerance;
    params_["threads"] = globals.threads;
    for (const CLI::App* a = &leaf; a->get_parent() != nullptr; a = a->get_parent()) collect(*a);
    fs::create_directories(globals.out_dir);
  }

  const std::string& command() const { return command_; }

  /// Registers an output file and returns its full path.
  std::string output(const std::string& name) {
    outputs_.push_back(name);
    return (fs::path(globals_.out_dir) / name).string();
  }

  void write_header(std::ostream& os) const {
    os << "# zealotry " << ZEALOTRY_VERSION << '\n' << "# command: " << command_ << '\n';
    for (const auto& [key, value] : params_.items()) {
      os << "# " << key << ": " << (value.is_string() ? value.get<std::string>() : value.dump()) << '\n';
    }
  }

  std::ofstream open(const std::string& name) {
    const std::string path = output(name);
    std::ofstream os(path);
    if (!os) throw InputError("cannot write " + path);
    write_header(os);
    os.precision(17);
    return os;
  }

  void finish() const {
    json manifest;
    manifest["tool"] = "zealotry";
    manifest["version"] = ZEALOTRY_VERSION;
    manifest["command"] = command_;
    manifest["argv"] = argv_;
    manifest["parameters"] = params_;
    manifest["out_dir"] = globals_.out_dir;
    manifest["outputs"] = outputs_;
    std::ofstream os(fs::path(globals_.out_dir) / "manifest.json");
    if (!os) throw InputError("cannot write manifest in " + globals_.out_dir);
    os << manifest.dump(2) << '\n';
  }

 private:
  void collect(const CLI::App& app) {
    for (const CLI::Option* opt : app.get_options()) {
      const std::string name = opt->get_single_name();
      if (name == "help" || name == "version" || name == "config" || name == "out-dir" || name == "seed" ||
          name == "tolerance" || name == "threads") {
        continue;
      }
      std::string value = opt->count() > 0 ? join(opt->results(), ",") : opt->get_default_str();
      params_[name] = value;
    }
  }

  Globals globals_;
  std::vector<std::string> argv_;
  std::string command_;
  json params_ = json::object();
  std::vector<std::string> outputs_;
};

// ---------------------------------------------------------------------------
// Subcommand options

struct GenerateOpts {
  std::size_t n = 0;
  double density = 0.1;
  std::size_t m = 5;
  std::size_t z0 = 0;
  std::size_t z1 = 0;
  std::string weights = "uniform";
  std::string out = "network.net";
};

struct EquilibriumOpts {
  std::string network;
  std::string clock = "per-edge";
  std::size_t direct_limit = 300;
};

struct SimulateOpts {
  std::string network;
  double horizon = 50000.0;
  double burn_in = 10000.0;
  std::size_t sample_every = 100;
  std::size_t runs = 1;
  std::size_t batches = 20;
  std::string initial = "random";
  std::string clock = "per-node";
};

struct OptimizeOpts {
  double n = 0.0;
  double z0 = 0.0;
  std::string alpha = "0";
  double lambda = 0.5;
  std::string network;
  std::vector<NodeId> support;
  double target_tolerance = 1e-6;
  int max_iterations = 500;
};

struct CongressOpts {
  std::string data;
  int first = 80;
  int last = 117;
  std::string chamber = "House";
  std::string population = "rounded-mean";
  std::string alphas = "0:0.95:0.05";
  long z_d = 0;
  long z_r = 0;
};

UpdateClock parse_clock(const std::string& s) {
  if (s == "per-edge") return UpdateClock::per_edge;
  if (s == "per-node") return UpdateClock::per_node;
  throw UsageError("unknown clock '" + s + "' (per-edge or per-node)");
}

std::string clock_name(UpdateClock c) { return c == UpdateClock::per_edge ? "per-edge" : "per-node"; }

// ---------------------------------------------------------------------------
// Handlers

void save_network_with_header(Run& run, const Network& net, const std::string& name) {
  std::ofstream os = run.open(name);
  save_network(net, os);
}

int cmd_generate(Run& run, const std::string& kind, const GenerateOpts& o, const Globals& g) {
  const auto law = parse_weight_law(o.weights);
  if (!law) throw UsageError("unknown weight law '" + o.weights + "' (constant, uniform, exponential)");
  Network net;
  if (kind == "er") net = generate_erdos_renyi(o.n, o.density, o.z0, o.z1, *law, g.seed);
  if (kind == "ba") net = generate_barabasi_albert(o.n, o.m, o.z0, o.z1, *law, g.seed);
  if (kind == "complete") net = generate_complete(o.n, o.z0, o.z1);
  save_network_with_header(run, net, o.out);
  std::cout << "wrote " << (fs::path(g.out_dir) / o.out).string() << ": " << net.size() << " nodes, "
            << net.edge_count() << " edges, " << net.free_count() << " free\n";
  return kOk;
}

int cmd_equilibrium(Run& run, const EquilibriumOpts& o, const Globals& g) {
  const Network net = load_network(o.network);
  ActivationOptions opts;
  opts.solver.tolerance = g.tolerance;
  opts.solver.direct_limit = o.direct_limit;
  opts.clock = parse_clock(o.clock);
  const OpinionEquilibrium eq = solve_opinions(net, opts.solver);
  const ActivationEquilibrium act = solve_activation(net, eq, opts);

  {
    std::ofstream os = run.open("summary.csv");
    os << "nodes,free,x_bar_free,x_bar,sigma,rho,rho_w,rho_ordered_pairs,counted_edges,opinion_residual,"
          "pair_residual\n";
    os << net.size() << ',' << net.free_count() << ',' << eq.x_bar_free << ',' << eq.x_bar << ',' << eq.sigma << ','
       << act.rho << ',' << act.rho_w << ',' << act.rho_ordered_pairs << ',' << act.counted_edges << ','
       << eq.residual << ',' << act.residual << '\n';
  }
  {
    std::ofstream os = run.open("opinions.csv");
    write_opinion_table(os, net, eq);
  }
  {
    std::ofstream os = run.open("pairs.csv");
    write_pair_table(os, net, act);
  }
  std::cout.precision(10);
  std::cout << "x_bar = " << eq.x_bar << "  sigma = " << eq.sigma << "  rho = " << act.rho
            << "  rho_w = " << act.rho_w << "  (" << clock_name(act.clock) << " clock)\n";
  return kOk;
}

int cmd_simulate(Run& run, const SimulateOpts& o, const Globals& g) {
  if (!(o.horizon > o.burn_in)) throw UsageError("--horizon must exceed --burn-in");
  const Network net = load_network(o.network);
  SimulationConfig cfg;
  cfg.horizon = o.horizon;
  cfg.burn_in = o.burn_in;
  cfg.sample_every = o.sample_every;
  cfg.seed = g.seed;
  cfg.batches = o.batches;
  cfg.clock = parse_clock(o.clock);
  if (o.initial == "random") cfg.initial = InitialOpinions::uniform_random;
  else if (o.initial == "zero") cfg.initial = InitialOpinions::all_zero;
  else if (o.initial == "one") cfg.initial = InitialOpinions::all_one;
  else throw UsageError("unknown initial rule '" + o.initial + "' (random, zero, one)");
  try {
    cfg.check();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }

  // Replica 0 runs with the base seed, so its trace is the first run of the summary.
  const SimulationTrace first = simulate(net, cfg);
  const ReplicateSummary rep = o.runs == 1 ? ReplicateSummary{first.summary.x_bar, first.summary.rho,
                                                              first.summary.rho_w, {first.summary}}
                                           : replicate(net, cfg, o.runs, g.threads);

  const double nan = std::numeric_limits<double>::quiet_NaN();
  double th_x = nan, th_rho = nan, th_rho_w = nan, th_rho_unit = nan, th_rho_w_unit = nan;
  try {
    SolverOptions solver;
    solver.tolerance = g.tolerance;
    const auto eq = solve_opinions(net, solver);
    ActivationOptions edge_clock{solver, UpdateClock::per_edge};
    ActivationOptions unit_clock{solver, UpdateClock::per_node};
    const auto a = solve_activation(net, eq, edge_clock);
    const auto b = solve_activation(net, eq, unit_clock);
    th_x = eq.x_bar;
    th_rho = a.rho;
    th_rho_w = a.rho_w;
    th_rho_unit = b.rho;
    th_rho_w_unit = b.rho_w;
  } catch (const NumericalError& e) {
    std::cerr << "note: no equilibrium overlay: " << e.what() << '\n';
  }

  {
    std::ofstream os = run.open("trace.csv");
    write_trace(os, first);
  }
  {
    std::ofstream os = run.open("summary.csv");
    os << "estimator,mean,std_error,theory,abs_error,theory_unit_clock,abs_error_unit_clock\n";
    auto row = [&](const char* name, const Estimate& e, double th, double th_unit) {
      os << name << ',' << e.mean << ',' << e.std_error << ',' << th << ',' << std::abs(e.mean - th) << ','
         << th_unit << ',' << std::abs(e.mean - th_unit) << '\n';
    };
    row("x_bar", rep.x_bar, th_x, th_x);
    row("rho", rep.rho, th_rho, th_rho_unit);
    row("rho_w", rep.rho_w, th_rho_w, th_rho_w_unit);
  }
  if (o.runs > 1) {
    std::ofstream os = run.open("runs.csv");
    os << "run,seed,x_bar,rho,rho_w,samples\n";
    for (std::size_t r = 0; r < rep.runs.size(); ++r) {
      const auto& s = rep.runs[r];
      os << r << ',' << derive_seed(g.seed, r) << ',' << s.x_bar.mean << ',' << s.rho.mean << ',' << s.rho_w.mean
         << ',' << s.samples << '\n';
    }
  }
  std::cout.precision(6);
  std::cout << "runs = " << o.runs << "  samples/run = " << first.summary.samples << '\n'
            << "x_bar_hat = " << rep.x_bar.mean << " +- " << rep.x_bar.std_error << "   x_bar = " << th_x << '\n'
            << "rho_hat   = " << rep.rho.mean << " +- " << rep.rho.std_error << "   rho = " << th_rho
            << "   |rho_hat - rho| = " << std::abs(rep.rho.mean - th_rho) << '\n'
            << "rho_w_hat = " << rep.rho_w.mean << " +- " << rep.rho_w.std_error << "   rho_w = " << th_rho_w
            << "   |rho_w_hat - rho_w| = " << std::abs(rep.rho_w.mean - th_rho_w) << '\n';
  if (first.absorbed) {
    std::cout << "absorbed into consensus on opinion " << first.absorbed->opinion << " at t = " << first.absorbed->time
              << '\n';
  }
  return kOk;
}

int cmd_optimize_closed(Run& run, const std::string& problem, const OptimizeOpts& o) {
  std::ofstream os = run.open("result.csv");
  os << "problem,n,z0,alpha,lambda,z1_star,z1_star_rounded,objective_at_star,objective_at_rounded,z1_max,post_z0,"
        "post_z1\n";
  std::cout.precision(10);
  for (double alpha : parse_grid(o.alpha)) {
    const BackfireSpec spec{o.z0, alpha, o.n};
    OptimizationResult r;
    if (problem == "p1") r = solve_p1_target(spec, o.lambda);
    if (problem == "p2") r = solve_p2_diversity_complete(spec);
    if (problem == "p3") r = solve_p3_active_complete(spec);
    os << problem << ',' << o.n << ',' << o.z0 << ',' << detail::format_double(alpha) << ',';
    if (problem == "p1") os << o.lambda;
    os << ',' << r.z1_star << ',' << r.z1_star_rounded << ',' << r.objective_at_star << ',' << r.objective_at_rounded
       << ',' << r.z1_max << ',' << r.post_z0 << ',' << r.post_z1 << '\n';
    std::cout << problem << " alpha = " << alpha << ": z1* = " << r.z1_star << " (rounded " << r.z1_star_rounded
              << "), objective = " << r.objective_at_star << ", z1_max = " << r.z1_max << '\n';
  }
  return kOk;
}

int cmd_optimize_general(Run& run, const OptimizeOpts& o, const Globals& g) {
  const Network net = load_network(o.network);
  std::vector<NodeId> support = o.support;
  if (support.empty()) {
    for (NodeId i = 0; i < net.size(); ++i) {
      if (net.role(i) == NodeRole::zealot1) support.push_back(i);
    }
  }
  DiversityOptions opts;
  opts.tolerance = o.target_tolerance;
  opts.max_iterations = o.max_iterations;
  opts.solver.tolerance = g.tolerance;
  const DiversityResult r = solve_p_diversity_general(net, support, opts);
  {
    std::ofstream os = run.open("support_weights.csv");
    os << "dst,src,weight\n";
    for (const Edge& e : r.support_edges) os << e.dst << ',' << e.src << ',' << e.weight << '\n';
  }
  save_network_with_header(run, r.network, "optimized.net");
  {
    std::ofstream os = run.open("summary.csv");
    os << "x_bar,sigma,gap,iterations,support_size\n";
    os << r.x_bar << ',' << r.sigma << ',' << std::abs(r.x_bar - 0.5) << ',' << r.iterations << ','
       << support.size() << '\n';
  }
  std::cout.precision(12);
  std::cout << "x_bar = " << r.x_bar << "  sigma = " << r.sigma << "  after " << r.iterations << " iterations\n";
  return kOk;
}

CongressSeries load_congress(const CongressOpts& o) {
  return load_series(o.data, RosterFilter{o.first, o.last, o.chamber});
}

PopulationConvention parse_population(const std::string& s) {
  if (s == "rounded-mean") return PopulationConvention::rounded_mean;
  if (s == "per-congress") return PopulationConvention::per_congress;
  throw UsageError("unknown population convention '" + s + "' (rounded-mean or per-congress)");
}

void write_estimate(Run& run, const CongressSeries& series, const ZealotEstimate& est) {
  std::ofstream os = run.open("estimate.csv");
  os << "z_d,z_r,sigma_hat,rho_hat,sigma,rho,epsilon,population,d_min,r_min,congresses\n";
  os << est.z_d << ',' << est.z_r << ',' << est.sigma_hat << ',' << est.rho_hat << ',' << est.sigma << ','
     << est.rho << ',' << est.epsilon << ',' << est.population << ',' << series.min_democrats() << ','
     << series.min_republicans() << ',' << series.size() << '\n';
}

void write_series(Run& run, const CongressSeries& series) {
  std::ofstream os = run.open("counts.csv");
  write_counts(os, series);
}

int cmd_congress_estimate(Run& run, const CongressOpts& o) {
  const CongressSeries series = load_congress(o);
  const ZealotEstimate est = estimate_zealots(series, parse_population(o.population));
  write_series(run, series);
  write_estimate(run, series, est);
  std::cout.precision(6);
  std::cout << "K = " << series.size() << "  (D_min, R_min) = (" << series.min_democrats() << ", "
            << series.min_republicans() << ")  N_bar = " << est.population << '\n'
            << "(z_D, z_R) = (" << est.z_d << ", " << est.z_r << ")  sigma_hat = " << est.sigma_hat
            << "  rho_hat = " << est.rho_hat << "  epsilon = " << est.epsilon << '\n';
  return kOk;
}

int cmd_congress_sweep(Run& run, const CongressOpts& o) {
  const CongressSeries series = load_congress(o);
  ZealotEstimate est;
  if (o.z_d > 0 || o.z_r > 0) {
    if (o.z_d < 1 || o.z_r < 1) throw UsageError("--z-d and --z-r must be given together and be positive");
    est.z_d = o.z_d;
    est.z_r = o.z_r;
    est.sigma_hat = empirical_sigma(series);
    est.rho_hat = empirical_rho(series, static_cast<double>(o.z_d), static_cast<double>(o.z_r));
    est.population = std::round(series.mean_seats());
    est.sigma = sigma_complete(static_cast<double>(o.z_d), static_cast<double>(o.z_r));
    est.rho = rho_complete(est.population, static_cast<double>(o.z_d), static_cast<double>(o.z_r));
    est.epsilon = (std::abs(est.sigma_hat - est.sigma) + std::abs(est.rho_hat - est.rho)) / 2.0;
  } else {
    est = estimate_zealots(series, parse_population(o.population));
  }
  const std::vector<double> alphas = parse_grid(o.alphas);
  for (double a : alphas) {
    if (!(a >= 0.0 && a < 1.0)) throw UsageError("alpha grid values must lie in [0, 1)");
  }
  const auto rows = alpha_sweep(series, est, alphas);
  write_estimate(run, series, est);
  {
    std::ofstream os = run.open("sweep.csv");
    write_sweep(os, rows);
  }
  std::cout << "sweep over " << alphas.size() << " alpha values at (z_D, z_R) = (" << est.z_d << ", " << est.z_r
            << "): " << rows.size() << " rows\n";
  return kOk;
}

int cmd_congress_aggregate(Run& run, const CongressOpts& o) {
  std::ifstream is(o.data);
  if (!is) throw InputError("cannot open " + o.data);
  const CongressSeries series = parse_members(is, RosterFilter{o.first, o.last, o.chamber}, o.data);
  write_series(run, series);
  std::cout << "aggregated " << series.size() << " congresses; (D_min, R_min) = (" << series.min_democrats() << ", "
            << series.min_republicans() << ")\n";
  return kOk;
}

// ---------------------------------------------------------------------------

int run_cli(std::vector<std::string> args);

int dispatch(CLI::App& app, const std::vector<std::string>& args, Globals& g, GenerateOpts& gen,
             EquilibriumOpts& eqo, SimulateOpts& sim, OptimizeOpts& opt, CongressOpts& con,
             std::string& replay_manifest) {
  auto leaf = [&](CLI::App* sub) {
    while (!sub->get_subcommands().empty()) sub = sub->get_subcommands().front();
    return sub;
  };
  CLI::App* top = app.get_subcommands().front();
  CLI::App* cmd = leaf(top);
  const std::string name = top->get_name();

  if (name == "replay") {
    std::ifstream is(replay_manifest);
    if (!is) throw InputError("cannot open " + replay_manifest);
    json manifest;
    try {
      manifest = json::parse(is);
    } catch (const json::exception& e) {
      throw InputError(replay_manifest + ": " + e.what());
    }
    if (!manifest.contains("argv") || !manifest["argv"].is_array()) throw InputError(replay_manifest + ": no argv");
    std::vector<std::string> argv = manifest["argv"].get<std::vector<std::string>>();
    if (!argv.empty() && argv.front() == "replay") throw InputError("refusing to replay a replay");
    // A later --out-dir wins over the recorded one.
    if (app.get_option("--out-dir")->count() > 0) {
      argv.push_back("--out-dir");
      argv.push_back(g.out_dir);
    }
    return run_cli(argv);
  }

  Run run(*cmd, g, args);
  int code = kOk;
  if (name == "generate") code = cmd_generate(run, cmd->get_name(), gen, g);
  if (name == "equilibrium") code = cmd_equilibrium(run, eqo, g);
  if (name == "simulate") code = cmd_simulate(run, sim, g);
  if (name == "optimize") {
    code = cmd->get_name() == "p" ? cmd_optimize_general(run, opt, g) : cmd_optimize_closed(run, cmd->get_name(), opt);
  }
  if (name == "congress") {
    if (cmd->get_name() == "estimate") code = cmd_congress_estimate(run, con);
    if (cmd->get_name() == "sweep") code = cmd_congress_sweep(run, con);
    if (cmd->get_name() == "aggregate") code = cmd_congress_aggregate(run, con);
  }
  run.finish();
  return code;
}

int run_cli(std::vector<std::string> args) {
  CLI::App app{"Voter model with zealots: equilibria, simulation, zealot placement, House data"};
  app.set_version_flag("--version", ZEALOTRY_VERSION);
  app.fallthrough();
  app.require_subcommand(1);
  app.option_defaults()->always_capture_default()->take_last();
  app.set_config("--config", "", "TOML file with option defaults (command-line flags take precedence)");

  Globals g;
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--out-dir", g.out_dir, "Directory for outputs and manifest.json");
  app.add_option("--tolerance", g.tolerance, "Residual tolerance of iterative linear solves")
      ->check(CLI::PositiveNumber);
  app.add_option("--threads", g.threads, "Worker threads for replicated simulations")->check(CLI::PositiveNumber);

  GenerateOpts gen;
  auto* generate = app.add_subcommand("generate", "Write a network file")->require_subcommand(1);
  auto common_generate = [&](CLI::App* sub) {
    sub->add_option("--n", gen.n, "Number of nodes")->required();
    sub->add_option("--z0", gen.z0, "Number of opinion-0 zealots");
    sub->add_option("--z1", gen.z1, "Number of opinion-1 zealots");
    sub->add_option("--out", gen.out, "Network file name inside --out-dir");
  };
  auto* er = generate->add_subcommand("er", "Directed Erdos-Renyi graph");
  common_generate(er);
  er->add_option("--density", gen.density, "Edge probability");
  er->add_option("--weights", gen.weights, "Weight law: constant, uniform, exponential");
  auto* ba = generate->add_subcommand("ba", "Preferential attachment, both directions weighted independently");
  common_generate(ba);
  ba->add_option("--m", gen.m, "Links added per new node");
  ba->add_option("--weights", gen.weights, "Weight law: constant, uniform, exponential");
  common_generate(generate->add_subcommand("complete", "Complete unweighted graph"));

  EquilibriumOpts eqo;
  auto* equilibrium = app.add_subcommand("equilibrium", "Solve equilibrium opinions and pair disagreement");
  equilibrium->add_option("--network", eqo.network, "Network file")->required();
  equilibrium->add_option("--clock", eqo.clock, "Pair system clock: per-edge or per-node");
  equilibrium->add_option("--direct-limit", eqo.direct_limit, "Largest free-node count solved by factorization");

  SimulateOpts sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "Event-driven simulation with equilibrium overlay");
  simulate_cmd->add_option("--network", sim.network, "Network file")->required();
  simulate_cmd->add_option("--horizon", sim.horizon, "Simulated time units");
  simulate_cmd->add_option("--burn-in", sim.burn_in, "Time before sampling starts");
  simulate_cmd->add_option("--sample-every", sim.sample_every, "Updates between samples");
  simulate_cmd->add_option("--runs", sim.runs, "Independent replicas")->check(CLI::PositiveNumber);
  simulate_cmd->add_option("--batches", sim.batches, "Batches for the batch-means standard error");
  simulate_cmd->add_option("--initial", sim.initial, "Initial free opinions: random, zero, one");
  simulate_cmd->add_option("--clock", sim.clock, "Update clock: per-node (unit rate) or per-edge (rate d_i)");

  OptimizeOpts opt;
  auto* optimize = app.add_subcommand("optimize", "Zealot placement with backfire")->require_subcommand(1);
  auto closed = [&](const char* name, const char* what) {
    auto* sub = optimize->add_subcommand(name, what);
    sub->add_option("--n", opt.n, "Population size")->required();
    sub->add_option("--z0", opt.z0, "Opinion-0 zealots before the intervention")->required();
    sub->add_option("--alpha", opt.alpha, "Backfire intensity in [0, 1), or a grid start:stop:step");
    return sub;
  };
  closed("p1", "Steer the mean opinion to a target")->add_option("--lambda", opt.lambda, "Target mean opinion");
  closed("p2", "Maximize opinion diversity on the complete graph");
  closed("p3", "Maximize active-link density on the complete graph");
  auto* p = optimize->add_subcommand("p", "Balance opinions on a general network via opinion-1 zealot weights");
  p->add_option("--network", opt.network, "Network file")->required();
  p->add_option("--support", opt.support, "Opinion-1 zealots whose weights are optimized (default: all)")
      ->delimiter(',');
  p->add_option("--target-tolerance", opt.target_tolerance, "Accuracy on |x_bar - 1/2|");
  p->add_option("--max-iterations", opt.max_iterations, "Iteration budget");

  CongressOpts con;
  auto* congress = app.add_subcommand("congress", "House composition pipeline")->require_subcommand(1);
  auto data_opts = [&](CLI::App* sub, const char* what) {
    sub->add_option("--data", con.data, what)->required();
    sub->add_option("--first", con.first, "First congress kept from a roster");
    sub->add_option("--last", con.last, "Last congress kept from a roster");
    sub->add_option("--chamber", con.chamber, "Chamber kept from a roster");
  };
  auto* estimate = congress->add_subcommand("estimate", "Fit zealot counts by exhaustive search");
  data_opts(estimate, "Member roster or per-congress counts file");
  estimate->add_option("--population", con.population, "N used by the closed forms: rounded-mean or per-congress");
  auto* sweep = congress->add_subcommand("sweep", "Backfire sweep for both parties");
  data_opts(sweep, "Member roster or per-congress counts file");
  sweep->add_option("--population", con.population, "N used when estimating: rounded-mean or per-congress");
  sweep->add_option("--alphas", con.alphas, "Alpha grid start:stop:step or comma list");
  sweep->add_option("--z-d", con.z_d, "Use this Democrat zealot count instead of estimating");
  sweep->add_option("--z-r", con.z_r, "Use this Republican zealot count instead of estimating");
  auto* aggregate = congress->add_subcommand("aggregate", "Reduce a member roster to per-congress counts");
  data_opts(aggregate, "Member roster file");

  std::string replay_manifest;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest.json");
  replay->add_option("manifest", replay_manifest, "Manifest file")->required();

  std::vector<const char*> argv{"zealotry"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    return dispatch(app, args, g, gen, eqo, sim, opt, con, replay_manifest);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace

int main(int argc, char** argv) {
  return run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
