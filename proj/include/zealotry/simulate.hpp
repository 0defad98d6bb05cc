#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "zealotry/equilibrium.hpp"
#include "zealotry/network.hpp"

namespace zealotry {

enum class InitialOpinions { uniform_random, all_zero, all_one, explicit_vector };

struct SimulationConfig {
  double horizon = 50000.0;
  /// Samples are taken only once this much time has elapsed.
  double burn_in = 10000.0;
  /// Sampling cadence in updates (events), not time.
  std::size_t sample_every = 100;
  std::uint64_t seed = 0;
  InitialOpinions initial = InitialOpinions::uniform_random;
  /// Used with InitialOpinions::explicit_vector; one entry per node, zealot entries ignored.
  std::vector<std::uint8_t> initial_state;
  /// per_node: each free node updates at rate 1. per_edge: free node i updates at rate d_i.
  UpdateClock clock = UpdateClock::per_node;
  /// Number of batches for the batch-means standard error.
  std::size_t batches = 20;

  void check() const {
    if (!(horizon > 0.0) || !(burn_in >= 0.0) || !(burn_in < horizon)) {
      throw std::invalid_argument("need 0 <= burn_in < horizon");
    }
    if (sample_every < 1) throw std::invalid_argument("sample_every must be at least 1");
    if (batches < 2) throw std::invalid_argument("need at least 2 batches");
  }
};

struct Sample {
  double time;
  double x_bar;
  double rho;
  double rho_w;
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

struct SimulationSummary {
  Estimate x_bar;
  Estimate rho;
  Estimate rho_w;
  std::size_t samples = 0;
};

struct Absorption {
  double time;
  int opinion;
};

struct SimulationTrace {
  std::vector<Sample> samples;
  SimulationSummary summary;
  /// Set when the run reached a state with no active link, which no update can leave.
  std::optional<Absorption> absorbed;
  /// Per-node average opinion over the samples (zealots constant).
  std::vector<double> node_means;
  std::vector<std::uint8_t> final_state;
  std::size_t events = 0;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Time average with batch-means standard error over contiguous batches.
inline Estimate batch_means(const std::vector<double>& values, std::size_t batches) {
  Estimate est;
  if (values.empty()) return est;
  double sum = 0.0;
  for (double v : values) sum += v;
  est.mean = sum / static_cast<double>(values.size());
  const std::size_t b = std::min(batches, values.size());
  if (b < 2) return est;
  const std::size_t per = values.size() / b;
  const std::size_t skip = values.size() - per * b;
  std::vector<double> means(b, 0.0);
  for (std::size_t k = 0; k < b; ++k) {
    for (std::size_t t = 0; t < per; ++t) means[k] += values[skip + k * per + t];
    means[k] /= static_cast<double>(per);
  }
  double grand = 0.0;
  for (double m : means) grand += m;
  grand /= static_cast<double>(b);
  double ss = 0.0;
  for (double m : means) ss += (m - grand) * (m - grand);
  est.std_error = std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
  return est;
}

}  // namespace detail

/// Seed for replica `run`; replica 0 uses the base seed itself.
inline std::uint64_t derive_seed(std::uint64_t seed, std::size_t run) {
  return run == 0 ? seed : detail::splitmix64(seed ^ detail::splitmix64(run));
}

/// Event-driven simulation of the voter model with zealots.
///
/// With the per-node clock, inter-event times are Exponential(F) and the
/// updating free node is uniform; it adopts opinion 1 with probability
/// d_i^{-1} sum_j w_ij x_j. Active-link counts are maintained incrementally.
inline SimulationTrace simulate(const Network& net, const SimulationConfig& cfg) {
  cfg.check();
  require_valid(net);
  const std::size_t n = net.size();
  const auto free = net.free_nodes();
  const std::size_t f = free.size();
  if (f == 0) throw std::invalid_argument("simulation needs at least one free node");

  struct OutEdge {
    NodeId target;
    double weight;
  };
  std::vector<std::vector<OutEdge>> out(n);
  std::vector<double> degree(n, 0.0);
  double total_weight = 0.0;
  for (NodeId i : free) {
    for (const InEdge& e : net.in_edges(i)) {
      out[e.source].push_back({i, e.weight});
      degree[i] += e.weight;
      total_weight += e.weight;
    }
  }
  const std::size_t edge_count = net.edge_count();

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::uint8_t> x(n, 0);
  for (NodeId i = 0; i < n; ++i) {
    switch (net.role(i)) {
      case NodeRole::zealot0: x[i] = 0; break;
      case NodeRole::zealot1: x[i] = 1; break;
      case NodeRole::free:
        switch (cfg.initial) {
          case InitialOpinions::uniform_random: x[i] = std::bernoulli_distribution(0.5)(rng) ? 1 : 0; break;
          case InitialOpinions::all_zero: x[i] = 0; break;
          case InitialOpinions::all_one: x[i] = 1; break;
          case InitialOpinions::explicit_vector:
            if (cfg.initial_state.size() != n) throw std::invalid_argument("initial_state needs one entry per node");
            x[i] = cfg.initial_state[i] ? 1 : 0;
            break;
        }
        break;
    }
  }

  std::size_t ones = 0;
  for (auto v : x) ones += v;
  std::size_t active = 0;
  double active_weight = 0.0;
  for (NodeId i : free) {
    for (const InEdge& e : net.in_edges(i)) {
      if (x[i] != x[e.source]) {
        ++active;
        active_weight += e.weight;
      }
    }
  }

  double total_rate = static_cast<double>(f);
  std::discrete_distribution<std::size_t> pick_weighted;
  if (cfg.clock == UpdateClock::per_edge) {
    std::vector<double> rates(f);
    total_rate = 0.0;
    for (std::size_t a = 0; a < f; ++a) total_rate += rates[a] = degree[free[a]];
    pick_weighted = std::discrete_distribution<std::size_t>(rates.begin(), rates.end());
  }
  std::exponential_distribution<double> next_gap(total_rate);
  std::uniform_int_distribution<std::size_t> pick_uniform(0, f - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  SimulationTrace trace;
  std::vector<double> node_sums(n, 0.0);
  double t = 0.0;
  std::size_t events = 0;
  bool absorbed = active == 0;
  if (absorbed) trace.absorbed = Absorption{0.0, x[free[0]]};

  while (true) {
    t += next_gap(rng);
    if (t > cfg.horizon) break;
    ++events;
    if (!absorbed) {
      const std::size_t a = cfg.clock == UpdateClock::per_edge ? pick_weighted(rng) : pick_uniform(rng);
      const NodeId i = free[a];
      double pull = 0.0;
      for (const InEdge& e : net.in_edges(i)) pull += e.weight * x[e.source];
      const std::uint8_t next = unit(rng) * degree[i] < pull ? 1 : 0;
      if (next != x[i]) {
        // Every edge touching i flips between active and inactive.
        for (const InEdge& e : net.in_edges(i)) {
          if (x[e.source] == x[i]) {
            ++active;
            active_weight += e.weight;
          } else {
            --active;
            active_weight -= e.weight;
          }
        }
        for (const OutEdge& e : out[i]) {
          if (x[e.target] == x[i]) {
            ++active;
            active_weight += e.weight;
          } else {
            --active;
            active_weight -= e.weight;
          }
        }
        x[i] = next;
        ones = next ? ones + 1 : ones - 1;
        if (active == 0) {
          absorbed = true;
          trace.absorbed = Absorption{t, next};
          active_weight = 0.0;
        }
      }
    }
    if (t >= cfg.burn_in && events % cfg.sample_every == 0) {
      trace.samples.push_back({t, static_cast<double>(ones) / static_cast<double>(n),
                               static_cast<double>(active) / static_cast<double>(edge_count),
                               std::clamp(active_weight / total_weight, 0.0, 1.0)});
      for (NodeId i = 0; i < n; ++i) node_sums[i] += x[i];
    }
  }

  trace.events = events;
  trace.final_state = x;
  std::vector<double> xs, rs, rws;
  xs.reserve(trace.samples.size());
  rs.reserve(trace.samples.size());
  rws.reserve(trace.samples.size());
  for (const Sample& s : trace.samples) {
    xs.push_back(s.x_bar);
    rs.push_back(s.rho);
    rws.push_back(s.rho_w);
  }
  trace.summary.x_bar = detail::batch_means(xs, cfg.batches);
  trace.summary.rho = detail::batch_means(rs, cfg.batches);
  trace.summary.rho_w = detail::batch_means(rws, cfg.batches);
  trace.summary.samples = trace.samples.size();
  trace.node_means.assign(n, 0.0);
  if (!trace.samples.empty()) {
    for (NodeId i = 0; i < n; ++i) trace.node_means[i] = node_sums[i] / static_cast<double>(trace.samples.size());
  }
  return trace;
}

struct ReplicateSummary {
  Estimate x_bar;
  Estimate rho;
  Estimate rho_w;
  std::vector<SimulationSummary> runs;
};

/// Independent replicas with seeds derive_seed(cfg.seed, r), reduced to mean and
/// standard error across runs. A single run reports its batch-means error.
inline ReplicateSummary replicate(const Network& net, const SimulationConfig& cfg, std::size_t runs,
                                  std::size_t threads = 1) {
  if (runs < 1) throw std::invalid_argument("need at least one run");
  std::vector<SimulationSummary> results(runs);
  std::vector<std::exception_ptr> errors(runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t r; (r = next.fetch_add(1)) < runs;) {
      try {
        SimulationConfig c = cfg;
        c.seed = derive_seed(cfg.seed, r);
        results[r] = simulate(net, c).summary;
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  const std::size_t pool = std::clamp<std::size_t>(threads, 1, runs);
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::thread> workers;
    for (std::size_t k = 0; k < pool; ++k) workers.emplace_back(worker);
    for (auto& w : workers) w.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  ReplicateSummary out;
  out.runs = results;
  if (runs == 1) {
    out.x_bar = results[0].x_bar;
    out.rho = results[0].rho;
    out.rho_w = results[0].rho_w;
    return out;
  }
  auto reduce = [&](auto field) {
    Estimate est;
    for (const auto& r : results) est.mean += field(r);
    est.mean /= static_cast<double>(runs);
    double ss = 0.0;
    for (const auto& r : results) ss += (field(r) - est.mean) * (field(r) - est.mean);
    est.std_error = std::sqrt(ss / static_cast<double>(runs - 1) / static_cast<double>(runs));
    return est;
  };
  out.x_bar = reduce([](const SimulationSummary& s) { return s.x_bar.mean; });
  out.rho = reduce([](const SimulationSummary& s) { return s.rho.mean; });
  out.rho_w = reduce([](const SimulationSummary& s) { return s.rho_w.mean; });
  return out;
}

inline void write_trace(std::ostream& os, const SimulationTrace& trace) {
  os << "time,x_bar,rho,rho_w\n";
  os.precision(17);
  for (const Sample& s : trace.samples) os << s.time << ',' << s.x_bar << ',' << s.rho << ',' << s.rho_w << '\n';
}

}  // namespace zealotry
