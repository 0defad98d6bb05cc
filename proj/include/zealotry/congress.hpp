#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "zealotry/closed_form.hpp"
#include "zealotry/csv.hpp"
#include "zealotry/errors.hpp"
#include "zealotry/optimize.hpp"

namespace zealotry {

/// House composition for one congress, third parties removed.
struct CongressRecord {
  int congress = 0;
  long democrats = 0;
  long republicans = 0;

  long seats() const { return democrats + republicans; }
};

struct CongressSeries {
  std::vector<CongressRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }

  long min_democrats() const {
    long m = std::numeric_limits<long>::max();
    for (const auto& r : records) m = std::min(m, r.democrats);
    return m;
  }
  long min_republicans() const {
    long m = std::numeric_limits<long>::max();
    for (const auto& r : records) m = std::min(m, r.republicans);
    return m;
  }
  double mean_seats() const {
    double s = 0.0;
    for (const auto& r : records) s += static_cast<double>(r.seats());
    return records.empty() ? 0.0 : s / static_cast<double>(records.size());
  }
};

inline constexpr int kDemocratCode = 100;
inline constexpr int kRepublicanCode = 200;

struct RosterFilter {
  int first_congress = 80;
  int last_congress = 117;
  std::string chamber = "House";
};

namespace detail {

inline void check_series(const CongressSeries& series, const std::string& source) {
  if (series.empty()) throw InputError(source + ": no congress records");
  for (const auto& r : series.records) {
    if (r.democrats < 1 || r.republicans < 1) {
      throw InputError(source + ": congress " + std::to_string(r.congress) + " has a party with zero seats");
    }
  }
}

}  // namespace detail

/// Member roster with named columns congress, chamber, party_code and a member
/// identifier (icpsr or bioguide_id). Members are counted once per congress and
/// party; only party codes 100 (Democrat) and 200 (Republican) are kept.
inline CongressSeries parse_members(std::istream& is, const RosterFilter& filter = {},
                                    const std::string& source = "<roster>") {
  CsvReader csv(is, source);
  const std::size_t c_congress = csv.column("congress");
  const std::size_t c_chamber = csv.column("chamber");
  const std::size_t c_party = csv.column("party_code");
  const std::size_t c_member = csv.has_column("icpsr") ? csv.column("icpsr") : csv.column("bioguide_id");

  std::map<int, std::pair<std::set<std::string>, std::set<std::string>>> members;
  bool any_chamber = false;
  std::vector<std::string> row;
  while (csv.next(row)) {
    if (row[c_chamber] != filter.chamber) continue;
    any_chamber = true;
    const int congress = static_cast<int>(csv.integer(row, c_congress));
    if (congress < filter.first_congress || congress > filter.last_congress) continue;
    const int party = static_cast<int>(csv.integer(row, c_party));
    auto& slot = members[congress];
    if (party == kDemocratCode) slot.first.insert(row[c_member]);
    if (party == kRepublicanCode) slot.second.insert(row[c_member]);
  }
  if (!any_chamber) throw InputError(source + ": no " + filter.chamber + " records");

  CongressSeries series;
  for (int k = filter.first_congress; k <= filter.last_congress; ++k) {
    auto it = members.find(k);
    if (it == members.end()) throw InputError(source + ": congress " + std::to_string(k) + " is empty");
    series.records.push_back({k, static_cast<long>(it->second.first.size()),
                              static_cast<long>(it->second.second.size())});
  }
  detail::check_series(series, source);
  return series;
}

/// Pre-aggregated counts: columns `congress` (or `k`), `D`, `R`, optional `N`.
/// When present, N must equal D + R.
inline CongressSeries parse_counts(std::istream& is, const std::string& source = "<counts>") {
  CsvReader csv(is, source);
  const std::size_t c_id = csv.has_column("congress") ? csv.column("congress") : csv.column("k");
  const std::size_t c_d = csv.column("D");
  const std::size_t c_r = csv.column("R");
  const bool has_n = csv.has_column("N");
  const std::size_t c_n = has_n ? csv.column("N") : 0;

  CongressSeries series;
  std::vector<std::string> row;
  while (csv.next(row)) {
    CongressRecord rec{static_cast<int>(csv.integer(row, c_id)), csv.integer(row, c_d), csv.integer(row, c_r)};
    if (has_n && csv.integer(row, c_n) != rec.seats()) {
      throw ParseError(source, csv.line(), "N differs from D + R");
    }
    if (rec.democrats < 1 || rec.republicans < 1) {
      throw ParseError(source, csv.line(), "congress " + std::to_string(rec.congress) + " has a party with zero seats");
    }
    series.records.push_back(rec);
  }
  detail::check_series(series, source);
  return series;
}

/// Reads either format, chosen by the header: a `chamber` column marks a roster.
inline CongressSeries load_series(const std::string& path, const RosterFilter& filter = {}) {
  std::ifstream is(path);
  if (!is) throw InputError("cannot open " + path);
  std::string header;
  while (std::getline(is, header) && (header.empty() || header[0] == '#')) {
  }
  const bool roster = header.find("chamber") != std::string::npos;
  is.clear();
  is.seekg(0);
  return roster ? parse_members(is, filter, path) : parse_counts(is, path);
}

inline void write_counts(std::ostream& os, const CongressSeries& series) {
  os << "congress,D,R,N\n";
  for (const auto& r : series.records) os << r.congress << ',' << r.democrats << ',' << r.republicans << ',' << r.seats() << '\n';
}

// ---------------------------------------------------------------------------
// Empirical metrics

/// sigma-hat = (4/K) sum_k D_k R_k / (D_k + R_k)^2.
inline double empirical_sigma(const CongressSeries& series) {
  if (series.empty()) throw std::invalid_argument("empty series");
  double s = 0.0;
  for (const auto& r : series.records) {
    const double d = static_cast<double>(r.democrats), rr = static_cast<double>(r.republicans);
    s += d * rr / ((d + rr) * (d + rr));
  }
  return 4.0 * s / static_cast<double>(series.size());
}

/// rho-hat = (1/K) sum_k (2 D_k R_k - D_k z_R - R_k z_D) / (N_k (N_k - 1)).
/// The numerator counts directed links between free members of opposite parties
/// (both directions) plus links from zealots to free members of the other party.
inline double empirical_rho(const CongressSeries& series, double z_d, double z_r) {
  if (series.empty()) throw std::invalid_argument("empty series");
  double s = 0.0;
  for (const auto& r : series.records) {
    if (z_d > static_cast<double>(r.democrats) || z_r > static_cast<double>(r.republicans)) {
      throw std::invalid_argument("zealot counts exceed the party sizes of congress " + std::to_string(r.congress));
    }
    const double d = static_cast<double>(r.democrats), rr = static_cast<double>(r.republicans);
    const double n = d + rr;
    s += (2.0 * d * rr - d * z_r - rr * z_d) / (n * (n - 1.0));
  }
  return s / static_cast<double>(series.size());
}

// ---------------------------------------------------------------------------
// Zealot estimation

/// Population size fed to the complete-graph closed form for rho.
enum class PopulationConvention {
  /// N-bar = round(mean N_k).
  rounded_mean,
  /// Average of rho_complete(N_k, .) over congresses.
  per_congress,
};

struct ZealotEstimate {
  long z_d = 0;
  long z_r = 0;
  double sigma_hat = 0.0;
  double rho_hat = 0.0;
  double sigma = 0.0;
  double rho = 0.0;
  double epsilon = 0.0;
  double population = 0.0;
};

inline double theoretical_rho(const CongressSeries& series, PopulationConvention convention, double z_d,
                              double z_r) {
  if (convention == PopulationConvention::rounded_mean) {
    return rho_complete(std::round(series.mean_seats()), z_d, z_r);
  }
  double s = 0.0;
  for (const auto& r : series.records) s += rho_complete(static_cast<double>(r.seats()), z_d, z_r);
  return s / static_cast<double>(series.size());
}

/// Exhaustive search over {1..D_min} x {1..R_min} for the pair minimizing
/// epsilon = (|sigma-hat - sigma| + |rho-hat - rho|) / 2. Ties keep the
/// lexicographically smallest (z_D, z_R).
inline ZealotEstimate estimate_zealots(const CongressSeries& series,
                                       PopulationConvention convention = PopulationConvention::rounded_mean) {
  if (series.empty()) throw std::invalid_argument("empty series");
  const double sigma_hat = empirical_sigma(series);
  ZealotEstimate best;
  best.epsilon = std::numeric_limits<double>::infinity();
  const long d_min = series.min_democrats(), r_min = series.min_republicans();
  for (long zd = 1; zd <= d_min; ++zd) {
    for (long zr = 1; zr <= r_min; ++zr) {
      const double sigma = sigma_complete(static_cast<double>(zd), static_cast<double>(zr));
      const double rho = theoretical_rho(series, convention, static_cast<double>(zd), static_cast<double>(zr));
      const double rho_hat = empirical_rho(series, static_cast<double>(zd), static_cast<double>(zr));
      const double eps = (std::abs(sigma_hat - sigma) + std::abs(rho_hat - rho)) / 2.0;
      if (eps < best.epsilon) best = {zd, zr, sigma_hat, rho_hat, sigma, rho, eps, 0.0};
    }
  }
  best.population = convention == PopulationConvention::rounded_mean ? std::round(series.mean_seats())
                                                                      : series.mean_seats();
  return best;
}

// ---------------------------------------------------------------------------
// Backfire sweep

enum class Party { democrat, republican };

inline std::string_view to_string(Party p) { return p == Party::democrat ? "D" : "R"; }

enum class SweepProblem { diversity, active };

inline std::string_view to_string(SweepProblem p) { return p == SweepProblem::diversity ? "P2" : "P3"; }

struct SweepRow {
  double alpha = 0.0;
  Party party = Party::democrat;
  SweepProblem problem = SweepProblem::diversity;
  double z_star = 0.0;
  long long z_star_rounded = 0;
  double z_max = 0.0;
  /// Zealots of the other party after the backfire: estimate + alpha z_star.
  double z_other = 0.0;
  double sigma_at_star = 0.0;
  double rho_at_star = 0.0;
  double sigma_at_rounded = 0.0;
  double rho_at_rounded = 0.0;
};

/// For each alpha and acted-upon party X, solve (P2) and (P3) with z0 the other
/// party's estimated zealots and z1 the zealots of X, then evaluate sigma and
/// rho (closed forms at N-bar) on the post-intervention counts. The acted-upon
/// party plays opinion 1; both metrics are symmetric in the two counts.
inline std::vector<SweepRow> alpha_sweep(const CongressSeries& series, const ZealotEstimate& estimate,
                                         std::span<const double> alphas) {
  if (series.empty()) throw std::invalid_argument("empty series");
  const double n = std::round(series.mean_seats());
  std::vector<SweepRow> rows;
  for (double alpha : alphas) {
    for (Party party : {Party::democrat, Party::republican}) {
      const double other = static_cast<double>(party == Party::democrat ? estimate.z_r : estimate.z_d);
      const BackfireSpec spec{other, alpha, n};
      for (SweepProblem problem : {SweepProblem::diversity, SweepProblem::active}) {
        const OptimizationResult res =
            problem == SweepProblem::diversity ? solve_p2_diversity_complete(spec) : solve_p3_active_complete(spec);
        SweepRow row{alpha, party, problem, res.z1_star, res.z1_star_rounded, res.z1_max, res.post_z0};
        auto metrics = [&](double z1, double& sigma, double& rho) {
          const double z0 = other + alpha * z1;
          sigma = z0 + z1 > 0 ? sigma_complete(z0, z1) : 0.0;
          rho = z0 + z1 > 0 ? rho_complete(n, z0, std::min(z1, n - z0)) : 0.0;
        };
        metrics(res.z1_star, row.sigma_at_star, row.rho_at_star);
        metrics(static_cast<double>(res.z1_star_rounded), row.sigma_at_rounded, row.rho_at_rounded);
        rows.push_back(row);
      }
    }
  }
  return rows;
}

inline void write_sweep(std::ostream& os, std::span<const SweepRow> rows) {
  os << "alpha,party,problem,z_star,z_star_rounded,z_max,z_other,sigma_at_star,rho_at_star,sigma_at_rounded,"
        "rho_at_rounded\n";
  os.precision(17);
  for (const auto& r : rows) {
    os << r.alpha << ',' << to_string(r.party) << ',' << to_string(r.problem) << ',' << r.z_star << ','
       << r.z_star_rounded << ',' << r.z_max << ',' << r.z_other << ',' << r.sigma_at_star << ',' << r.rho_at_star
       << ',' << r.sigma_at_rounded << ',' << r.rho_at_rounded << '\n';
  }
}

}  // namespace zealotry
