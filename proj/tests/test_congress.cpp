#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "zealotry/closed_form.hpp"
#include "zealotry/congress.hpp"

using namespace zealotry;

namespace {

CongressSeries series_of(std::initializer_list<std::pair<long, long>> counts) {
  CongressSeries s;
  int k = 80;
  for (auto [d, r] : counts) s.records.push_back({k++, d, r});
  return s;
}

// Each congress with N seats, the party split drawn near 55/45.
CongressSeries random_series(std::mt19937_64& rng, std::size_t k) {
  CongressSeries s;
  for (std::size_t c = 0; c < k; ++c) {
    const long n = std::uniform_int_distribution<long>(60, 90)(rng);
    const long d = std::uniform_int_distribution<long>(n / 3, 2 * n / 3)(rng);
    s.records.push_back({static_cast<int>(80 + c), d, n - d});
  }
  return s;
}

}  // namespace

TEST(ParseMembers, CountsUniqueMembersPerParty) {
  std::istringstream is(
      "congress,chamber,icpsr,party_code,bioname\n"
      "80,House,1,100,\"SMITH, John\"\n"
      "80,House,1,100,\"SMITH, John\"\n"
      "80,House,2,200,DOE\n"
      "80,House,3,328,INDEPENDENT\n"
      "80,Senate,4,100,SENATOR\n"
      "80,President,5,200,PRESIDENT\n"
      "81,House,1,100,SMITH\n"
      "81,House,6,100,ROE\n"
      "81,House,7,200.0,POE\n"
      "79,House,8,100,EARLY\n");
  const CongressSeries s = parse_members(is, {80, 81, "House"});
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.records[0].democrats, 1);
  EXPECT_EQ(s.records[0].republicans, 1);
  EXPECT_EQ(s.records[1].democrats, 2);
  EXPECT_EQ(s.records[1].republicans, 1);
}

TEST(ParseMembers, SenateOnly) {
  std::istringstream is("congress,chamber,icpsr,party_code\n80,Senate,1,100\n80,Senate,2,200\n");
  try {
    parse_members(is, {80, 80, "House"});
    FAIL() << "expected an input error";
  } catch (const InputError& e) {
    EXPECT_NE(std::string(e.what()).find("no House records"), std::string::npos);
  }
}

TEST(ParseMembers, MissingCongressOrColumn) {
  std::istringstream gap("congress,chamber,icpsr,party_code\n80,House,1,100\n80,House,2,200\n");
  EXPECT_THROW(parse_members(gap, {80, 81, "House"}), InputError);
  std::istringstream cols("congress,chamber,party_code\n80,House,100\n");
  EXPECT_THROW(parse_members(cols, {80, 80, "House"}), InputError);
}

TEST(ParseMembers, PartyWithoutSeats) {
  std::istringstream is("congress,chamber,icpsr,party_code\n80,House,1,100\n80,House,2,100\n");
  EXPECT_THROW(parse_members(is, {80, 80, "House"}), InputError);
}

TEST(ParseCounts, AcceptsEitherIdColumn) {
  std::istringstream a("congress,D,R,N\n80,188,246,434\n81,263,171,434\n");
  const auto s = parse_counts(a);
  ASSERT_EQ(s.size(), 2u);
  EXPECT_EQ(s.records[1].democrats, 263);
  std::istringstream b("k,D,R\n1,3,1\n");
  EXPECT_EQ(parse_counts(b).records[0].seats(), 4);
}

TEST(ParseCounts, Rejections) {
  std::istringstream zero("congress,D,R,N\n80,188,246,434\n81,0,171,171\n");
  try {
    parse_counts(zero, "counts.csv");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream mismatch("congress,D,R,N\n80,188,246,400\n");
  EXPECT_THROW(parse_counts(mismatch), ParseError);
  std::istringstream empty("congress,D,R\n");
  EXPECT_THROW(parse_counts(empty), InputError);
  std::istringstream bad("congress,D,R\n80,x,3\n");
  EXPECT_THROW(parse_counts(bad), ParseError);
}

TEST(WriteCounts, RoundTrip) {
  const auto s = series_of({{190, 250}, {260, 175}});
  std::stringstream ss;
  write_counts(ss, s);
  const auto back = parse_counts(ss);
  ASSERT_EQ(back.size(), 2u);
  EXPECT_EQ(back.records[1].congress, 81);
  EXPECT_EQ(back.records[1].republicans, 175);
}

TEST(EmpiricalSigma, Examples) {
  EXPECT_DOUBLE_EQ(empirical_sigma(series_of({{3, 1}})), 0.75);
  EXPECT_DOUBLE_EQ(empirical_sigma(series_of({{5, 5}, {200, 200}})), 1.0);
  EXPECT_THROW(empirical_sigma(CongressSeries{}), std::invalid_argument);
}

TEST(EmpiricalRho, Examples) {
  EXPECT_NEAR(empirical_rho(series_of({{3, 1}}), 1, 1), 1.0 / 6.0, 1e-15);
  const auto s = series_of({{10, 7}, {12, 9}});
  // (140 - 70 - 70) / 272 and (216 - 84 - 90) / 420.
  EXPECT_NEAR(empirical_rho(series_of({{10, 7}}), 10, 7), 0.0, 1e-15);
  EXPECT_NEAR(empirical_rho(s, 10, 7), 0.05, 1e-15);
  EXPECT_THROW(empirical_rho(s, 11, 1), std::invalid_argument);
}

TEST(EmpiricalRho, LinkDecomposition) {
  // Free-free links across parties in both directions, plus zealot-to-free links across parties.
  const long d = 40, r = 30, zd = 7, zr = 5;
  const double fd = d - zd, fr = r - zr;
  const double links = 2 * fd * fr + zd * fr + zr * fd;
  const double n = d + r;
  EXPECT_NEAR(empirical_rho(series_of({{d, r}}), zd, zr), links / (n * (n - 1)), 1e-15);
}

TEST(EmpiricalRho, NonIncreasingInZealots) {
  std::mt19937_64 rng(1);
  const auto s = random_series(rng, 10);
  for (long zd = 1; zd < s.min_democrats(); zd += 3) {
    for (long zr = 1; zr < s.min_republicans(); zr += 3) {
      EXPECT_LE(empirical_rho(s, zd + 1, zr), empirical_rho(s, zd, zr));
      EXPECT_LE(empirical_rho(s, zd, zr + 1), empirical_rho(s, zd, zr));
    }
  }
}

TEST(EstimateZealots, RecoversSyntheticPair) {
  // With constant N both empirical metrics depend on the series only through mean(D) and
  // mean(D R). Solve for the moments that make them equal the closed forms at (z_D, z_R),
  // then realize those moments with integer seat counts by local search.
  const long n = 101;
  const std::size_t k = 40;
  for (auto [zd, zr] : {std::pair{20L, 30L}, std::pair{12L, 18L}, std::pair{33L, 24L}}) {
    const double nn = static_cast<double>(n);
    const double target_dr = nn * nn * sigma_complete(zd, zr) / 4.0;
    const double target_d =
        (nn * (nn - 1) * rho_complete(nn, zd, zr) - 2 * target_dr + zd * nn) / static_cast<double>(zd - zr);
    ASSERT_GE(nn * target_d - target_dr - target_d * target_d, 0.0) << "moments not realizable";

    std::vector<long> d(k, std::lround(target_d));
    auto mismatch = [&] {
      double sd = 0.0, sdr = 0.0;
      for (long v : d) sd += v, sdr += static_cast<double>(v * (n - v));
      return std::abs(sd / k - target_d) * nn + std::abs(sdr / k - target_dr);
    };
    auto feasible = [&](long v) { return v >= zd && n - v >= zr; };
    // Single moves shift the mean; opposite moves on two congresses spread the split.
    for (bool improved = true; improved;) {
      improved = false;
      for (std::size_t a = 0; a < k; ++a) {
        for (std::size_t b = 0; b < k; ++b) {
          for (long step : {-1L, 1L}) {
            const double before = mismatch();
            d[a] += step;
            if (b != a) d[b] -= step;
            if (feasible(d[a]) && feasible(d[b]) && mismatch() < before - 1e-12) {
              improved = true;
            } else {
              d[a] -= step;
              if (b != a) d[b] += step;
            }
          }
        }
      }
    }
    CongressSeries s;
    for (std::size_t c = 0; c < k; ++c) s.records.push_back({static_cast<int>(80 + c), d[c], n - d[c]});

    const ZealotEstimate est = estimate_zealots(s);
    EXPECT_EQ(est.z_d, zd);
    EXPECT_EQ(est.z_r, zr);
    // Neighbouring grid points differ in sigma or rho by more than 1e-3.
    EXPECT_LT(est.epsilon, 1e-3);
  }
}

TEST(EstimateZealots, ExactSelfConsistency) {
  // Build a series, take its estimate, and check epsilon is recomputed exactly from the returned pair.
  std::mt19937_64 rng(2);
  const auto s = random_series(rng, 6);
  const auto est = estimate_zealots(s);
  EXPECT_GE(est.z_d, 1);
  EXPECT_GE(est.z_r, 1);
  EXPECT_LE(est.z_d, s.min_democrats());
  EXPECT_LE(est.z_r, s.min_republicans());
  EXPECT_DOUBLE_EQ(est.sigma_hat, empirical_sigma(s));
  EXPECT_DOUBLE_EQ(est.rho_hat, empirical_rho(s, est.z_d, est.z_r));
  EXPECT_DOUBLE_EQ(est.sigma, sigma_complete(est.z_d, est.z_r));
  EXPECT_DOUBLE_EQ(est.rho, rho_complete(std::round(s.mean_seats()), est.z_d, est.z_r));
  EXPECT_DOUBLE_EQ(est.epsilon, (std::abs(est.sigma_hat - est.sigma) + std::abs(est.rho_hat - est.rho)) / 2.0);
  // No other candidate does strictly better.
  for (long zd = 1; zd <= s.min_democrats(); ++zd) {
    for (long zr = 1; zr <= s.min_republicans(); ++zr) {
      const double eps = (std::abs(est.sigma_hat - sigma_complete(zd, zr)) +
                          std::abs(empirical_rho(s, zd, zr) - rho_complete(std::round(s.mean_seats()), zd, zr))) /
                         2.0;
      EXPECT_GE(eps, est.epsilon);
    }
  }
}

TEST(EstimateZealots, PermutationInvariant) {
  std::mt19937_64 rng(3);
  auto s = random_series(rng, 12);
  const auto a = estimate_zealots(s);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(s.records.begin(), s.records.end(), rng);
    const auto b = estimate_zealots(s);
    EXPECT_EQ(a.z_d, b.z_d);
    EXPECT_EQ(a.z_r, b.z_r);
    EXPECT_NEAR(a.epsilon, b.epsilon, 1e-15);
  }
}

TEST(EstimateZealots, PerCongressConvention) {
  std::mt19937_64 rng(4);
  const auto s = random_series(rng, 8);
  const auto est = estimate_zealots(s, PopulationConvention::per_congress);
  double rho = 0.0;
  for (const auto& r : s.records) rho += rho_complete(r.seats(), est.z_d, est.z_r);
  EXPECT_NEAR(est.rho, rho / 8.0, 1e-15);
  EXPECT_DOUBLE_EQ(est.population, s.mean_seats());
}

TEST(AlphaSweep, StructureAndEndpointDominance) {
  const auto s = series_of({{240, 200}, {250, 190}, {230, 210}});
  const ZealotEstimate est{89, 63};
  std::vector<double> alphas;
  for (int k = 0; k < 20; ++k) alphas.push_back(0.05 * k);
  const auto rows = alpha_sweep(s, est, alphas);
  ASSERT_EQ(rows.size(), alphas.size() * 4);
  const double n = std::round(s.mean_seats());
  for (const auto& row : rows) {
    const double other = row.party == Party::democrat ? 63.0 : 89.0;
    EXPECT_DOUBLE_EQ(row.z_max, (n - other) / (1.0 + row.alpha));
    EXPECT_DOUBLE_EQ(row.z_other, other + row.alpha * row.z_star);
    EXPECT_NEAR(row.sigma_at_star, sigma_complete(row.z_other, row.z_star), 1e-12);
    auto objective = [&](double z) {
      return row.problem == SweepProblem::diversity ? backfire_sigma(other, row.alpha, z)
                                                    : backfire_active(other, row.alpha, z);
    };
    EXPECT_GE(objective(row.z_star), objective(0.0));
    EXPECT_GE(objective(row.z_star), objective(row.z_max));
  }
}

TEST(AlphaSweep, DiversityReachesOneWhenUnsaturated) {
  const auto s = series_of({{240, 205}});
  const ZealotEstimate est{89, 63};
  const std::vector<double> alphas{0.0, 0.2, 0.4, 0.55};
  for (const auto& row : alpha_sweep(s, est, alphas)) {
    if (row.problem == SweepProblem::diversity) { EXPECT_NEAR(row.sigma_at_star, 1.0, 1e-12); }
  }
}

TEST(AlphaSweep, Export) {
  const auto s = series_of({{240, 205}});
  const std::vector<double> alphas{0.5};
  std::ostringstream os;
  write_sweep(os, alpha_sweep(s, ZealotEstimate{89, 63}, alphas));
  std::istringstream lines(os.str());
  std::string line;
  std::getline(lines, line);
  EXPECT_EQ(line.rfind("alpha,party,problem,z_star,", 0), 0u);
  int rows = 0;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, 4);
}
