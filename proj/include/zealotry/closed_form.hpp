#pragma once

#include <stdexcept>

// Equilibrium quantities on the complete unweighted network with z0 opinion-0
// and z1 opinion-1 zealots. Counts are real-valued so that the optimizers can
// evaluate them at non-integer maximizers.

namespace zealotry {

/// x-bar* = z1 / (z0 + z1).
inline double mean_opinion_complete(double z0, double z1) {
  if (z0 < 0 || z1 < 0 || z0 + z1 <= 0) throw std::invalid_argument("need z0, z1 >= 0 and z0 + z1 > 0");
  return z1 / (z0 + z1);
}

/// sigma = 4 z0 z1 / (z0 + z1)^2.
inline double sigma_complete(double z0, double z1) {
  if (z0 < 0 || z1 < 0 || z0 + z1 <= 0) throw std::invalid_argument("need z0, z1 >= 0 and z0 + z1 > 0");
  const double s = z0 + z1;
  return 4.0 * z0 * z1 / (s * s);
}

/// Disagreement probability shared by every pair of free nodes:
/// q_f = 2 z0 z1 / ((z0 + z1)(z0 + z1 + 1)).
inline double free_pair_disagreement_complete(double z0, double z1) {
  if (z0 < 0 || z1 < 0 || z0 + z1 <= 0) throw std::invalid_argument("need z0, z1 >= 0 and z0 + z1 > 0");
  const double s = z0 + z1;
  return 2.0 * z0 * z1 / (s * (s + 1.0));
}

/// Active-link density with the N(N-1) ordered-pair normalization:
/// rho = 2 z0 z1 (N - z0 - z1) / ((N - 1)(z0 + z1)(z0 + z1 + 1)).
inline double rho_complete(double n, double z0, double z1) {
  if (n < 2) throw std::invalid_argument("need n >= 2");
  if (z0 < 0 || z1 < 0 || z0 + z1 <= 0) throw std::invalid_argument("need z0, z1 >= 0 and z0 + z1 > 0");
  if (z0 + z1 > n) throw std::invalid_argument("zealot counts exceed n");
  const double s = z0 + z1;
  return 2.0 * z0 * z1 * (n - s) / ((n - 1.0) * s * (s + 1.0));
}

/// Same sum of disagreement probabilities divided by the number of counted
/// edges F(N-1) instead of N(N-1).
inline double rho_complete_counted_edges(double n, double z0, double z1) {
  const double f = n - z0 - z1;
  if (f <= 0) return 0.0;
  return rho_complete(n, z0, z1) * n / f;
}

}  // namespace zealotry
