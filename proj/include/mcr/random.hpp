#pragma once

#include <cstdint>
#include <random>

#include "mcr/core.hpp"

namespace mcr {

/// Seedable random source. Each (seed, stream) pair gives an independent
/// substream; chains and replicates use distinct stream ids.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  double uniform();  // (0, 1)
  double normal() { return normal_(engine_); }
  Vector normal_vector(Eigen::Index n);
  /// Gamma with the given shape and rate (mean shape / rate).
  double gamma(double shape, double rate);
  double chi_square(double df) { return gamma(0.5 * df, 0.5); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

double normal_cdf(double x);
/// log(1 - Phi(x)), accurate far into the upper tail.
double log_normal_survival(double x);
double normal_quantile(double p);
/// Inverse of the survival function: x with 1 - Phi(x) = q.
double normal_survival_quantile(double q);

/// Draw from N(mean, sd^2) truncated to (lower, upper) by CDF inversion.
/// Infinite bounds are allowed. When the standardized interval lies beyond
/// 6 SD in either tail the inversion is carried out on log survival values.
double truncated_normal(Rng& rng, double mean, double sd, double lower, double upper);

struct Gaussian {
  Vector mean;
  Matrix covariance;
};

/// Draw from N(P^{-1} l, P^{-1}) given the precision P and linear term l.
Vector gaussian_from_precision(Rng& rng, const Matrix& precision, const Vector& linear);
/// Mean and covariance of N(P^{-1} l, P^{-1}).
Gaussian precision_to_moments(const Matrix& precision, const Vector& linear);

/// Wishart(scale, df) draw by the Bartlett decomposition.
Matrix wishart(Rng& rng, const Matrix& scale, double df);

}  // namespace mcr
