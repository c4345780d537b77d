#include "mcr/random.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace mcr {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kTailSwitch = 6.0;

double log_normal_density(double x) { return -0.5 * x * x - 0.5 * std::log(2.0 * std::numbers::pi); }

// Standard truncated normal on (a, b) with a >= kTailSwitch, inverted in log space.
double upper_tail_log_inversion(double a, double b, double u) {
  const double la = log_normal_survival(a);
  const double lb = std::isinf(b) ? -std::numeric_limits<double>::infinity() : log_normal_survival(b);
  // log S(x) = la + log(1 - u (1 - S(b)/S(a)))
  const double ratio = std::exp(lb - la);
  const double target = la + std::log1p(-u * (1.0 - ratio));
  double x = std::max(a, std::sqrt(std::max(0.0, -2.0 * target)));
  for (int it = 0; it < 60; ++it) {
    const double f = log_normal_survival(x) - target;
    const double slope = -std::exp(log_normal_density(x) - log_normal_survival(x));
    const double step = f / slope;
    x -= step;
    if (std::abs(step) < 1e-14 * std::max(1.0, std::abs(x))) break;
  }
  return std::clamp(x, a, b);
}

double standard_truncated(Rng& rng, double a, double b) {
  const double u = rng.uniform();
  if (a >= kTailSwitch) return upper_tail_log_inversion(a, b, u);
  if (b <= -kTailSwitch) return -upper_tail_log_inversion(-b, -a, u);
  if (a >= 0.0) {
    // Upper half: invert the survival function to avoid cancellation.
    const double sa = 0.5 * std::erfc(a * kInvSqrt2);
    const double sb = std::isinf(b) ? 0.0 : 0.5 * std::erfc(b * kInvSqrt2);
    return std::clamp(normal_survival_quantile(sa - u * (sa - sb)), a, b);
  }
  if (b <= 0.0) {
    const double fa = std::isinf(a) ? 0.0 : normal_cdf(a);
    const double fb = normal_cdf(b);
    return std::clamp(normal_quantile(fa + u * (fb - fa)), a, b);
  }
  const double fa = std::isinf(a) ? 0.0 : normal_cdf(a);
  const double fb = std::isinf(b) ? 1.0 : normal_cdf(b);
  return std::clamp(normal_quantile(fa + u * (fb - fa)), a, b);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x9e3779b9u};
  engine_.seed(seq);
}

double Rng::uniform() {
  // 53 random bits mapped into the open interval (0, 1).
  for (;;) {
    const double u = static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    if (u > 0.0) return u;
  }
}

Vector Rng::normal_vector(Eigen::Index n) {
  Vector z(n);
  for (Eigen::Index k = 0; k < n; ++k) z(k) = normal();
  return z;
}

double Rng::gamma(double shape, double rate) {
  if (!(shape > 0.0) || !(rate > 0.0)) throw NumericalError("gamma draw needs positive shape and rate");
  std::gamma_distribution<double> dist(shape, 1.0 / rate);
  return dist(engine_);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x * kInvSqrt2); }

double log_normal_survival(double x) {
  if (x < 37.0) return std::log(0.5 * std::erfc(x * kInvSqrt2));
  // Asymptotic series beyond the range where erfc is representable.
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return log_normal_density(x) - std::log(x) + std::log(series);
}

double normal_quantile(double p) {
  if (p <= 0.0) return -std::numeric_limits<double>::infinity();
  if (p >= 1.0) return std::numeric_limits<double>::infinity();
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double normal_survival_quantile(double q) {
  if (q <= 0.0) return std::numeric_limits<double>::infinity();
  if (q >= 1.0) return -std::numeric_limits<double>::infinity();
  return std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double truncated_normal(Rng& rng, double mean, double sd, double lower, double upper) {
  if (!(sd > 0.0)) throw NumericalError("truncated normal needs a positive standard deviation");
  if (!(lower < upper)) throw NumericalError("truncated normal needs lower < upper");
  const double a = (lower - mean) / sd;
  const double b = (upper - mean) / sd;
  return mean + sd * standard_truncated(rng, a, b);
}

Vector gaussian_from_precision(Rng& rng, const Matrix& precision, const Vector& linear) {
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) throw NumericalError("full-conditional precision is not positive definite");
  Vector draw = llt.solve(linear);
  draw += llt.matrixU().solve(rng.normal_vector(precision.rows()));
  return draw;
}

Gaussian precision_to_moments(const Matrix& precision, const Vector& linear) {
  Eigen::LLT<Matrix> llt(precision);
  if (llt.info() != Eigen::Success) throw NumericalError("full-conditional precision is not positive definite");
  Gaussian g;
  g.covariance = llt.solve(Matrix::Identity(precision.rows(), precision.cols()));
  g.mean = llt.solve(linear);
  return g;
}

Matrix wishart(Rng& rng, const Matrix& scale, double df) {
  const Eigen::Index p = scale.rows();
  if (!(df > static_cast<double>(p) - 1.0)) throw NumericalError("Wishart degrees of freedom must exceed p - 1");
  Eigen::LLT<Matrix> llt(0.5 * (scale + scale.transpose()));
  if (llt.info() != Eigen::Success) throw NumericalError("Wishart scale matrix is not positive definite");
  Matrix bartlett = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    bartlett(i, i) = std::sqrt(rng.chi_square(df - static_cast<double>(i)));
    for (Eigen::Index j = 0; j < i; ++j) bartlett(i, j) = rng.normal();
  }
  const Matrix LA = llt.matrixL() * bartlett;
  Matrix W = LA * LA.transpose();
  return 0.5 * (W + W.transpose());
}

}  // namespace mcr
