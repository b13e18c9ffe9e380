#pragma once

// Gaussian log-MGF and rate function, the convex-envelope bounds I* and
// I_{i,H}, a grid Legendre-Fenchel transform used as an oracle, and
// inaccuracy rates over target sets.

#include <functional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace ldnet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Innovation law N(m, S).
class GaussianSource {
 public:
  /// Throws std::invalid_argument unless cov is square, matches mean, is
  /// symmetric within 1e-12 and positive definite.
  GaussianSource(Vector mean, Matrix cov);

  static GaussianSource standard(int dimension = 1);
  static GaussianSource scalar(double mean, double variance);
  /// Zero covariance: every draw equals the mean. Only valid for sampling;
  /// rate evaluation throws std::domain_error.
  static GaussianSource pointMass(Vector mean);

  int dimension() const noexcept { return static_cast<int>(mean_.size()); }
  const Vector& mean() const noexcept { return mean_; }
  const Matrix& covariance() const noexcept { return cov_; }
  bool degenerate() const noexcept { return degenerate_; }
  /// Lower Cholesky factor L with L L^T = S (zero for a point mass).
  const Matrix& cholesky() const noexcept { return chol_; }
  /// (x-m)^T S^{-1} (x-m).
  double mahalanobisSquared(const Vector& x) const;
  /// L^{-1}(x - m): coordinates in which I is half the squared norm.
  Vector whiten(const Vector& x) const;

 private:
  GaussianSource() = default;
  Vector mean_;
  Matrix cov_;
  Matrix chol_;
  bool degenerate_ = false;
};

/// Lambda(lambda) = lambda^T m + lambda^T S lambda / 2.
double logMgf(const GaussianSource& src, const Vector& lambda);
/// I(x) = (x-m)^T S^{-1} (x-m) / 2.
double rate(const GaussianSource& src, const Vector& x);
/// H(x) = sqrt(2 I(x)).
double mahalanobisRadius(const GaussianSource& src, const Vector& x);

/// Closed convex hull of inf{a I + r, N I} for a Gaussian base rate I.
/// I* is (a, r) = (1, J); I_{i,H} is (|C_{i,H}|, |log p_H|).
class EnvelopeRate {
 public:
  /// Requires n >= 1, 1 <= compSize <= n and lift >= 0 (lift may be +inf).
  EnvelopeRate(GaussianSource base, int n, int compSize, double lift);

  const GaussianSource& base() const noexcept { return base_; }
  int networkSize() const noexcept { return n_; }
  int componentSize() const noexcept { return a_; }
  double lift() const noexcept { return r_; }
  /// c = a r / (N (N - a)); +inf when a = N or r = +inf.
  double tangencyConstant() const noexcept { return c_; }

  double operator()(const Vector& x) const { return fromBaseRate(rate(base_, x)); }
  /// The envelope as a function of the base rate value I >= 0:
  ///   N I                         for I <= c
  ///   N sqrt(2c) sqrt(2I) - N c   for c < I <= (N/a)^2 c
  ///   a I + r                     for I > (N/a)^2 c
  double fromBaseRate(double baseRate) const;

 private:
  GaussianSource base_;
  int n_;
  int a_;
  double r_;
  double c_;
};

/// A rate function of the form phi(I(x)) with phi nondecreasing and phi(0) = 0.
/// Covers I, N I and every EnvelopeRate.
class RadialRate {
 public:
  using Profile = std::function<double(double)>;

  RadialRate(GaussianSource base, Profile profile, std::string label);
  RadialRate(const EnvelopeRate& e);  // NOLINT: implicit by design

  static RadialRate baseRate(const GaussianSource& src);
  static RadialRate scaled(const GaussianSource& src, double factor);

  const GaussianSource& base() const noexcept { return base_; }
  const std::string& label() const noexcept { return label_; }
  double profile(double baseRate) const { return profile_(baseRate); }
  double operator()(const Vector& x) const { return profile_(rate(base_, x)); }

 private:
  GaussianSource base_;
  Profile profile_;
  std::string label_;
};

// ---------------------------------------------------------------- grid transforms

struct UniformGrid {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  /// Throws std::invalid_argument unless lo < hi (both finite) and count >= 2.
  UniformGrid(double lo, double hi, int count);
  double step() const noexcept { return (hi - lo) / (count - 1); }
  double at(int k) const noexcept { return k + 1 == count ? hi : lo + k * step(); }
};

class ScalarGridFunction {
 public:
  /// Throws std::invalid_argument on fewer than 3 samples, a size mismatch or
  /// non-finite values.
  ScalarGridFunction(UniformGrid grid, std::vector<double> values);

  const UniformGrid& grid() const noexcept { return grid_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double x(std::size_t k) const noexcept { return grid_.at(static_cast<int>(k)); }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

 private:
  UniformGrid grid_;
  std::vector<double> values_;
};

ScalarGridFunction sampleOnGrid(const std::function<double(double)>& f, const UniformGrid& grid);

/// g(lambda_j) = max_i (lambda_j x_i - f(x_i)) on the given dual grid. Exact
/// (hull based); parallel over dual points.
ScalarGridFunction numericConjugate(const ScalarGridFunction& f, const UniformGrid& dual);

/// Conjugate twice, returned on f's grid. The intermediate dual grid spans the
/// finite-difference slope range of f with dualCount points.
ScalarGridFunction numericBiconjugate(const ScalarGridFunction& f, int dualCount = 1 << 20);

/// Primal grid for checking an envelope against its biconjugate:
/// max(8, 1.5 * outer tangency radius) Mahalanobis radii around the mean.
UniformGrid envelopeOracleGrid(const EnvelopeRate& e, int count = 4001);

namespace serial {
/// Brute-force O(n m) reference for numericConjugate.
ScalarGridFunction numericConjugate(const ScalarGridFunction& f, const UniformGrid& dual);
}  // namespace serial

// ---------------------------------------------------------------- target sets

enum class Metric { Euclidean, Mahalanobis };

class TargetSet {
 public:
  /// {x : dist(x, center) >= radius}. Mahalanobis uses the source covariance.
  struct BallComplement {
    Vector center;
    double radius = 0.0;
    Metric metric = Metric::Euclidean;
  };
  /// {x : normal^T x >= offset}.
  struct HalfSpace {
    Vector normal;
    double offset = 0.0;
  };
  using Shape = std::variant<BallComplement, HalfSpace>;

  static TargetSet ballComplement(Vector center, double radius, Metric metric = Metric::Euclidean);
  static TargetSet halfSpace(Vector normal, double offset);

  const Shape& shape() const noexcept { return shape_; }
  int dimension() const noexcept;
  /// The source is only consulted for the Mahalanobis metric.
  bool contains(const Vector& x, const GaussianSource& src) const;

 private:
  explicit TargetSet(Shape s) : shape_(std::move(s)) {}
  Shape shape_;
};

/// inf over the set of the base Gaussian rate I.
double minimalBaseRate(const GaussianSource& src, const TargetSet& set);
/// inf over the set of a radial rate function; 0 whenever the mean lies in the set.
double inaccuracyRate(const RadialRate& f, const TargetSet& set);

// ---------------------------------------------------------------- sandwich

struct SandwichReport {
  double maxViolation = 0.0;       // largest positive gap in the chain
  std::size_t violations = 0;      // gaps above the tolerance
  std::size_t pointsChecked = 0;
  std::vector<std::string> failures;
  bool passed() const noexcept { return violations == 0 && failures.empty(); }
};

/// Checks I <= I* <= I_{i,H} <= N I at every point for each (a, lift) pair.
/// Pairs with a outside [1, N], or a < N with lift < J, are reported as
/// failures, not thrown.
SandwichReport sandwichCheck(const GaussianSource& src, int n, double jRate, std::span<const int> aList,
                             std::span<const double> liftList, std::span<const Vector> points,
                             double tolerance = 1e-10);

}  // namespace ldnet
