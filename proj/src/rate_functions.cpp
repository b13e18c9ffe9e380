#include "ldnet/rate_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace ldnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void requireDimension(const GaussianSource& src, const Vector& v, const char* what) {
  if (v.size() != src.dimension())
    throw std::invalid_argument(std::string(what) + " has dimension " + std::to_string(v.size()) +
                                ", expected " + std::to_string(src.dimension()));
}

void requireRegular(const GaussianSource& src) {
  if (src.degenerate()) throw std::domain_error("rate function of a point-mass source is not defined");
}

// Lower convex hull (monotone chain) of the sampled graph.
std::vector<std::size_t> lowerHull(const ScalarGridFunction& f) {
  std::vector<std::size_t> h;
  for (std::size_t k = 0; k < f.size(); ++k) {
    while (h.size() >= 2) {
      const std::size_t a = h[h.size() - 2];
      const std::size_t b = h.back();
      const double cross = (f.x(b) - f.x(a)) * (f[k] - f[a]) - (f[b] - f[a]) * (f.x(k) - f.x(a));
      if (cross <= 0.0)
        h.pop_back();
      else
        break;
    }
    h.push_back(k);
  }
  return h;
}

}  // namespace

// ---------------------------------------------------------------- Gaussian source

GaussianSource::GaussianSource(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
  if (mean_.size() == 0) throw std::invalid_argument("source dimension must be positive");
  if (cov_.rows() != cov_.cols() || cov_.rows() != mean_.size())
    throw std::invalid_argument("covariance shape does not match the mean");
  if (!mean_.allFinite() || !cov_.allFinite()) throw std::invalid_argument("source parameters must be finite");
  if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("covariance is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov_, Eigen::EigenvaluesOnly);
  if (!(eig.eigenvalues().minCoeff() > 0.0)) throw std::invalid_argument("covariance is not positive definite");
  Eigen::LLT<Matrix> llt(cov_);
  chol_ = llt.matrixL();
}

GaussianSource GaussianSource::standard(int dimension) {
  return GaussianSource(Vector::Zero(dimension), Matrix::Identity(dimension, dimension));
}

GaussianSource GaussianSource::scalar(double mean, double variance) {
  return GaussianSource(Vector::Constant(1, mean), Matrix::Constant(1, 1, variance));
}

GaussianSource GaussianSource::pointMass(Vector mean) {
  if (mean.size() == 0) throw std::invalid_argument("source dimension must be positive");
  GaussianSource s;
  const auto d = mean.size();
  s.mean_ = std::move(mean);
  s.cov_ = Matrix::Zero(d, d);
  s.chol_ = Matrix::Zero(d, d);
  s.degenerate_ = true;
  return s;
}

Vector GaussianSource::whiten(const Vector& x) const {
  requireRegular(*this);
  requireDimension(*this, x, "point");
  return chol_.triangularView<Eigen::Lower>().solve(x - mean_);
}

double GaussianSource::mahalanobisSquared(const Vector& x) const { return whiten(x).squaredNorm(); }

double logMgf(const GaussianSource& src, const Vector& lambda) {
  requireDimension(src, lambda, "lambda");
  return lambda.dot(src.mean()) + 0.5 * lambda.dot(src.covariance() * lambda);
}

double rate(const GaussianSource& src, const Vector& x) { return 0.5 * src.mahalanobisSquared(x); }

double mahalanobisRadius(const GaussianSource& src, const Vector& x) {
  return std::sqrt(src.mahalanobisSquared(x));
}

// ---------------------------------------------------------------- envelope

EnvelopeRate::EnvelopeRate(GaussianSource base, int n, int compSize, double lift)
    : base_(std::move(base)), n_(n), a_(compSize), r_(lift) {
  if (n < 1) throw std::invalid_argument("network size must be positive");
  if (compSize < 1 || compSize > n) throw std::invalid_argument("component size must lie in [1, N]");
  if (!(lift >= 0.0)) throw std::invalid_argument("lift must be nonnegative");
  if (a_ == n_ || std::isinf(r_))
    c_ = kInf;
  else
    c_ = static_cast<double>(a_) * r_ / (static_cast<double>(n_) * (n_ - a_));
}

double EnvelopeRate::fromBaseRate(double baseRate) const {
  const double n = n_;
  if (std::isinf(c_) || std::isinf(baseRate)) return n * baseRate;
  if (baseRate <= c_) return n * baseRate;
  const double ratio = n / a_;
  if (baseRate <= ratio * ratio * c_) return n * std::sqrt(2.0 * c_) * std::sqrt(2.0 * baseRate) - n * c_;
  return a_ * baseRate + r_;
}

RadialRate::RadialRate(GaussianSource base, Profile profile, std::string label)
    : base_(std::move(base)), profile_(std::move(profile)), label_(std::move(label)) {}

RadialRate::RadialRate(const EnvelopeRate& e)
    : base_(e.base()),
      profile_([e](double i) { return e.fromBaseRate(i); }),
      label_("envelope(a=" + std::to_string(e.componentSize()) + ")") {}

RadialRate RadialRate::baseRate(const GaussianSource& src) {
  return RadialRate(src, [](double i) { return i; }, "I");
}

RadialRate RadialRate::scaled(const GaussianSource& src, double factor) {
  return RadialRate(src, [factor](double i) { return factor * i; }, "scaled");
}

// ---------------------------------------------------------------- grids

UniformGrid::UniformGrid(double lo_, double hi_, int count_) : lo(lo_), hi(hi_), count(count_) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi))
    throw std::invalid_argument("grid bounds must be finite with lo < hi");
  if (count < 2) throw std::invalid_argument("grid needs at least 2 points");
}

ScalarGridFunction::ScalarGridFunction(UniformGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() < 3) throw std::invalid_argument("grid function needs at least 3 samples");
  if (values_.size() != static_cast<std::size_t>(grid_.count))
    throw std::invalid_argument("sample count does not match the grid");
  for (double v : values_)
    if (!std::isfinite(v)) throw std::invalid_argument("grid function values must be finite");
}

ScalarGridFunction sampleOnGrid(const std::function<double(double)>& f, const UniformGrid& grid) {
  std::vector<double> v(static_cast<std::size_t>(grid.count));
  for (int k = 0; k < grid.count; ++k) v[static_cast<std::size_t>(k)] = f(grid.at(k));
  return ScalarGridFunction(grid, std::move(v));
}

ScalarGridFunction numericConjugate(const ScalarGridFunction& f, const UniformGrid& dual) {
  const std::vector<std::size_t> hull = lowerHull(f);
  std::vector<double> slopes(hull.size() - 1);
  for (std::size_t k = 0; k + 1 < hull.size(); ++k)
    slopes[k] = (f[hull[k + 1]] - f[hull[k]]) / (f.x(hull[k + 1]) - f.x(hull[k]));

  std::vector<double> g(static_cast<std::size_t>(dual.count));
#pragma omp parallel for schedule(static)
  for (int j = 0; j < dual.count; ++j) {
    const double lambda = dual.at(j);
    // The maximizing hull vertex is the first whose right edge is steeper than lambda.
    const auto k = static_cast<std::size_t>(std::lower_bound(slopes.begin(), slopes.end(), lambda) - slopes.begin());
    double best = lambda * f.x(hull[k]) - f[hull[k]];
    if (k > 0) best = std::max(best, lambda * f.x(hull[k - 1]) - f[hull[k - 1]]);
    if (k + 1 < hull.size()) best = std::max(best, lambda * f.x(hull[k + 1]) - f[hull[k + 1]]);
    g[static_cast<std::size_t>(j)] = best;
  }
  return ScalarGridFunction(dual, std::move(g));
}

ScalarGridFunction serial::numericConjugate(const ScalarGridFunction& f, const UniformGrid& dual) {
  std::vector<double> g(static_cast<std::size_t>(dual.count));
  for (int j = 0; j < dual.count; ++j) {
    const double lambda = dual.at(j);
    double best = -kInf;
    for (std::size_t i = 0; i < f.size(); ++i) best = std::max(best, lambda * f.x(i) - f[i]);
    g[static_cast<std::size_t>(j)] = best;
  }
  return ScalarGridFunction(dual, std::move(g));
}

ScalarGridFunction numericBiconjugate(const ScalarGridFunction& f, int dualCount) {
  double lo = kInf;
  double hi = -kInf;
  for (std::size_t k = 0; k + 1 < f.size(); ++k) {
    const double s = (f[k + 1] - f[k]) / (f.x(k + 1) - f.x(k));
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  if (!(lo < hi)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const ScalarGridFunction g = numericConjugate(f, UniformGrid(lo, hi, dualCount));
  return numericConjugate(g, f.grid());
}

UniformGrid envelopeOracleGrid(const EnvelopeRate& e, int count) {
  if (e.base().dimension() != 1) throw std::invalid_argument("oracle grid needs a scalar source");
  const int n = e.networkSize();
  const int a = e.componentSize();
  double radius = 8.0;
  if (a < n && std::isfinite(e.lift())) {
    const double outer = std::sqrt(2.0 * n * e.lift() / (static_cast<double>(a) * (n - a)));
    radius = std::max(radius, 1.5 * outer);
  }
  const double m = e.base().mean()(0);
  const double s = std::sqrt(e.base().covariance()(0, 0));
  return UniformGrid(m - radius * s, m + radius * s, count);
}

// ---------------------------------------------------------------- target sets

TargetSet TargetSet::ballComplement(Vector center, double radius, Metric metric) {
  if (center.size() == 0) throw std::invalid_argument("target dimension must be positive");
  if (!(radius > 0.0) || !std::isfinite(radius)) throw std::invalid_argument("radius must be positive");
  return TargetSet(BallComplement{std::move(center), radius, metric});
}

TargetSet TargetSet::halfSpace(Vector normal, double offset) {
  if (normal.size() == 0) throw std::invalid_argument("target dimension must be positive");
  if (normal.norm() == 0.0) throw std::invalid_argument("half-space normal must be nonzero");
  return TargetSet(HalfSpace{std::move(normal), offset});
}

int TargetSet::dimension() const noexcept {
  return std::visit([](const auto& s) -> int {
    if constexpr (std::is_same_v<std::decay_t<decltype(s)>, BallComplement>)
      return static_cast<int>(s.center.size());
    else
      return static_cast<int>(s.normal.size());
  }, shape_);
}

bool TargetSet::contains(const Vector& x, const GaussianSource& src) const {
  if (x.size() != dimension()) throw std::invalid_argument("point dimension does not match the target");
  if (const auto* b = std::get_if<BallComplement>(&shape_)) {
    const Vector diff = x - b->center;
    if (b->metric == Metric::Euclidean) return diff.norm() >= b->radius;
    requireRegular(src);
    const Vector w = src.cholesky().triangularView<Eigen::Lower>().solve(diff);
    return w.norm() >= b->radius;
  }
  const auto& h = std::get<HalfSpace>(shape_);
  return h.normal.dot(x) >= h.offset;
}

namespace {

// min (1/2)(b+u)^T A (b+u) over |u| = eps, with A = S^{-1} and |b| < eps.
double sphereMinimum(const Matrix& cov, const Vector& b, double eps) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Vector lam = eig.eigenvalues().cwiseInverse();  // eigenvalues of A
  const Vector beta = eig.eigenvectors().transpose() * b;
  const double lmin = lam.minCoeff();
  const double lmax = lam.maxCoeff();
  const auto dim = lam.size();

  auto valueAt = [&](double mu) {
    double v = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
      const double y = mu * beta(k) / (lam(k) - mu);
      v += lam(k) * y * y;
    }
    return 0.5 * v;
  };
  auto normAt = [&](double mu, bool skipMin) {
    double s = 0.0;
    for (Eigen::Index k = 0; k < dim; ++k) {
      if (skipMin && lam(k) <= lmin * (1.0 + 1e-12)) continue;
      const double u = lam(k) * beta(k) / (lam(k) - mu);
      s += u * u;
    }
    return std::sqrt(s);
  };

  double minSpaceWeight = 0.0;
  for (Eigen::Index k = 0; k < dim; ++k)
    if (lam(k) <= lmin * (1.0 + 1e-12)) minSpaceWeight += beta(k) * beta(k);
  const double scale = std::max(eps, b.norm());
  if (std::sqrt(minSpaceWeight) <= 1e-14 * scale) {
    const double rest = normAt(lmin, true);
    if (rest <= eps) {
      // Hard case: the leftover length goes along the flattest direction.
      double v = 0.0;
      for (Eigen::Index k = 0; k < dim; ++k) {
        if (lam(k) <= lmin * (1.0 + 1e-12)) continue;
        const double y = lmin * beta(k) / (lam(k) - lmin);
        v += lam(k) * y * y;
      }
      return 0.5 * (v + lmin * (eps * eps - rest * rest));
    }
  }

  double lo = lmin - lmax * beta.norm() / eps - 1.0;
  double hi = lmin;
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (normAt(mid, false) < eps)
      lo = mid;
    else
      hi = mid;
  }
  return valueAt(0.5 * (lo + hi));
}

}  // namespace

double minimalBaseRate(const GaussianSource& src, const TargetSet& set) {
  requireRegular(src);
  if (set.dimension() != src.dimension()) throw std::invalid_argument("target dimension does not match the source");
  if (const auto* b = std::get_if<TargetSet::BallComplement>(&set.shape())) {
    if (b->metric == Metric::Mahalanobis) {
      const double dist = src.whiten(b->center).norm();
      if (dist >= b->radius) return 0.0;
      const double gap = b->radius - dist;
      return 0.5 * gap * gap;
    }
    const Vector offset = b->center - src.mean();
    if (offset.norm() >= b->radius) return 0.0;
    return sphereMinimum(src.covariance(), offset, b->radius);
  }
  const auto& h = std::get<TargetSet::HalfSpace>(set.shape());
  const double gap = h.offset - h.normal.dot(src.mean());
  if (gap <= 0.0) return 0.0;
  return gap * gap / (2.0 * h.normal.dot(src.covariance() * h.normal));
}

double inaccuracyRate(const RadialRate& f, const TargetSet& set) {
  if (set.contains(f.base().mean(), f.base())) return 0.0;
  return f.profile(minimalBaseRate(f.base(), set));
}

// ---------------------------------------------------------------- sandwich

SandwichReport sandwichCheck(const GaussianSource& src, int n, double jRate, std::span<const int> aList,
                             std::span<const double> liftList, std::span<const Vector> points, double tolerance) {
  SandwichReport report;
  if (aList.size() != liftList.size()) {
    report.failures.push_back("component-size and lift lists differ in length");
    return report;
  }
  const EnvelopeRate lower(src, n, 1, jRate);
  std::vector<EnvelopeRate> bounds;
  for (std::size_t k = 0; k < aList.size(); ++k) {
    if (aList[k] < 1 || aList[k] > n) {
      report.failures.push_back("pair " + std::to_string(k) + ": component size outside [1, N]");
      continue;
    }
    // With a = N the envelope is N I and the lift plays no role.
    if (aList[k] < n && !(liftList[k] >= jRate)) {
      report.failures.push_back("pair " + std::to_string(k) + ": lift below the rate of consensus");
      continue;
    }
    bounds.emplace_back(src, n, aList[k], liftList[k]);
  }

  auto record = [&](double gap) {
    report.maxViolation = std::max(report.maxViolation, gap);
    if (gap > tolerance) ++report.violations;
  };
  for (const Vector& x : points) {
    const double i = rate(src, x);
    const double iStar = lower.fromBaseRate(i);
    const double ni = n * i;
    record(i - iStar);
    for (const EnvelopeRate& e : bounds) {
      const double iH = e.fromBaseRate(i);
      record(iStar - iH);
      record(iH - ni);
    }
    if (bounds.empty()) record(iStar - ni);
    ++report.pointsChecked;
  }
  return report;
}

}  // namespace ldnet
