#include "ldnet/social_learning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

#include <omp.h>

namespace ldnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void normalizeRows(Matrix& logs) {
  for (Eigen::Index i = 0; i < logs.rows(); ++i) {
    const double top = logs.row(i).maxCoeff();
    const double lse = top + std::log((logs.row(i).array() - top).exp().sum());
    logs.row(i).array() -= lse;
  }
}

double minAbsOver(double lo, double hi) {
  if (lo > hi) return kInf;
  if (lo <= 0.0 && 0.0 <= hi) return 0.0;
  return std::min(std::abs(lo), std::abs(hi));
}

std::size_t activeBranch(const HypothesisModel& model, double zeta) {
  const auto& b = model.branches();
  auto it = std::upper_bound(b.begin(), b.end(), zeta,
                             [](double z, const HypothesisModel::Branch& br) { return z < br.lo; });
  return static_cast<std::size_t>(it - b.begin()) - 1;
}

void requireHypothesis(const HypothesisModel& model, int m) {
  if (m < 0 || m >= model.hypothesisCount() - 1)
    throw std::out_of_range("wrong-hypothesis index must lie in [0, M-2]");
}

// Smallest |zeta| with g_m(zeta) in [lo, hi], per affine branch of g_m.
double minimalZeta(const HypothesisModel& model, int m, double lo, double hi) {
  const double s2 = model.sigma() * model.sigma();
  const double dm = model.d()(m);
  const double km = model.dkl()(m);
  double best = kInf;
  for (const auto& br : model.branches()) {
    if (dm == br.d) {
      // g_m vanishes on m's own interval.
      if (lo <= 0.0 && 0.0 <= hi) best = std::min(best, minAbsOver(br.lo, br.hi));
      continue;
    }
    double a = (lo + km - br.dkl) * s2 / (dm - br.d);
    double b = (hi + km - br.dkl) * s2 / (dm - br.d);
    if (std::isinf(lo)) a = (dm - br.d) > 0 ? -kInf : kInf;
    if (std::isinf(hi)) b = (dm - br.d) > 0 ? kInf : -kInf;
    if (a > b) std::swap(a, b);
    best = std::min(best, minAbsOver(std::max(a, br.lo), std::min(b, br.hi)));
  }
  return best;
}

}  // namespace

// ---------------------------------------------------------------- model

HypothesisModel::HypothesisModel(std::vector<double> means, double sigma) : means_(std::move(means)), sigma_(sigma) {
  if (means_.size() < 2) throw std::invalid_argument("need at least two hypotheses");
  for (double m : means_)
    if (!std::isfinite(m)) throw std::invalid_argument("hypothesis means must be finite");
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) throw std::invalid_argument("sigma must be positive");
  const auto k = static_cast<Eigen::Index>(means_.size() - 1);
  const double s2 = sigma_ * sigma_;
  d_.resize(k);
  dkl_.resize(k);
  for (Eigen::Index m = 0; m < k; ++m) {
    d_(m) = means_[static_cast<std::size_t>(m)] - means_.back();
    dkl_(m) = d_(m) * d_(m) / (2.0 * s2);
  }

  std::vector<double> slopes(d_.data(), d_.data() + k);
  slopes.push_back(0.0);
  std::sort(slopes.begin(), slopes.end());
  slopes.erase(std::unique(slopes.begin(), slopes.end()), slopes.end());
  for (std::size_t j = 0; j < slopes.size(); ++j) {
    Branch br;
    br.d = slopes[j];
    br.dkl = br.d * br.d / (2.0 * s2);
    br.lo = j == 0 ? -kInf : 0.5 * (slopes[j - 1] + slopes[j]);
    br.hi = j + 1 == slopes.size() ? kInf : 0.5 * (slopes[j] + slopes[j + 1]);
    branches_.push_back(br);
  }
}

double HypothesisModel::logDensity(int m, double y) const {
  if (m < 0 || m >= hypothesisCount()) throw std::out_of_range("hypothesis index outside range");
  const double r = (y - means_[static_cast<std::size_t>(m)]) / sigma_;
  return -0.5 * r * r - std::log(sigma_) - 0.5 * std::log(2.0 * std::numbers::pi);
}

Vector HypothesisModel::lineAt(double zeta) const { return (zeta / (sigma_ * sigma_)) * d_ - dkl_; }

BeliefState BeliefState::uniform(int nodes, int hypotheses) {
  if (nodes < 1 || hypotheses < 2) throw std::invalid_argument("belief state needs nodes >= 1 and M >= 2");
  const double v = -std::log(static_cast<double>(hypotheses));
  return {Matrix::Constant(nodes, hypotheses, v), Matrix::Constant(nodes, hypotheses, v)};
}

// ---------------------------------------------------------------- dynamics

void bayesUpdate(BeliefState& state, const Vector& y, const HypothesisModel& model) {
  const int m = model.hypothesisCount();
  if (state.logPrivate.cols() != m || y.size() != state.logPrivate.rows())
    throw std::invalid_argument("belief state, observations and model do not match");
  state.logPublic.resize(state.logPrivate.rows(), m);
  for (Eigen::Index i = 0; i < y.size(); ++i)
    for (int h = 0; h < m; ++h) state.logPublic(i, h) = model.logDensity(h, y(i)) + state.logPrivate(i, h);
  normalizeRows(state.logPublic);
}

void geometricMerge(BeliefState& state, const Matrix& w) {
  if (w.rows() != w.cols() || w.cols() != state.logPublic.rows())
    throw std::invalid_argument("weight matrix does not match the belief state");
  state.logPrivate = w * state.logPublic;
  normalizeRows(state.logPrivate);
}

Matrix logLikelihoodRatios(const Vector& y, const HypothesisModel& model) {
  const double s2 = model.sigma() * model.sigma();
  const Vector centered = y.array() - model.trueMean();
  return (centered * model.d().transpose()) / s2 - Vector::Ones(y.size()) * model.dkl().transpose();
}

LogRatioState logRatios(const BeliefState& state, int t) {
  if (t < 1) throw std::invalid_argument("time index must be at least 1");
  const auto m = state.logPublic.cols();
  LogRatioState out;
  out.publicRatios = (state.logPublic.leftCols(m - 1).colwise() - state.logPublic.col(m - 1)) / t;
  out.privateRatios = (state.logPrivate.leftCols(m - 1).colwise() - state.logPrivate.col(m - 1)) / t;
  return out;
}

LogRatioState slStep(BeliefState& state, const Vector& y, const Matrix& w, const HypothesisModel& model, int t) {
  bayesUpdate(state, y, model);
  geometricMerge(state, w);
  return logRatios(state, t);
}

// ---------------------------------------------------------------- closed forms

double lambdaM(const HypothesisModel& model, const Vector& lambda) {
  if (lambda.size() != model.d().size()) throw std::invalid_argument("lambda must have M-1 entries");
  const double s = lambda.dot(model.d());
  return -lambda.dot(model.dkl()) + s * s / (2.0 * model.sigma() * model.sigma());
}

double rateIM(const HypothesisModel& model, const Vector& x) {
  if (x.size() != model.d().size()) throw std::invalid_argument("x must have M-1 entries");
  const Vector shifted = x + model.dkl();
  const double dd = model.d().squaredNorm();
  if (dd == 0.0) return shifted.norm() < 1e-9 ? 0.0 : kInf;
  const double s2 = model.sigma() * model.sigma();
  const double zeta = s2 * model.d().dot(shifted) / dd;
  const double residual = (shifted - (zeta / s2) * model.d()).norm();
  if (residual >= 1e-9) return kInf;
  return zeta * zeta / (2.0 * s2);
}

double piecewiseF(const HypothesisModel& model, double zeta) {
  const auto& br = model.branches()[activeBranch(model, zeta)];
  return zeta * br.d / (model.sigma() * model.sigma()) - br.dkl;
}

double piecewiseFDirect(const HypothesisModel& model, double zeta) {
  const Vector x = model.lineAt(zeta);
  return std::max(0.0, x.maxCoeff());
}

double gM(const HypothesisModel& model, int m, double zeta) {
  requireHypothesis(model, m);
  const auto& br = model.branches()[activeBranch(model, zeta)];
  return (model.d()(m) - br.d) * zeta / (model.sigma() * model.sigma()) - (model.dkl()(m) - br.dkl);
}

double gMDirect(const HypothesisModel& model, int m, double zeta) {
  requireHypothesis(model, m);
  const Vector x = model.lineAt(zeta);
  return x(m) - std::max(0.0, x.maxCoeff());
}

double beliefRate(const HypothesisModel& model, const EnvelopeRate& envelope, int m, double z) {
  requireHypothesis(model, m);
  if (z > 0.0) return kInf;
  return beliefIntervalRate(model, envelope, m, z, z);
}

double beliefIntervalRate(const HypothesisModel& model, const EnvelopeRate& envelope, int m, double lo, double hi) {
  requireHypothesis(model, m);
  if (lo > hi) throw std::invalid_argument("interval bounds are reversed");
  hi = std::min(hi, 0.0);
  if (lo > hi) return kInf;
  const double zeta = minimalZeta(model, m, lo, hi);
  if (std::isinf(zeta)) return kInf;
  return envelope.fromBaseRate(zeta * zeta / (2.0 * model.sigma() * model.sigma()));
}

// ---------------------------------------------------------------- ensembles

void SocialLearningConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (trajectories < 1) throw std::invalid_argument("trajectory count must be at least 1");
  if (recordTimes.empty()) throw std::invalid_argument("record times must be nonempty");
  for (std::size_t k = 0; k < recordTimes.size(); ++k) {
    if (recordTimes[k] < 1 || recordTimes[k] > horizon) throw std::invalid_argument("record time outside [1, horizon]");
    if (k > 0 && recordTimes[k] <= recordTimes[k - 1]) throw std::invalid_argument("record times must increase");
  }
}

namespace {

SocialLearningEnsemble emptySlEnsemble(const SocialLearningConfig& cfg) {
  SocialLearningEnsemble e;
  e.recordTimes = cfg.recordTimes;
  e.total = cfg.trajectories;
  e.nodes = cfg.network.vertexCount();
  e.hypotheses = cfg.model.hypothesisCount();
  const auto r = static_cast<Eigen::Index>(cfg.trajectories);
  e.logTrueBelief.assign(cfg.recordTimes.size(), Matrix::Zero(r, e.nodes));
  e.publicRatios.assign(cfg.recordTimes.size(),
                        std::vector<Matrix>(static_cast<std::size_t>(e.hypotheses - 1), Matrix::Zero(r, e.nodes)));
  return e;
}

void slTrajectory(const SocialLearningConfig& cfg, std::int64_t k, SocialLearningEnsemble& e, double& maxErr) {
  const int n = cfg.network.vertexCount();
  const int m = cfg.model.hypothesisCount();
  StreamRng wrng(cfg.seed, static_cast<std::uint64_t>(k), kWeightStream);
  StreamRng yrng(cfg.seed, static_cast<std::uint64_t>(k), kInnovationStream);
  std::normal_distribution<double> normal;
  std::vector<Edge> scratch;
  std::vector<int> degrees;
  BeliefState state = BeliefState::uniform(n, m);
  Vector y(n);
  Matrix w(n, n);
  const Matrix eye = Matrix::Identity(n, n);
  const auto row = static_cast<Eigen::Index>(k);

  std::size_t next = 0;
  const int last = cfg.recordTimes.back();
  for (int t = 1; t <= last; ++t) {
    for (int i = 0; i < n; ++i) y(i) = cfg.model.trueMean() + cfg.model.sigma() * normal(yrng);
    applyWeights(n, cfg.network.drawEdges(wrng, scratch), cfg.weights, eye, w, degrees);
    const LogRatioState ratios = slStep(state, y, w, cfg.model, t);
    if (t != cfg.recordTimes[next]) continue;
    for (int i = 0; i < n; ++i) {
      const double logTrue = state.logPublic(i, m - 1);
      e.logTrueBelief[next](row, i) = logTrue;
      double denom = 1.0;
      for (int h = 0; h + 1 < m; ++h) {
        e.publicRatios[next][static_cast<std::size_t>(h)](row, i) = ratios.publicRatios(i, h);
        denom += std::exp(t * ratios.publicRatios(i, h));
      }
      maxErr = std::max(maxErr, std::abs(std::exp(logTrue) - 1.0 / denom));
    }
    ++next;
  }
}

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

}  // namespace

SocialLearningEnsemble runSocialLearning(const SocialLearningConfig& cfg) {
  cfg.validate();
  SocialLearningEnsemble e = emptySlEnsemble(cfg);
  std::vector<double> errs(static_cast<std::size_t>(omp_get_max_threads()), 0.0);
#pragma omp parallel
  {
    double& mine = errs[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < cfg.trajectories; ++k) slTrajectory(cfg, k, e, mine);
  }
  e.maxReconstructionError = *std::max_element(errs.begin(), errs.end());
  return e;
}

SocialLearningEnsemble serial::runSocialLearning(const SocialLearningConfig& cfg) {
  cfg.validate();
  SocialLearningEnsemble e = emptySlEnsemble(cfg);
  double err = 0.0;
  for (std::int64_t k = 0; k < cfg.trajectories; ++k) slTrajectory(cfg, k, e, err);
  e.maxReconstructionError = err;
  return e;
}

ConvergenceReport trueBeliefConvergenceCheck(const SocialLearningEnsemble& e) {
  if (e.logTrueBelief.empty()) throw std::invalid_argument("ensemble has no records");
  ConvergenceReport r;
  const Matrix& finalLog = e.logTrueBelief.back();
  for (int i = 0; i < e.nodes; ++i) {
    NodeConvergence nc;
    std::vector<double> beliefs(static_cast<std::size_t>(finalLog.rows()));
    std::size_t converged = 0;
    for (Eigen::Index k = 0; k < finalLog.rows(); ++k) {
      beliefs[static_cast<std::size_t>(k)] = std::exp(finalLog(k, i));
      if (beliefs[static_cast<std::size_t>(k)] > 1.0 - 1e-3) ++converged;
    }
    nc.medianTrueBelief = median(beliefs);
    nc.fractionConverged = static_cast<double>(converged) / static_cast<double>(finalLog.rows());
    for (const Matrix& ratios : e.publicRatios.back()) {
      const Vector col = ratios.col(i);
      nc.medianLogRatio.push_back(median(std::vector<double>(col.data(), col.data() + col.size())));
    }
    r.nodes.push_back(std::move(nc));
  }
  r.maxReconstructionError = e.maxReconstructionError;
  r.reconstructionHolds = e.maxReconstructionError <= 1e-9;
  return r;
}

EquivalenceReport slEquivalence(const GraphDistribution& network, const WeightRule& rule,
                                const HypothesisModel& model, int steps, std::uint64_t seed) {
  if (steps < 1) throw std::invalid_argument("step count must be positive");
  const int n = network.vertexCount();
  StreamRng wrng(seed, 0, kWeightStream);
  StreamRng yrng(seed, 0, kInnovationStream);
  std::normal_distribution<double> normal;
  std::vector<Edge> scratch;
  BeliefState state = BeliefState::uniform(n, model.hypothesisCount());
  Matrix x = Matrix::Zero(n, model.hypothesisCount() - 1);
  Vector y(n);
  EquivalenceReport report;
  for (int t = 1; t <= steps; ++t) {
    for (int i = 0; i < n; ++i) y(i) = model.trueMean() + model.sigma() * normal(yrng);
    const auto edges = network.drawEdges(wrng, scratch);
    const Matrix w = buildWeightMatrix(Graph(n, std::vector<Edge>(edges.begin(), edges.end())), rule);

    const Matrix l = logLikelihoodRatios(y, model);
    const Matrix intermediate = (static_cast<double>(t - 1) / t) * x + l / static_cast<double>(t);
    x = stepStates(x, l, w, t);
    const LogRatioState ratios = slStep(state, y, w, model, t);

    report.maxStateDeviation = std::max(report.maxStateDeviation, (ratios.privateRatios - x).cwiseAbs().maxCoeff());
    report.maxIntermediateDeviation =
        std::max(report.maxIntermediateDeviation, (ratios.publicRatios - intermediate).cwiseAbs().maxCoeff());
    report.steps = t;
  }
  return report;
}

}  // namespace ldnet
