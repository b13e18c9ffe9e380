#include "ldnet/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include <boost/math/distributions/students_t.hpp>
#include <omp.h>

namespace ldnet {

namespace {

constexpr double kZ95 = 1.959963984540054;

int lastRecordTime(const SimulationConfig& cfg) { return cfg.recordTimes.back(); }

// One trajectory of the recursion; hits are added to `hits` (flattened
// [timeIndex][target][batch]) and states stored when requested.
void runTrajectory(const SimulationConfig& cfg, std::int64_t k, std::vector<std::int64_t>& hits,
                   std::vector<std::vector<Matrix>>* states) {
  const int n = cfg.network.vertexCount();
  const int d = cfg.source.dimension();
  StreamRng wrng(cfg.seed, static_cast<std::uint64_t>(k), kWeightStream);
  StreamRng zrng(cfg.seed, static_cast<std::uint64_t>(k), kInnovationStream);
  std::normal_distribution<double> normal;
  std::vector<Edge> scratch;
  std::vector<int> degrees;
  Matrix x = Matrix::Zero(n, d);
  Matrix v(n, d);
  Matrix z(n, d);
  Vector g(d);
  Vector point(d);
  const Vector& mean = cfg.source.mean();
  const Matrix& chol = cfg.source.cholesky();
  const std::size_t targets = cfg.targets.size();

  std::size_t next = 0;
  const int last = lastRecordTime(cfg);
  for (int t = 1; t <= last; ++t) {
    for (int i = 0; i < n; ++i) {
      for (int c = 0; c < d; ++c) g(c) = normal(zrng);
      z.row(i) = (mean + chol * g).transpose();
    }
    const double keep = static_cast<double>(t - 1) / t;
    v.noalias() = keep * x + z / static_cast<double>(t);
    const auto edges = cfg.network.drawEdges(wrng, scratch);
    applyWeights(n, edges, cfg.weights, v, x, degrees);

    if (t == cfg.recordTimes[next]) {
      for (std::size_t j = 0; j < targets; ++j) {
        point = x.row(cfg.targets[j].node).transpose();
        if (cfg.targets[j].set.contains(point, cfg.source)) ++hits[(next * targets + j) * kBatches + k % kBatches];
      }
      if (states != nullptr) (*states)[next][static_cast<std::size_t>(k)] = x;
      ++next;
    }
  }
}

TrajectoryEnsemble emptyEnsemble(const SimulationConfig& cfg) {
  TrajectoryEnsemble e;
  e.recordTimes = cfg.recordTimes;
  e.targets = cfg.targets;
  e.total = cfg.trajectories;
  e.hits.assign(cfg.recordTimes.size(), std::vector<std::int64_t>(cfg.targets.size(), 0));
  e.batchHits.assign(cfg.recordTimes.size(), std::vector<std::vector<std::int64_t>>(
                                                 cfg.targets.size(), std::vector<std::int64_t>(kBatches, 0)));
  e.batchTotals.assign(kBatches, 0);
  for (int b = 0; b < kBatches; ++b)
    e.batchTotals[static_cast<std::size_t>(b)] = cfg.trajectories / kBatches + (b < cfg.trajectories % kBatches ? 1 : 0);
  if (cfg.storeStates)
    e.states.assign(cfg.recordTimes.size(), std::vector<Matrix>(static_cast<std::size_t>(cfg.trajectories)));
  return e;
}

void unflatten(const std::vector<std::int64_t>& flat, TrajectoryEnsemble& e) {
  const std::size_t targets = e.targets.size();
  for (std::size_t r = 0; r < e.recordTimes.size(); ++r)
    for (std::size_t j = 0; j < targets; ++j)
      for (std::size_t b = 0; b < static_cast<std::size_t>(kBatches); ++b) {
        const std::int64_t h = flat[(r * targets + j) * kBatches + b];
        e.batchHits[r][j][b] += h;
        e.hits[r][j] += h;
      }
}

double spectralDistanceToAverage(const Matrix& phi) {
  const auto n = phi.rows();
  const Matrix centered = phi - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::JacobiSVD<Matrix> svd(centered);
  return svd.singularValues()(0);
}

void consensusTrajectory(const GraphDistribution& d, const WeightRule& rule, int horizon, std::uint64_t seed,
                         std::int64_t k, std::vector<std::int64_t>& hits, double& maxColumnError) {
  const int n = d.vertexCount();
  StreamRng wrng(seed, static_cast<std::uint64_t>(k), kWeightStream);
  std::vector<Edge> scratch;
  std::vector<int> degrees;
  Matrix phi = Matrix::Identity(n, n);
  Matrix next(n, n);
  for (int t = 1; t <= horizon; ++t) {
    const auto edges = d.drawEdges(wrng, scratch);
    applyWeights(n, edges, rule, phi, next, degrees);
    phi.swap(next);
    const double err = (phi.colwise().sum().array() - 1.0).abs().maxCoeff();
    maxColumnError = std::max(maxColumnError, err);
    if (spectralDistanceToAverage(phi) > 1.0 / t) ++hits[static_cast<std::size_t>(t - 1)];
  }
}

ConsensusEstimate consensusCurve(const std::vector<std::int64_t>& hits, std::int64_t total, double maxErr) {
  ConsensusEstimate out;
  out.maxColumnSumError = maxErr;
  for (std::size_t t = 0; t < hits.size(); ++t) {
    RatePoint p;
    p.t = static_cast<int>(t + 1);
    p.hits = hits[t];
    p.total = total;
    if (p.hits > 0) p.rate = -std::log(static_cast<double>(p.hits) / total) / p.t;
    out.curve.push_back(p);
  }
  return out;
}

void requireConsensusArgs(int horizon, std::int64_t trajectories) {
  if (horizon < 1 || trajectories < 1) throw std::invalid_argument("horizon and trajectory count must be positive");
}

}  // namespace

WeightRule WeightRule::lazyUniform(double tau) {
  if (!(tau > 0.0 && tau <= 1.0)) throw std::invalid_argument("lazy weight tau must lie in (0, 1]");
  return {Kind::LazyUniform, tau};
}

void applyWeights(int n, std::span<const Edge> edges, const WeightRule& rule, const Matrix& in, Matrix& out,
                  std::vector<int>& degreeScratch) {
  if (rule.kind == WeightRule::Kind::IdealAveraging) {
    const Eigen::RowVectorXd avg = in.colwise().mean();
    out = avg.replicate(n, 1);
    return;
  }
  degreeScratch.assign(static_cast<std::size_t>(n), 0);
  for (const Edge& e : edges) {
    ++degreeScratch[static_cast<std::size_t>(e.u)];
    ++degreeScratch[static_cast<std::size_t>(e.v)];
  }
  const double scale = rule.kind == WeightRule::Kind::LazyUniform ? rule.tau : 1.0;
  out = in;
  for (const Edge& e : edges) {
    const int deg = std::max(degreeScratch[static_cast<std::size_t>(e.u)], degreeScratch[static_cast<std::size_t>(e.v)]);
    const double w = scale / (1.0 + deg);
    out.row(e.u) += w * (in.row(e.v) - in.row(e.u));
    out.row(e.v) += w * (in.row(e.u) - in.row(e.v));
  }
}

Matrix buildWeightMatrix(const Graph& realized, const WeightRule& rule) {
  const int n = realized.vertexCount();
  Matrix w(n, n);
  std::vector<int> scratch;
  applyWeights(n, realized.edges(), rule, Matrix::Identity(n, n), w, scratch);
  return w;
}

Matrix sampleWeightMatrix(const GraphDistribution& d, const WeightRule& rule, StreamRng& rng) {
  return buildWeightMatrix(d.sample(rng), rule);
}

Matrix stepStates(const Matrix& xPrev, const Matrix& z, const Matrix& w, int t) {
  if (t < 1) throw std::invalid_argument("time index must be at least 1");
  if (xPrev.rows() != z.rows() || xPrev.cols() != z.cols() || w.rows() != w.cols() || w.cols() != z.rows())
    throw std::invalid_argument("state, innovation and weight dimensions do not match");
  const double keep = static_cast<double>(t - 1) / t;
  return w * (keep * xPrev + z / static_cast<double>(t));
}

void SimulationConfig::validate() const {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  if (trajectories < 1) throw std::invalid_argument("trajectory count must be at least 1");
  if (recordTimes.empty()) throw std::invalid_argument("record times must be nonempty");
  for (std::size_t k = 0; k < recordTimes.size(); ++k) {
    if (recordTimes[k] < 1 || recordTimes[k] > horizon) throw std::invalid_argument("record time outside [1, horizon]");
    if (k > 0 && recordTimes[k] <= recordTimes[k - 1]) throw std::invalid_argument("record times must increase");
  }
  for (const NodeTarget& t : targets) {
    if (t.node < 0 || t.node >= network.vertexCount()) throw std::invalid_argument("target node outside range");
    if (t.set.dimension() != source.dimension()) throw std::invalid_argument("target dimension does not match source");
    if (std::holds_alternative<TargetSet::BallComplement>(t.set.shape()) &&
        std::get<TargetSet::BallComplement>(t.set.shape()).metric == Metric::Mahalanobis && source.degenerate())
      throw std::invalid_argument("Mahalanobis target needs a nondegenerate source");
  }
}

TrajectoryEnsemble runEnsemble(const SimulationConfig& cfg) {
  cfg.validate();
  TrajectoryEnsemble e = emptyEnsemble(cfg);
  const std::size_t cells = cfg.recordTimes.size() * cfg.targets.size() * kBatches;
  std::vector<std::vector<std::int64_t>> perThread(static_cast<std::size_t>(omp_get_max_threads()),
                                                   std::vector<std::int64_t>(cells, 0));
  auto* states = cfg.storeStates ? &e.states : nullptr;

#pragma omp parallel
  {
    auto& local = perThread[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < cfg.trajectories; ++k) runTrajectory(cfg, k, local, states);
  }
  for (const auto& local : perThread) unflatten(local, e);
  return e;
}

TrajectoryEnsemble serial::runEnsemble(const SimulationConfig& cfg) {
  cfg.validate();
  TrajectoryEnsemble e = emptyEnsemble(cfg);
  std::vector<std::int64_t> flat(cfg.recordTimes.size() * cfg.targets.size() * kBatches, 0);
  auto* states = cfg.storeStates ? &e.states : nullptr;
  for (std::int64_t k = 0; k < cfg.trajectories; ++k) runTrajectory(cfg, k, flat, states);
  unflatten(flat, e);
  return e;
}

std::vector<RatePoint> empiricalRateCurve(const TrajectoryEnsemble& e, std::size_t target) {
  if (target >= e.targets.size()) throw std::out_of_range("unknown target index " + std::to_string(target));
  std::vector<RatePoint> out;
  for (std::size_t r = 0; r < e.recordTimes.size(); ++r) {
    RatePoint p;
    p.t = e.recordTimes[r];
    p.hits = e.hits[r][target];
    p.total = e.total;
    if (p.hits > 0) p.rate = -std::log(static_cast<double>(p.hits) / static_cast<double>(p.total)) / p.t;
    if (!e.batchHits.empty()) {
      p.batchHits = e.batchHits[r][target];
      p.batchTotals = e.batchTotals;
    }
    out.push_back(p);
  }
  return out;
}

namespace {

struct Sample {
  double t = 0.0;
  double hits = 0.0;
  double total = 0.0;
};

double missProbability(const Sample& p) { return std::max(1.0 - p.hits / p.total, 1.0 / p.total); }

// Slope of log P_t + (1/2) log t; also returns the delta-method variance.
std::pair<double, double> correctedSlope(std::span<const Sample> pts) {
  double sw = 0.0;
  double st = 0.0;
  double sy = 0.0;
  std::vector<double> w(pts.size());
  std::vector<double> y(pts.size());
  for (std::size_t k = 0; k < pts.size(); ++k) {
    w[k] = pts[k].hits / missProbability(pts[k]);
    y[k] = std::log(pts[k].hits / pts[k].total) + 0.5 * std::log(pts[k].t);
    sw += w[k];
    st += w[k] * pts[k].t;
    sy += w[k] * y[k];
  }
  const double tBar = st / sw;
  const double yBar = sy / sw;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    sxx += w[k] * (pts[k].t - tBar) * (pts[k].t - tBar);
    sxy += w[k] * (pts[k].t - tBar) * (y[k] - yBar);
  }
  return {-sxy / sxx, 1.0 / sxx};
}

std::pair<double, double> levelAverage(std::span<const Sample> pts) {
  double rate = 0.0;
  double half = 0.0;
  for (const Sample& p : pts) {
    rate += -std::log(p.hits / p.total) / p.t;
    half += kZ95 * std::sqrt(missProbability(p) / p.hits) / p.t;
  }
  return {rate / static_cast<double>(pts.size()), half / static_cast<double>(pts.size())};
}

}  // namespace

TailRate tailRate(std::span<const RatePoint> curve, TailEstimator estimator, std::int64_t minHits) {
  std::vector<const RatePoint*> usable;
  for (const RatePoint& p : curve)
    if (p.rate && p.hits >= minHits) usable.push_back(&p);
  if (usable.empty()) throw std::domain_error("no recorded time has enough hits for a tail estimate");

  // Window: later half for the slope, last quartile for the level average
  // (also the fallback when fewer than 3 points support a slope).
  const bool slope = estimator == TailEstimator::PrefactorCorrectedSlope && usable.size() >= 3;
  const std::size_t start =
      slope ? usable.size() / 2 : usable.size() - std::max<std::size_t>(1, (usable.size() + 3) / 4);
  std::vector<const RatePoint*> window(usable.begin() + static_cast<std::ptrdiff_t>(start), usable.end());

  auto estimate = [&](int dropBatch, double* analyticHalf) {
    std::vector<Sample> pts;
    for (const RatePoint* p : window) {
      Sample s{static_cast<double>(p->t), static_cast<double>(p->hits), static_cast<double>(p->total)};
      if (dropBatch >= 0) {
        s.hits -= static_cast<double>(p->batchHits[static_cast<std::size_t>(dropBatch)]);
        s.total -= static_cast<double>(p->batchTotals[static_cast<std::size_t>(dropBatch)]);
        s.hits = std::max(s.hits, 0.5);
      }
      pts.push_back(s);
    }
    if (slope) {
      const auto [r, var] = correctedSlope(pts);
      if (analyticHalf) *analyticHalf = kZ95 * std::sqrt(var);
      return r;
    }
    const auto [r, half] = levelAverage(pts);
    if (analyticHalf) *analyticHalf = half;
    return r;
  };

  TailRate out;
  double analytic = 0.0;
  out.rate = estimate(-1, &analytic);
  out.halfWidth = analytic;
  out.pointsUsed = static_cast<int>(window.size());

  const std::size_t batches = window.front()->batchHits.size();
  bool haveBatches = batches >= 2;
  for (const RatePoint* p : window) haveBatches = haveBatches && p->batchHits.size() == batches && p->batchTotals.size() == batches;
  if (haveBatches) {
    // Delete-a-batch jackknife over trajectory batches.
    std::vector<double> reps(batches);
    double mean = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      reps[b] = estimate(static_cast<int>(b), nullptr);
      mean += reps[b];
    }
    mean /= static_cast<double>(batches);
    double ss = 0.0;
    for (double r : reps) ss += (r - mean) * (r - mean);
    const double g = static_cast<double>(batches);
    const double quantile = boost::math::quantile(boost::math::students_t(g - 1.0), 0.975);
    out.halfWidth = quantile * std::sqrt((g - 1.0) / g * ss);
  }
  return out;
}

BoundReport boundComparison(std::span<const RatePoint> curve, double lower, double upper, TailEstimator estimator) {
  if (lower > upper) throw std::invalid_argument("lower bound exceeds upper bound");
  BoundReport r;
  r.tail = tailRate(curve, estimator);
  r.lower = lower;
  r.upper = upper;
  r.withinBracket = r.tail.rate >= lower - r.tail.halfWidth && r.tail.rate <= upper + r.tail.halfWidth;
  return r;
}

ConsensusEstimate consensusRateEstimate(const GraphDistribution& d, const WeightRule& rule, int horizon,
                                        std::int64_t trajectories, std::uint64_t seed) {
  requireConsensusArgs(horizon, trajectories);
  const auto threads = static_cast<std::size_t>(omp_get_max_threads());
  std::vector<std::vector<std::int64_t>> hits(threads, std::vector<std::int64_t>(static_cast<std::size_t>(horizon), 0));
  std::vector<double> errs(threads, 0.0);
#pragma omp parallel
  {
    const auto me = static_cast<std::size_t>(omp_get_thread_num());
#pragma omp for schedule(static)
    for (std::int64_t k = 0; k < trajectories; ++k) consensusTrajectory(d, rule, horizon, seed, k, hits[me], errs[me]);
  }
  std::vector<std::int64_t> total(static_cast<std::size_t>(horizon), 0);
  for (const auto& h : hits)
    for (std::size_t t = 0; t < total.size(); ++t) total[t] += h[t];
  return consensusCurve(total, trajectories, *std::max_element(errs.begin(), errs.end()));
}

ConsensusEstimate serial::consensusRateEstimate(const GraphDistribution& d, const WeightRule& rule, int horizon,
                                                std::int64_t trajectories, std::uint64_t seed) {
  requireConsensusArgs(horizon, trajectories);
  std::vector<std::int64_t> hits(static_cast<std::size_t>(horizon), 0);
  double err = 0.0;
  for (std::int64_t k = 0; k < trajectories; ++k) consensusTrajectory(d, rule, horizon, seed, k, hits, err);
  return consensusCurve(hits, trajectories, err);
}

}  // namespace ldnet
