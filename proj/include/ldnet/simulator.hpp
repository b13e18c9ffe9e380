#pragma once

// Monte Carlo engine for the consensus+innovations recursion
//   X_t = W_t ( (t-1)/t X_{t-1} + Z_t / t )
// over i.i.d. random weight matrices, with tail-probability bookkeeping.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ldnet/graph_model.hpp"
#include "ldnet/rate_functions.hpp"
#include "ldnet/rng.hpp"

namespace ldnet {

struct WeightRule {
  enum class Kind { Metropolis, LazyUniform, IdealAveraging };
  Kind kind = Kind::Metropolis;
  double tau = 1.0;  // LazyUniform only

  static WeightRule metropolis() { return {}; }
  /// tau * Metropolis + (1 - tau) * I; tau in (0, 1].
  static WeightRule lazyUniform(double tau);
  /// W = J_N regardless of the drawn topology (fusion-center reference).
  static WeightRule idealAveraging() { return {Kind::IdealAveraging, 1.0}; }
};

/// Dense weight matrix of one realized topology.
Matrix buildWeightMatrix(const Graph& realized, const WeightRule& rule);
Matrix sampleWeightMatrix(const GraphDistribution& d, const WeightRule& rule, StreamRng& rng);

/// One consensus+innovations step with dense W. Rows are nodes.
Matrix stepStates(const Matrix& xPrev, const Matrix& z, const Matrix& w, int t);

/// In-place sparse application out = W(realized) * in, used by the ensembles.
void applyWeights(int n, std::span<const Edge> edges, const WeightRule& rule, const Matrix& in, Matrix& out,
                  std::vector<int>& degreeScratch);

struct NodeTarget {
  Vertex node = 0;
  TargetSet set;
};

struct SimulationConfig {
  GraphDistribution network;
  WeightRule weights;
  GaussianSource source;
  int horizon = 1;
  std::int64_t trajectories = 1;
  std::uint64_t seed = 0;
  std::vector<NodeTarget> targets;
  std::vector<int> recordTimes;  // strictly increasing, within [1, horizon]
  bool storeStates = false;      // keep X at every record time for every trajectory

  /// Throws std::invalid_argument on any violated invariant.
  void validate() const;
};

/// Trajectory k belongs to batch k mod kBatches; batch counts feed the
/// jackknife confidence interval of the tail-rate estimate.
inline constexpr int kBatches = 20;

struct TrajectoryEnsemble {
  std::vector<int> recordTimes;
  std::vector<NodeTarget> targets;
  std::int64_t total = 0;
  /// hits[timeIndex][targetIndex]
  std::vector<std::vector<std::int64_t>> hits;
  /// batchHits[timeIndex][targetIndex][batch]
  std::vector<std::vector<std::vector<std::int64_t>>> batchHits;
  std::vector<std::int64_t> batchTotals;
  /// states[timeIndex][trajectory], filled when storeStates is set.
  std::vector<std::vector<Matrix>> states;
};

TrajectoryEnsemble runEnsemble(const SimulationConfig& cfg);

namespace serial {
TrajectoryEnsemble runEnsemble(const SimulationConfig& cfg);
}  // namespace serial

struct RatePoint {
  int t = 0;
  std::int64_t hits = 0;
  std::int64_t total = 0;
  std::optional<double> rate;  // -(1/t) log(hits/total); empty when hits = 0
  std::vector<std::int64_t> batchHits;    // optional per-batch split of hits
  std::vector<std::int64_t> batchTotals;  // same length as batchHits
};

/// Throws std::out_of_range for an unknown target index.
std::vector<RatePoint> empiricalRateCurve(const TrajectoryEnsemble& e, std::size_t target);

enum class TailEstimator {
  /// Weighted least-squares slope of log P_t + (1/2) log t over the later half
  /// of usable times, weights hits/(1-P). Removes the t^{-1/2} prefactor bias.
  PrefactorCorrectedSlope,
  /// Mean of -(1/t) log P_t over the last quartile of usable times.
  LevelAverage,
};

struct TailRate {
  double rate = 0.0;
  /// 95% half-width: delete-a-batch jackknife with a Student-t quantile when
  /// batch counts are present (valid under the correlation between times),
  /// else the binomial delta method.
  double halfWidth = 0.0;
  int pointsUsed = 0;
};

/// Usable points have at least minHits hits. Throws std::domain_error when no
/// point is usable.
TailRate tailRate(std::span<const RatePoint> curve, TailEstimator estimator = TailEstimator::PrefactorCorrectedSlope,
                  std::int64_t minHits = 10);

struct BoundReport {
  TailRate tail;
  double lower = 0.0;
  double upper = 0.0;
  bool withinBracket = false;  // tail.rate in [lower - hw, upper + hw]
};

/// Throws std::invalid_argument when lower > upper and std::domain_error when
/// the curve has no usable point.
BoundReport boundComparison(std::span<const RatePoint> curve, double lower, double upper,
                            TailEstimator estimator = TailEstimator::PrefactorCorrectedSlope);

struct ConsensusEstimate {
  std::vector<RatePoint> curve;       // -(1/t) log P(||W_t...W_1 - J|| > 1/t)
  double maxColumnSumError = 0.0;     // max |1 - column sum of the product|
};

ConsensusEstimate consensusRateEstimate(const GraphDistribution& d, const WeightRule& rule, int horizon,
                                        std::int64_t trajectories, std::uint64_t seed);

namespace serial {
ConsensusEstimate consensusRateEstimate(const GraphDistribution& d, const WeightRule& rule, int horizon,
                                        std::int64_t trajectories, std::uint64_t seed);
}  // namespace serial

}  // namespace ldnet
