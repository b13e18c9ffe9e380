#pragma once

// Non-Bayesian social learning over random networks: Bayesian update of the
// public belief, geometric merging of neighbours' beliefs, and the Gaussian
// closed forms that map belief log-ratios onto consensus+innovations.
//
// Hypothesis indices are 0-based; the last hypothesis (index M-1) generates
// the data. Log-ratio vectors have M-1 entries, one per wrong hypothesis.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ldnet/graph_model.hpp"
#include "ldnet/rate_functions.hpp"
#include "ldnet/simulator.hpp"

namespace ldnet {

/// M scalar Gaussian hypotheses N(mu_m, sigma^2); mu_{M-1} is the truth.
class HypothesisModel {
 public:
  /// Requires at least two finite means and sigma > 0.
  HypothesisModel(std::vector<double> means, double sigma);

  int hypothesisCount() const noexcept { return static_cast<int>(means_.size()); }
  double sigma() const noexcept { return sigma_; }
  const std::vector<double>& means() const noexcept { return means_; }
  double trueMean() const noexcept { return means_.back(); }
  /// d_m = mu_m - mu_M.
  const Vector& d() const noexcept { return d_; }
  /// D_KL,m = d_m^2 / (2 sigma^2).
  const Vector& dkl() const noexcept { return dkl_; }
  double logDensity(int m, double y) const;

  /// x(zeta) = (zeta / sigma^2) d - D_KL: the line carrying the log-ratio mean.
  Vector lineAt(double zeta) const;
  /// Scalar source of zeta: N(0, sigma^2).
  GaussianSource zetaSource() const { return GaussianSource::scalar(0.0, sigma_ * sigma_); }

  /// One affine branch of f: zeta d/sigma^2 - D on [lo, hi).
  struct Branch {
    double d = 0.0;
    double dkl = 0.0;
    double lo = 0.0;
    double hi = 0.0;
  };
  /// Branches of f sorted by d (ties collapsed), including the zero line.
  const std::vector<Branch>& branches() const noexcept { return branches_; }

 private:
  std::vector<double> means_;
  double sigma_;
  Vector d_;
  Vector dkl_;
  std::vector<Branch> branches_;
};

/// Row i holds node i's log beliefs over the M hypotheses.
struct BeliefState {
  Matrix logPrivate;  // log q_{i,t}
  Matrix logPublic;   // log b_{i,t}

  static BeliefState uniform(int nodes, int hypotheses);
};

/// Per-node log-ratios against the true hypothesis, scaled by 1/t.
struct LogRatioState {
  Matrix publicRatios;   // (1/t) log(b^m / b^M)
  Matrix privateRatios;  // (1/t) log(q^m / q^M)
};

/// log b^m = log f_m(Y_i) + log q^m_{t-1} - normalizer.
void bayesUpdate(BeliefState& state, const Vector& y, const HypothesisModel& model);
/// log q^m = sum_j W_ij log b_j^m - normalizer (self term included).
void geometricMerge(BeliefState& state, const Matrix& w);
/// L_i^m = (Y_i - mu_M) d_m / sigma^2 - D_KL,m.
Matrix logLikelihoodRatios(const Vector& y, const HypothesisModel& model);
/// bayesUpdate followed by geometricMerge; returns the log-ratios at time t.
LogRatioState slStep(BeliefState& state, const Vector& y, const Matrix& w, const HypothesisModel& model, int t);
LogRatioState logRatios(const BeliefState& state, int t);

/// Lambda_M(lambda) = -lambda^T D_KL + (lambda^T d)^2 / (2 sigma^2).
double lambdaM(const HypothesisModel& model, const Vector& lambda);
/// zeta^2 / (2 sigma^2) on the line x(zeta), +inf off it.
double rateIM(const HypothesisModel& model, const Vector& x);

/// f(zeta) = max{0, zeta d_m / sigma^2 - D_KL,m}: branch evaluation.
double piecewiseF(const HypothesisModel& model, double zeta);
/// f by direct maximisation over the lines.
double piecewiseFDirect(const HypothesisModel& model, double zeta);
/// g_m along the line, via the active branch of f. m in [0, M-2].
double gM(const HypothesisModel& model, int m, double zeta);
/// g_m(x) = x_m - max{0, x_1..x_{M-1}} at x = x(zeta).
double gMDirect(const HypothesisModel& model, int m, double zeta);

/// R_{i,m}(z) = inf{ phi(zeta^2/(2 sigma^2)) : g_m(zeta) = z }, where phi is
/// the envelope profile (the envelope's base should be model.zetaSource()).
/// +inf for an empty level set.
double beliefRate(const HypothesisModel& model, const EnvelopeRate& envelope, int m, double z);
/// inf of R_{i,m} over [lo, hi].
double beliefIntervalRate(const HypothesisModel& model, const EnvelopeRate& envelope, int m, double lo, double hi);

struct SocialLearningConfig {
  GraphDistribution network;
  WeightRule weights;
  HypothesisModel model;
  int horizon = 1;
  std::int64_t trajectories = 1;
  std::uint64_t seed = 0;
  std::vector<int> recordTimes;  // strictly increasing, within [1, horizon]

  void validate() const;
};

struct SocialLearningEnsemble {
  std::vector<int> recordTimes;
  std::int64_t total = 0;
  int nodes = 0;
  int hypotheses = 0;
  /// logTrueBelief[timeIndex](trajectory, node) = log b^M
  std::vector<Matrix> logTrueBelief;
  /// publicRatios[timeIndex][m](trajectory, node) = (1/t) log(b^m / b^M)
  std::vector<std::vector<Matrix>> publicRatios;
  /// max |b^M - 1/(1 + sum_m exp(t X^m))| over all records
  double maxReconstructionError = 0.0;
};

SocialLearningEnsemble runSocialLearning(const SocialLearningConfig& cfg);

namespace serial {
SocialLearningEnsemble runSocialLearning(const SocialLearningConfig& cfg);
}  // namespace serial

struct NodeConvergence {
  double medianTrueBelief = 0.0;                // at the final record time
  double fractionConverged = 0.0;               // share of runs with b^M > 1 - 1e-3
  std::vector<double> medianLogRatio;           // per wrong hypothesis, final time
};

struct ConvergenceReport {
  std::vector<NodeConvergence> nodes;
  double maxReconstructionError = 0.0;
  bool reconstructionHolds = false;  // error <= 1e-9
};

ConvergenceReport trueBeliefConvergenceCheck(const SocialLearningEnsemble& e);

struct EquivalenceReport {
  double maxStateDeviation = 0.0;         // private log-ratios vs C+I state
  double maxIntermediateDeviation = 0.0;  // public log-ratios vs innovation-step value
  int steps = 0;
  double maxDeviation() const noexcept { return std::max(maxStateDeviation, maxIntermediateDeviation); }
};

/// Drives social learning and consensus+innovations (Z = L) with one shared
/// (W_t, Y_t) sequence and compares the log-ratio states step by step.
EquivalenceReport slEquivalence(const GraphDistribution& network, const WeightRule& rule,
                                const HypothesisModel& model, int steps, std::uint64_t seed);

}  // namespace ldnet
