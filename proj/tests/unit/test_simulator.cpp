#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"

#include "ldnet/simulator.hpp"

using namespace ldnet;

namespace {

Vector scalarPoint(double x) { return Vector::Constant(1, x); }

GraphDistribution fixedGraph(const Graph& g) { return GraphDistribution::explicitSupport({{g, 1.0}}); }

GraphDistribution alternatingModel() {
  return GraphDistribution::explicitSupport({{Graph(3, {{0, 1}}), 0.8}, {Graph(3, {{1, 2}}), 0.2}});
}

std::vector<int> range(int from, int to) {
  std::vector<int> out;
  for (int t = from; t <= to; ++t) out.push_back(t);
  return out;
}

std::vector<NodeTarget> ballTargets(int nodes, double radius) {
  std::vector<NodeTarget> out;
  for (int i = 0; i < nodes; ++i) out.push_back({i, TargetSet::ballComplement(scalarPoint(0.0), radius)});
  return out;
}

SimulationConfig scalarConfig(GraphDistribution d, WeightRule rule, int horizon, std::int64_t runs, std::uint64_t seed,
                              double radius) {
  const int n = d.vertexCount();
  return SimulationConfig{.network = std::move(d),
                          .weights = rule,
                          .source = GaussianSource::standard(),
                          .horizon = horizon,
                          .trajectories = runs,
                          .seed = seed,
                          .targets = ballTargets(n, radius),
                          .recordTimes = range(1, horizon),
                          .storeStates = false};
}

Graph randomGraph(int n, std::mt19937_64& gen) {
  std::bernoulli_distribution keep(0.4);
  std::vector<Edge> edges;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (keep(gen)) edges.push_back({u, v});
  return Graph(n, edges);
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

TEST_CASE("sampleWeightMatrix examples") {
  StreamRng rng(0, 0, kWeightStream);
  const Matrix chain = sampleWeightMatrix(fixedGraph(Graph::chain(3)), WeightRule::metropolis(), rng);
  CHECK(chain(0, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(chain(0, 0) == doctest::Approx(2.0 / 3.0));
  CHECK(chain(1, 1) == doctest::Approx(1.0 / 3.0));
  CHECK(chain(0, 2) == 0.0);

  const Matrix empty = sampleWeightMatrix(fixedGraph(Graph(3)), WeightRule::metropolis(), rng);
  CHECK(empty.isApprox(Matrix::Identity(3, 3)));

  const Matrix single = sampleWeightMatrix(fixedGraph(Graph(3, {{0, 1}})), WeightRule::metropolis(), rng);
  CHECK(single(2, 2) == 1.0);
  CHECK(single(0, 1) == doctest::Approx(0.5));

  const Matrix lazy = buildWeightMatrix(Graph::chain(3), WeightRule::lazyUniform(0.5));
  CHECK(lazy(0, 1) == doctest::Approx(1.0 / 6.0));
  CHECK(lazy(1, 1) == doctest::Approx(2.0 / 3.0));
  const Matrix ideal = buildWeightMatrix(Graph(4), WeightRule::idealAveraging());
  CHECK(ideal.isApprox(Matrix::Constant(4, 4, 0.25)));
  CHECK_THROWS_AS(WeightRule::lazyUniform(0.0), std::invalid_argument);
  CHECK_THROWS_AS(WeightRule::lazyUniform(1.5), std::invalid_argument);
}

TEST_CASE("property: weight matrices are symmetric stochastic with positive diagonal") {
  std::mt19937_64 gen(12);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 8;
    const Graph g = randomGraph(n, gen);
    for (const WeightRule rule : {WeightRule::metropolis(), WeightRule::lazyUniform(0.3), WeightRule::idealAveraging()}) {
      const Matrix w = buildWeightMatrix(g, rule);
      CHECK((w - w.transpose()).cwiseAbs().maxCoeff() < 1e-15);
      CHECK((w.rowwise().sum().array() - 1.0).abs().maxCoeff() < 1e-14);
      CHECK(w.minCoeff() >= 0.0);
      CHECK(w.diagonal().minCoeff() > 0.0);

      Matrix in(n, 2);
      for (int r = 0; r < n; ++r) in.row(r) << normal(gen), normal(gen);
      Matrix out(n, 2);
      std::vector<int> scratch;
      applyWeights(n, g.edges(), rule, in, out, scratch);
      CHECK((out - w * in).cwiseAbs().maxCoeff() < 1e-14);
    }
  }
}

TEST_CASE("stepStates examples") {
  Matrix z(3, 1);
  z << 1.0, -2.0, 0.5;
  CHECK(stepStates(Matrix::Zero(3, 1), z, Matrix::Identity(3, 3), 1).isApprox(z));

  // Ideal averaging: the state is the running mean of all innovations.
  std::mt19937_64 gen(1);
  std::normal_distribution<double> normal;
  const Matrix j = Matrix::Constant(3, 3, 1.0 / 3.0);
  Matrix x = Matrix::Zero(3, 2);
  double sum0 = 0.0, sum1 = 0.0;
  Matrix zt(3, 2);
  for (int t = 1; t <= 25; ++t) {
    for (int r = 0; r < 3; ++r) {
      zt(r, 0) = normal(gen);
      zt(r, 1) = normal(gen);
      sum0 += zt(r, 0);
      sum1 += zt(r, 1);
    }
    x = stepStates(x, zt, j, t);
    for (int r = 0; r < 3; ++r) {
      CHECK(x(r, 0) == doctest::Approx(sum0 / (3.0 * t)).epsilon(1e-13));
      CHECK(x(r, 1) == doctest::Approx(sum1 / (3.0 * t)).epsilon(1e-13));
    }
  }

  Matrix one = Matrix::Zero(1, 1);
  double total = 0.0;
  for (int t = 1; t <= 10; ++t) {
    const double v = normal(gen);
    total += v;
    one = stepStates(one, Matrix::Constant(1, 1, v), Matrix::Identity(1, 1), t);
    CHECK(one(0, 0) == doctest::Approx(total / t).epsilon(1e-13));
  }
  CHECK_THROWS_AS(stepStates(Matrix::Zero(3, 1), z, Matrix::Identity(2, 2), 1), std::invalid_argument);
  CHECK_THROWS_AS(stepStates(Matrix::Zero(3, 1), z, Matrix::Identity(3, 3), 0), std::invalid_argument);
}

TEST_CASE("config validation") {
  auto cfg = scalarConfig(alternatingModel(), WeightRule::metropolis(), 10, 100, 1, 1.0);
  CHECK_NOTHROW(cfg.validate());
  auto bad = cfg;
  bad.recordTimes = {3, 2};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.recordTimes = {11};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.trajectories = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.targets.push_back({3, TargetSet::ballComplement(scalarPoint(0.0), 1.0)});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = cfg;
  bad.targets.push_back({0, TargetSet::ballComplement(Vector::Zero(2), 1.0)});
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("runEnsemble with a point-mass source never hits") {
  auto cfg = scalarConfig(alternatingModel(), WeightRule::metropolis(), 15, 500, 3, 0.1);
  cfg.source = GaussianSource::pointMass(scalarPoint(0.0));
  cfg.storeStates = true;
  const TrajectoryEnsemble e = runEnsemble(cfg);
  for (const auto& row : e.hits)
    for (std::int64_t h : row) CHECK(h == 0);
  for (const auto& slice : e.states)
    for (const Matrix& x : slice) CHECK(x.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("runEnsemble reproduces the innovation stream when W is the identity") {
  const int n = 3;
  auto cfg = scalarConfig(fixedGraph(Graph(n)), WeightRule::metropolis(), 1, 1, 42, 1.0);
  cfg.storeStates = true;
  const TrajectoryEnsemble once = runEnsemble(cfg);
  StreamRng zrng(42, 0, kInnovationStream);
  std::normal_distribution<double> normal;
  for (int i = 0; i < n; ++i) CHECK(once.states[0][0](i, 0) == normal(zrng));

  // Over longer horizons each node keeps the running mean of its own stream.
  cfg.horizon = 12;
  cfg.recordTimes = range(1, 12);
  cfg.trajectories = 4;
  const TrajectoryEnsemble longer = runEnsemble(cfg);
  for (int k = 0; k < 4; ++k) {
    StreamRng rng(42, static_cast<std::uint64_t>(k), kInnovationStream);
    std::normal_distribution<double> nd;
    std::vector<double> sums(n, 0.0);
    for (int t = 1; t <= 12; ++t) {
      for (int i = 0; i < n; ++i) sums[static_cast<std::size_t>(i)] += nd(rng);
      for (int i = 0; i < n; ++i)
        CHECK(longer.states[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(k)](i, 0) ==
              doctest::Approx(sums[static_cast<std::size_t>(i)] / t).epsilon(1e-13));
    }
  }
}

TEST_CASE("serial and parallel ensembles are identical; seeds are deterministic") {
  auto cfg = scalarConfig(GraphDistribution::iidFailures(Graph::star(5), 0.3), WeightRule::metropolis(), 30, 3000, 9, 0.4);
  cfg.storeStates = true;
  const TrajectoryEnsemble a = runEnsemble(cfg);
  const TrajectoryEnsemble b = serial::runEnsemble(cfg);
  const TrajectoryEnsemble c = runEnsemble(cfg);
  CHECK(a.hits == b.hits);
  CHECK(a.batchHits == b.batchHits);
  CHECK(a.batchTotals == b.batchTotals);
  CHECK(a.hits == c.hits);
  for (std::size_t t = 0; t < a.states.size(); ++t)
    for (std::size_t k = 0; k < a.states[t].size(); ++k) CHECK(a.states[t][k] == b.states[t][k]);

  std::int64_t split = 0;
  for (std::int64_t v : a.batchHits.back().front()) split += v;
  CHECK(split == a.hits.back().front());
  std::int64_t totals = 0;
  for (std::int64_t v : a.batchTotals) totals += v;
  CHECK(totals == a.total);

  cfg.seed = 10;
  CHECK(runEnsemble(cfg).hits != a.hits);
}

TEST_CASE("empiricalRateCurve examples") {
  TrajectoryEnsemble e;
  e.recordTimes = {1, 2, 3};
  e.targets = ballTargets(1, 1.0);
  e.total = 1'000'000'000'000;
  const auto tail = static_cast<std::int64_t>(std::llround(1e12 * std::exp(-3.0)));
  e.hits = {{e.total}, {0}, {tail}};
  const auto curve = empiricalRateCurve(e, 0);
  REQUIRE(curve.size() == 3);
  REQUIRE(curve[0].rate);
  CHECK(*curve[0].rate == 0.0);
  CHECK_FALSE(curve[1].rate.has_value());
  REQUIRE(curve[2].rate);
  CHECK(*curve[2].rate == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_THROWS_AS(empiricalRateCurve(e, 1), std::out_of_range);
}

TEST_CASE("tailRate recovers synthetic decay rates") {
  std::vector<RatePoint> corrected, pure;
  const std::int64_t total = 1'000'000'000'000'000;
  for (int t = 1; t <= 60; ++t) {
    const double p1 = 0.4 * std::exp(-0.3 * t) / std::sqrt(t);
    const double p2 = std::exp(-0.3 * t);
    for (auto [curve, p] : {std::pair{&corrected, p1}, std::pair{&pure, p2}}) {
      RatePoint pt;
      pt.t = t;
      pt.total = total;
      pt.hits = std::llround(p * static_cast<double>(total));
      pt.rate = -std::log(static_cast<double>(pt.hits) / static_cast<double>(total)) / t;
      curve->push_back(pt);
    }
  }
  const TailRate slope = tailRate(corrected, TailEstimator::PrefactorCorrectedSlope);
  CHECK(slope.rate == doctest::Approx(0.3).epsilon(1e-6));
  CHECK(slope.halfWidth > 0.0);
  CHECK(slope.pointsUsed >= 3);
  CHECK(tailRate(pure, TailEstimator::LevelAverage).rate == doctest::Approx(0.3).epsilon(1e-9));

  std::vector<RatePoint> empty(3);
  for (int t = 0; t < 3; ++t) empty[static_cast<std::size_t>(t)] = {t + 1, 0, 100, std::nullopt, {}, {}};
  CHECK_THROWS_AS(tailRate(empty), std::domain_error);

  CHECK_THROWS_AS(boundComparison(corrected, 0.5, 0.4), std::invalid_argument);
  CHECK(boundComparison(corrected, 0.29, 0.31).withinBracket);
  CHECK_FALSE(boundComparison(corrected, 0.5, 0.6).withinBracket);
}

TEST_CASE("always-connected network attains the fusion rate") {
  // Metropolis on K3 is exactly J_3, so the tail rate is N eps^2 / 2.
  const double eps = 0.3;
  const auto cfg = scalarConfig(fixedGraph(Graph::complete(3)), WeightRule::metropolis(), 40, 100000, 5, eps);
  const TrajectoryEnsemble e = runEnsemble(cfg);
  const double theory = 3.0 * eps * eps / 2.0;
  for (std::size_t j = 0; j < 3; ++j) {
    const auto curve = empiricalRateCurve(e, j);
    const BoundReport r = boundComparison(curve, theory, theory);
    INFO("node " << j << " rate " << r.tail.rate << " +/- " << r.tail.halfWidth);
    CHECK(r.withinBracket);
  }
}

TEST_CASE("fusion center is at least as accurate as any node") {
  const double eps = 0.5;
  const auto node = scalarConfig(alternatingModel(), WeightRule::metropolis(), 25, 100000, 17, eps);
  const auto fusion = scalarConfig(alternatingModel(), WeightRule::idealAveraging(), 25, 100000, 17, eps);
  const TrajectoryEnsemble en = runEnsemble(node);
  const TrajectoryEnsemble ef = runEnsemble(fusion);
  for (std::size_t j = 0; j < 3; ++j) {
    const TailRate rn = tailRate(empiricalRateCurve(en, j));
    const TailRate rf = tailRate(empiricalRateCurve(ef, j));
    INFO("node " << j << ": " << rn.rate << " +/- " << rn.halfWidth << ", fusion " << rf.rate << " +/- " << rf.halfWidth);
    CHECK(rf.rate + rf.halfWidth >= rn.rate - rn.halfWidth);
    for (std::size_t t = 0; t < en.recordTimes.size(); ++t) {
      const double pn = static_cast<double>(en.hits[t][j]) / en.total;
      const double pf = static_cast<double>(ef.hits[t][j]) / ef.total;
      CHECK(pf <= pn + 4.0 * std::sqrt(pn * (1.0 - pn) / en.total + 1e-12));
    }
  }
}

TEST_CASE("states converge to the mean on a connected-in-expectation network") {
  auto cfg = scalarConfig(GraphDistribution::iidFailures(Graph::circulant(4, 2), 0.3), WeightRule::metropolis(), 2000,
                          200, 23, 1.0);
  cfg.recordTimes = {20, 50, 100, 200, 500, 1000, 2000};
  cfg.storeStates = true;
  const TrajectoryEnsemble e = runEnsemble(cfg);
  for (int i = 0; i < 4; ++i) {
    double previous = INFINITY;
    for (std::size_t t = 0; t < e.recordTimes.size(); ++t) {
      std::vector<double> dist;
      for (const Matrix& x : e.states[t]) dist.push_back(std::abs(x(i, 0)));
      const double med = median(dist);
      CHECK(med < previous);
      previous = med;
    }
    CHECK(previous < 0.05);
  }
}

TEST_CASE("consensusRateEstimate") {
  const ConsensusEstimate complete =
      consensusRateEstimate(fixedGraph(Graph::complete(4)), WeightRule::metropolis(), 20, 2000, 1);
  for (const RatePoint& p : complete.curve) {
    CHECK(p.hits == 0);
    CHECK_FALSE(p.rate.has_value());
  }
  CHECK(complete.maxColumnSumError < 1e-9);

  // Local decay slopes rise toward J and never overshoot it.
  struct Case {
    GraphDistribution d;
    double j;
    int horizon;
  };
  for (const Case& c : {Case{alternatingModel(), std::abs(std::log(0.8)), 60},
                        Case{GraphDistribution::iidFailures(Graph::chain(3), 0.5), std::log(2.0), 30}}) {
    const ConsensusEstimate est = consensusRateEstimate(c.d, WeightRule::metropolis(), c.horizon, 50000, 4);
    CHECK(est.maxColumnSumError < 1e-9);
    const auto& curve = est.curve;
    const auto at = [&](int t) { return curve[static_cast<std::size_t>(t - 1)]; };
    const int half = c.horizon / 2;
    REQUIRE(at(c.horizon).hits >= 20);
    const double early = std::log(static_cast<double>(at(5).hits) / at(half).hits) / (half - 5);
    const double late = std::log(static_cast<double>(at(half).hits) / at(c.horizon).hits) / (c.horizon - half);
    INFO("early slope " << early << ", late slope " << late << ", J " << c.j);
    CHECK(late > early);
    CHECK(late <= 1.1 * c.j);
    CHECK(late >= 0.4 * c.j);
    CHECK(*at(c.horizon).rate > *at(10).rate);

    const ConsensusEstimate ref = serial::consensusRateEstimate(c.d, WeightRule::metropolis(), 12, 2000, 4);
    const ConsensusEstimate par = consensusRateEstimate(c.d, WeightRule::metropolis(), 12, 2000, 4);
    for (std::size_t t = 0; t < ref.curve.size(); ++t) CHECK(ref.curve[t].hits == par.curve[t].hits);
  }
}
