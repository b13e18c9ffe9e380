#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>

#include "doctest.h"

#include "ldnet/config_io.hpp"

using namespace ldnet;

namespace {

std::filesystem::path writeTemp(const std::string& name, const std::string& text) {
  const auto dir = std::filesystem::temp_directory_path() / "ldnet_config_tests";
  std::filesystem::create_directories(dir);
  const auto path = dir / name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST_CASE("formatDouble round-trips exactly") {
  std::mt19937_64 gen(1);
  std::uniform_int_distribution<std::uint64_t> bits;
  int checked = 0;
  while (checked < 20000) {
    const std::uint64_t b = bits(gen);
    double v;
    std::memcpy(&v, &b, sizeof v);
    if (!std::isfinite(v)) continue;
    CHECK(parseReal(Json(formatDouble(v)), "v") == v);
    ++checked;
  }
  CHECK(formatDouble(0.1) == "0.1");
  CHECK(formatDouble(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(std::isinf(parseReal(Json("inf"), "v")));
  CHECK(parseReal(Json(0.25), "v") == 0.25);
  CHECK_THROWS_AS(parseReal(Json("0.1x"), "v"), ConfigError);
  CHECK_THROWS_AS(parseReal(Json::array(), "v"), ConfigError);
}

TEST_CASE("network round trip") {
  const auto ex = GraphDistribution::explicitSupport(
      {{Graph(4, {{0, 1}, {2, 3}}), 0.1}, {Graph(4, {{1, 2}}), 0.7}, {Graph(4), 0.2}});
  const Json j = networkToJson(ex);
  CHECK(j.at("vertices") == 4);
  CHECK(j.at("support")[0].at("edges")[0] == Json::array({1, 2}));
  const GraphDistribution back = networkFromJson(Json::parse(j.dump()));
  const auto& a = std::get<GraphDistribution::Explicit>(ex.model()).support;
  const auto& b = std::get<GraphDistribution::Explicit>(back.model()).support;
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].graph == b[k].graph);
    CHECK(a[k].probability == b[k].probability);
  }
  CHECK(networkToJson(back) == j);

  const auto iid = GraphDistribution::iidFailures(Graph::circulant(6, 2), 1.0 / 3.0);
  const GraphDistribution iidBack = networkFromJson(Json::parse(networkToJson(iid).dump()));
  const auto& m = std::get<GraphDistribution::IidFailures>(iidBack.model());
  CHECK(m.base == Graph::circulant(6, 2));
  CHECK(m.failProbability == 1.0 / 3.0);

  const Json gen = Json::parse(R"({"model": "iid_failures", "vertices": 5,
                                   "generator": {"kind": "star"}, "fail_probability": "0.3"})");
  CHECK(std::get<GraphDistribution::IidFailures>(networkFromJson(gen).model()).base == Graph::star(5));
}

TEST_CASE("malformed networks are config errors") {
  CHECK_THROWS_AS(networkFromJson(Json::parse(R"({"model": "markov", "vertices": 3})")), ConfigError);
  CHECK_THROWS_AS(networkFromJson(Json::parse(R"({"model": "explicit", "vertices": 3,
      "support": [{"edges": [[1, 2]], "probability": "0.5"}]})")),
                  ConfigError);
  CHECK_THROWS_AS(networkFromJson(Json::parse(R"({"model": "explicit", "vertices": 3,
      "support": [{"edges": [[1, 4]], "probability": "1"}]})")),
                  ConfigError);
  CHECK_THROWS_AS(networkFromJson(Json::parse(R"({"model": "iid_failures", "vertices": 3,
      "generator": {"kind": "torus"}, "fail_probability": "0.5"})")),
                  ConfigError);
}

TEST_CASE("weights, source, targets and hypotheses round trip") {
  for (const WeightRule r : {WeightRule::metropolis(), WeightRule::lazyUniform(0.25), WeightRule::idealAveraging()}) {
    const WeightRule back = weightsFromJson(weightsToJson(r));
    CHECK(back.kind == r.kind);
    CHECK(back.tau == r.tau);
  }

  Matrix cov(2, 2);
  cov << 2.0, 0.3, 0.3, 0.7;
  const GaussianSource src((Vector(2) << 0.1, -4.0).finished(), cov);
  const GaussianSource srcBack = sourceFromJson(Json::parse(sourceToJson(src).dump()));
  CHECK(srcBack.mean() == src.mean());
  CHECK(srcBack.covariance() == src.covariance());
  const GaussianSource pm = sourceFromJson(Json::parse(R"({"mean": ["1"], "covariance": [["0"]]})"));
  CHECK(pm.degenerate());

  const auto ball = TargetSet::ballComplement((Vector(2) << 0.5, 0.25).finished(), 0.7, Metric::Mahalanobis);
  const auto ballBack = targetSetFromJson(targetSetToJson(ball));
  const auto& bb = std::get<TargetSet::BallComplement>(ballBack.shape());
  CHECK(bb.radius == 0.7);
  CHECK(bb.metric == Metric::Mahalanobis);
  CHECK(bb.center == std::get<TargetSet::BallComplement>(ball.shape()).center);
  const auto half = TargetSet::halfSpace((Vector(1) << -1.0).finished(), 2.5);
  const TargetSet halfBack = targetSetFromJson(targetSetToJson(half));
  const auto& hb = std::get<TargetSet::HalfSpace>(halfBack.shape());
  CHECK(hb.offset == 2.5);
  CHECK(hb.normal(0) == -1.0);

  const HypothesisModel h({0.0, 2.0, -1.0}, 1.5);
  const HypothesisModel hBack = hypothesesFromJson(hypothesesToJson(h));
  CHECK(hBack.means() == h.means());
  CHECK(hBack.sigma() == h.sigma());
  const HypothesisModel reordered = hypothesesFromJson(Json::parse(R"({"means": ["5", "7", "9"], "sigma": "2", "true_index": 1})"));
  CHECK(reordered.means() == std::vector<double>{7.0, 9.0, 5.0});
  CHECK_THROWS_AS(hypothesesFromJson(Json::parse(R"({"means": ["5", "7"], "sigma": "2", "true_index": 3})")),
                  ConfigError);
}

TEST_CASE("record times") {
  CHECK(recordTimesFromJson(Json::parse("[1, 5, 9]")) == std::vector<int>{1, 5, 9});
  CHECK(recordTimesFromJson(Json::parse(R"({"from": 2, "to": 10, "step": 4})")) == std::vector<int>{2, 6, 10});
  CHECK(recordTimesFromJson(Json::parse(R"({"from": 1, "to": 3})")) == std::vector<int>{1, 2, 3});
  CHECK_THROWS_AS(recordTimesFromJson(Json::parse(R"({"from": 1, "to": 3, "step": 0})")), ConfigError);
}

TEST_CASE("loadConfig and full configs") {
  CHECK_THROWS_AS(loadConfig("/nonexistent/ldnet.json"), ConfigError);
  CHECK_THROWS_AS(loadConfig(writeTemp("broken.json", "{not json")), ConfigError);
  CHECK_THROWS_AS(loadConfig(writeTemp("noversion.json", "{}")), ConfigError);
  CHECK_THROWS_AS(loadConfig(writeTemp("future.json", R"({"schema_version": 99})")), ConfigError);

  const Json sim = loadConfig(writeTemp("sim.json", R"({
    "schema_version": 1,
    "network": {"model": "iid_failures", "vertices": 4, "generator": {"kind": "star"}, "fail_probability": "0.3"},
    "weights": {"rule": "metropolis"},
    "source": {"mean": ["0"], "covariance": [["1"]]},
    "horizon": 20, "trajectories": 100, "seed": 3,
    "targets": [{"node": 2, "set": {"type": "ball_complement", "center": ["0"], "radius": "0.5"}}],
    "record_times": {"from": 1, "to": 20}
  })"));
  const SimulationConfig cfg = simulationFromJson(sim);
  CHECK(cfg.horizon == 20);
  CHECK(cfg.targets.front().node == 1);
  CHECK(cfg.recordTimes.size() == 20);

  Json badNode = sim;
  badNode["targets"][0]["node"] = 9;
  CHECK_THROWS(simulationFromJson(badNode));

  const Json sl = loadConfig(writeTemp("sl.json", R"({
    "schema_version": 1,
    "network": {"model": "iid_failures", "vertices": 4, "generator": {"kind": "circulant", "degree": 2}, "fail_probability": "0.3"},
    "weights": {"rule": "metropolis"},
    "hypotheses": {"means": ["0", "2"], "sigma": "1"},
    "horizon": 50, "trajectories": 10, "seed": 3, "record_times": [10, 50]
  })"));
  const SocialLearningConfig slc = socialLearningFromJson(sl);
  CHECK(slc.model.trueMean() == 2.0);
  CHECK(slc.recordTimes == std::vector<int>{10, 50});
}
