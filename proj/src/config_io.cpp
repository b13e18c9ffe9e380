#include "ldnet/config_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>

namespace ldnet {

namespace {

template <class F>
auto wrap(const std::string& what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(what + ": " + e.what());
  }
}

const Json& require(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ConfigError(std::string("missing key '") + key + "'");
  return j.at(key);
}

Vector vectorFromJson(const Json& j, const std::string& what) {
  if (!j.is_array()) throw ConfigError(what + " must be an array");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = parseReal(j[k], what);
  return v;
}

Json vectorToJson(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(formatDouble(v(k)));
  return out;
}

Graph generatedGraph(const Json& g, int n) {
  const std::string kind = require(g, "kind").get<std::string>();
  if (kind == "chain") return Graph::chain(n);
  if (kind == "star") return Graph::star(n);
  if (kind == "complete") return Graph::complete(n);
  if (kind == "circulant") return Graph::circulant(n, require(g, "degree").get<int>());
  throw ConfigError("unknown graph generator '" + kind + "'");
}

Graph baseGraph(const Json& j, int n) {
  if (j.contains("generator")) return generatedGraph(j.at("generator"), n);
  return graphFromJson(require(j, "edges"), n);
}

}  // namespace

std::string formatDouble(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parseReal(const Json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw ConfigError(what + " must be a number or decimal string");
  const std::string s = j.get<std::string>();
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError(what + ": cannot parse '" + s + "'");
  return v;
}

Json loadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  Json root;
  try {
    root = Json::parse(in);
  } catch (const std::exception& e) {
    throw ConfigError("cannot parse " + path.string() + ": " + e.what());
  }
  if (!root.is_object() || !root.contains("schema_version")) throw ConfigError("config lacks schema_version");
  if (root.at("schema_version") != kSchemaVersion)
    throw ConfigError("unsupported schema_version " + root.at("schema_version").dump());
  return root;
}

Json graphToJson(const Graph& g) {
  Json edges = Json::array();
  for (const Edge& e : g.edges()) edges.push_back({e.u + 1, e.v + 1});
  return edges;
}

Graph graphFromJson(const Json& edges, int vertices) {
  return wrap("graph", [&] {
    if (!edges.is_array()) throw ConfigError("edge list must be an array");
    std::vector<Edge> out;
    for (const Json& e : edges) {
      if (!e.is_array() || e.size() != 2) throw ConfigError("edge must be a pair of vertices");
      out.push_back({e[0].get<int>() - 1, e[1].get<int>() - 1});
    }
    return Graph(vertices, std::move(out));
  });
}

Json networkToJson(const GraphDistribution& d) {
  Json j;
  j["vertices"] = d.vertexCount();
  if (const auto* ex = std::get_if<GraphDistribution::Explicit>(&d.model())) {
    j["model"] = "explicit";
    Json support = Json::array();
    for (const WeightedGraph& wg : ex->support)
      support.push_back({{"edges", graphToJson(wg.graph)}, {"probability", formatDouble(wg.probability)}});
    j["support"] = support;
  } else {
    const auto& iid = std::get<GraphDistribution::IidFailures>(d.model());
    j["model"] = "iid_failures";
    j["edges"] = graphToJson(iid.base);
    j["fail_probability"] = formatDouble(iid.failProbability);
  }
  return j;
}

GraphDistribution networkFromJson(const Json& j) {
  return wrap("network", [&] {
    const int n = require(j, "vertices").get<int>();
    if (n < 1) throw ConfigError("vertex count must be positive");
    const std::string model = require(j, "model").get<std::string>();
    if (model == "explicit") {
      std::vector<WeightedGraph> support;
      for (const Json& g : require(j, "support"))
        support.push_back({baseGraph(g, n), parseReal(require(g, "probability"), "probability")});
      return GraphDistribution::explicitSupport(std::move(support));
    }
    if (model == "iid_failures")
      return GraphDistribution::iidFailures(baseGraph(j, n), parseReal(require(j, "fail_probability"), "fail_probability"));
    throw ConfigError("unknown network model '" + model + "'");
  });
}

Json weightsToJson(const WeightRule& r) {
  switch (r.kind) {
    case WeightRule::Kind::Metropolis:
      return {{"rule", "metropolis"}};
    case WeightRule::Kind::LazyUniform:
      return {{"rule", "lazy_uniform"}, {"tau", formatDouble(r.tau)}};
    case WeightRule::Kind::IdealAveraging:
      return {{"rule", "ideal_averaging"}};
  }
  return {};
}

WeightRule weightsFromJson(const Json& j) {
  return wrap("weights", [&] {
    const std::string rule = require(j, "rule").get<std::string>();
    if (rule == "metropolis") return WeightRule::metropolis();
    if (rule == "lazy_uniform") return WeightRule::lazyUniform(parseReal(require(j, "tau"), "tau"));
    if (rule == "ideal_averaging") return WeightRule::idealAveraging();
    throw ConfigError("unknown weight rule '" + rule + "'");
  });
}

Json sourceToJson(const GaussianSource& s) {
  Json cov = Json::array();
  for (Eigen::Index r = 0; r < s.covariance().rows(); ++r) cov.push_back(vectorToJson(s.covariance().row(r).transpose()));
  return {{"mean", vectorToJson(s.mean())}, {"covariance", cov}};
}

GaussianSource sourceFromJson(const Json& j) {
  return wrap("source", [&] {
    const Vector mean = vectorFromJson(require(j, "mean"), "mean");
    const Json& c = require(j, "covariance");
    if (!c.is_array() || c.size() != static_cast<std::size_t>(mean.size()))
      throw ConfigError("covariance must have one row per mean entry");
    Matrix cov(mean.size(), mean.size());
    bool zero = true;
    for (std::size_t r = 0; r < c.size(); ++r) {
      const Vector row = vectorFromJson(c[r], "covariance row");
      if (row.size() != mean.size()) throw ConfigError("covariance must be square");
      cov.row(static_cast<Eigen::Index>(r)) = row.transpose();
      zero = zero && row.isZero(0.0);
    }
    if (zero) return GaussianSource::pointMass(mean);
    return GaussianSource(mean, cov);
  });
}

Json targetSetToJson(const TargetSet& t) {
  if (const auto* b = std::get_if<TargetSet::BallComplement>(&t.shape()))
    return {{"type", "ball_complement"},
            {"center", vectorToJson(b->center)},
            {"radius", formatDouble(b->radius)},
            {"metric", b->metric == Metric::Euclidean ? "euclidean" : "mahalanobis"}};
  const auto& h = std::get<TargetSet::HalfSpace>(t.shape());
  return {{"type", "half_space"}, {"normal", vectorToJson(h.normal)}, {"offset", formatDouble(h.offset)}};
}

TargetSet targetSetFromJson(const Json& j) {
  return wrap("target", [&] {
    const std::string type = require(j, "type").get<std::string>();
    if (type == "ball_complement") {
      Metric metric = Metric::Euclidean;
      if (j.contains("metric")) {
        const std::string m = j.at("metric").get<std::string>();
        if (m == "mahalanobis")
          metric = Metric::Mahalanobis;
        else if (m != "euclidean")
          throw ConfigError("unknown metric '" + m + "'");
      }
      return TargetSet::ballComplement(vectorFromJson(require(j, "center"), "center"),
                                       parseReal(require(j, "radius"), "radius"), metric);
    }
    if (type == "half_space")
      return TargetSet::halfSpace(vectorFromJson(require(j, "normal"), "normal"), parseReal(require(j, "offset"), "offset"));
    throw ConfigError("unknown target type '" + type + "'");
  });
}

std::vector<int> recordTimesFromJson(const Json& j) {
  return wrap("record_times", [&] {
    std::vector<int> out;
    if (j.is_array()) {
      for (const Json& t : j) out.push_back(t.get<int>());
      return out;
    }
    const int from = require(j, "from").get<int>();
    const int to = require(j, "to").get<int>();
    const int step = j.value("step", 1);
    if (step < 1) throw ConfigError("record_times step must be positive");
    for (int t = from; t <= to; t += step) out.push_back(t);
    return out;
  });
}

Json hypothesesToJson(const HypothesisModel& h) {
  Json means = Json::array();
  for (double m : h.means()) means.push_back(formatDouble(m));
  return {{"means", means}, {"sigma", formatDouble(h.sigma())}, {"true_index", h.hypothesisCount()}};
}

HypothesisModel hypothesesFromJson(const Json& j) {
  return wrap("hypotheses", [&] {
    const Json& list = require(j, "means");
    if (!list.is_array()) throw ConfigError("means must be an array");
    std::vector<double> means;
    for (const Json& m : list) means.push_back(parseReal(m, "mean"));
    const int trueIndex = j.value("true_index", static_cast<int>(means.size()));
    if (trueIndex < 1 || trueIndex > static_cast<int>(means.size())) throw ConfigError("true_index outside range");
    const double truth = means[static_cast<std::size_t>(trueIndex - 1)];
    means.erase(means.begin() + (trueIndex - 1));
    means.push_back(truth);
    return HypothesisModel(std::move(means), parseReal(require(j, "sigma"), "sigma"));
  });
}

SimulationConfig simulationFromJson(const Json& root) {
  return wrap("simulation config", [&] {
    std::vector<NodeTarget> targets;
    if (root.contains("targets"))
      for (const Json& t : root.at("targets")) {
        const int node = require(t, "node").get<int>();
        targets.push_back({node - 1, targetSetFromJson(require(t, "set"))});
      }
    SimulationConfig cfg{
        .network = networkFromJson(require(root, "network")),
        .weights = root.contains("weights") ? weightsFromJson(root.at("weights")) : WeightRule::metropolis(),
        .source = sourceFromJson(require(root, "source")),
        .horizon = require(root, "horizon").get<int>(),
        .trajectories = require(root, "trajectories").get<std::int64_t>(),
        .seed = root.value("seed", std::uint64_t{0}),
        .targets = std::move(targets),
        .recordTimes = recordTimesFromJson(require(root, "record_times")),
    };
    cfg.validate();
    return cfg;
  });
}

SocialLearningConfig socialLearningFromJson(const Json& root) {
  return wrap("social learning config", [&] {
    SocialLearningConfig cfg{
        .network = networkFromJson(require(root, "network")),
        .weights = root.contains("weights") ? weightsFromJson(root.at("weights")) : WeightRule::metropolis(),
        .model = hypothesesFromJson(require(root, "hypotheses")),
        .horizon = require(root, "horizon").get<int>(),
        .trajectories = require(root, "trajectories").get<std::int64_t>(),
        .seed = root.value("seed", std::uint64_t{0}),
        .recordTimes = recordTimesFromJson(require(root, "record_times")),
    };
    cfg.validate();
    return cfg;
  });
}

}  // namespace ldnet
