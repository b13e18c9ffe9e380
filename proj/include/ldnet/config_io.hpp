#pragma once

// JSON experiment configs. Vertices and hypotheses are 1-based in files and
// 0-based in memory. Probabilities are written as shortest round-trip decimal
// strings; numbers are accepted on input as well.

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "ldnet/graph_model.hpp"
#include "ldnet/rate_functions.hpp"
#include "ldnet/simulator.hpp"
#include "ldnet/social_learning.hpp"

namespace ldnet {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal string that parses back to the same double.
std::string formatDouble(double v);
/// Parses a decimal string (or JSON number) into a double; "inf" allowed.
double parseReal(const Json& j, const std::string& what);

/// Reads a config file and checks schema_version. Throws ConfigError.
Json loadConfig(const std::filesystem::path& path);

Json graphToJson(const Graph& g);
Graph graphFromJson(const Json& edges, int vertices);

Json networkToJson(const GraphDistribution& d);
GraphDistribution networkFromJson(const Json& j);

Json weightsToJson(const WeightRule& r);
WeightRule weightsFromJson(const Json& j);

Json sourceToJson(const GaussianSource& s);
GaussianSource sourceFromJson(const Json& j);

Json targetSetToJson(const TargetSet& t);
TargetSet targetSetFromJson(const Json& j);

/// Either an explicit list or {"from": a, "to": b, "step": s}.
std::vector<int> recordTimesFromJson(const Json& j);

Json hypothesesToJson(const HypothesisModel& h);
/// {"means": [...], "sigma": s, "true_index": k}; hypothesis k (1-based,
/// default last) is moved to the end, the others keep their order.
HypothesisModel hypothesesFromJson(const Json& j);

/// Keys: network, weights, source, horizon, trajectories, seed, targets, record_times.
SimulationConfig simulationFromJson(const Json& root);
/// Keys: network, weights, hypotheses, horizon, trajectories, seed, record_times.
SocialLearningConfig socialLearningFromJson(const Json& root);

}  // namespace ldnet
