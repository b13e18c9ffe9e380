#pragma once

// Random network models: graphs, link-failure distributions, union graphs,
// node components and the rate of consensus.
//
// Vertices are 0-based throughout the C++ API. Config files and reports use
// 1-based labels (see config_io.hpp).

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "ldnet/rng.hpp"

namespace ldnet {

using Vertex = int;
using VertexSet = std::vector<Vertex>;  // sorted ascending

struct Edge {
  Vertex u = 0;
  Vertex v = 0;  // u < v after normalization
  auto operator<=>(const Edge&) const = default;
};

/// Simple undirected graph on vertices {0, ..., n-1}.
class Graph {
 public:
  Graph() = default;
  /// Normalizes every edge to u < v and sorts. Throws std::invalid_argument on
  /// self-loops, duplicate edges or endpoints outside [0, n).
  explicit Graph(int vertexCount, std::vector<Edge> edges = {});

  static Graph chain(int n);
  static Graph star(int n);  // center 0
  static Graph complete(int n);
  /// Each vertex linked to degree/2 neighbours on either side; degree even.
  static Graph circulant(int n, int degree);

  int vertexCount() const noexcept { return n_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::size_t edgeCount() const noexcept { return edges_.size(); }
  bool hasEdge(Vertex a, Vertex b) const;
  bool isSubgraphOf(const Graph& other) const;
  std::vector<int> degrees() const;

  bool operator==(const Graph&) const = default;

 private:
  int n_ = 0;
  std::vector<Edge> edges_;
};

struct WeightedGraph {
  Graph graph;
  double probability = 0.0;
};

/// Probability law of the per-step topology G_t.
class GraphDistribution {
 public:
  struct Explicit {
    std::vector<WeightedGraph> support;
  };
  /// Each base edge is absent independently with probability failProbability.
  struct IidFailures {
    Graph base;
    double failProbability = 0.0;
  };
  using Model = std::variant<Explicit, IidFailures>;

  /// Throws std::invalid_argument unless probabilities are positive, sum to 1
  /// within 1e-12, graphs share a vertex count and are pairwise distinct.
  static GraphDistribution explicitSupport(std::vector<WeightedGraph> support);
  static GraphDistribution iidFailures(Graph base, double failProbability);

  const Model& model() const noexcept { return model_; }
  bool isExplicit() const noexcept { return std::holds_alternative<Explicit>(model_); }
  int vertexCount() const noexcept;

  /// p_H; zero outside the support.
  double graphProbability(const Graph& g) const;

  /// Draws one topology. The returned span aliases either a support graph or
  /// `scratch`, and stays valid until the next call with the same scratch.
  std::span<const Edge> drawEdges(StreamRng& rng, std::vector<Edge>& scratch) const;
  Graph sample(StreamRng& rng) const;

 private:
  explicit GraphDistribution(Model m);
  Model model_;
  std::vector<double> cumulative_;  // Explicit only
};

/// Nonempty set of pairwise distinct graphs on a shared vertex count.
class GraphCollection {
 public:
  GraphCollection() = default;
  explicit GraphCollection(std::vector<Graph> members);

  std::span<const Graph> members() const noexcept { return members_; }
  bool empty() const noexcept { return members_.empty(); }
  int vertexCount() const noexcept { return members_.empty() ? 0 : members_.front().vertexCount(); }

 private:
  std::vector<Graph> members_;
};

/// A nonempty proper vertex subset defining the cut (side | complement).
class CutSpec {
 public:
  CutSpec(int vertexCount, VertexSet side);

  int vertexCount() const noexcept { return n_; }
  const VertexSet& side() const noexcept { return side_; }
  bool contains(Vertex v) const;
  /// True when edge {u,v} has exactly one endpoint on the side.
  bool crosses(const Edge& e) const { return contains(e.u) != contains(e.v); }
  std::size_t crossingCount(const Graph& g) const;

  bool operator==(const CutSpec&) const = default;

 private:
  int n_ = 0;
  VertexSet side_;
  std::vector<char> member_;
};

Graph unionGraph(const GraphCollection& c);
/// Cells sorted by smallest member; each cell sorted.
std::vector<VertexSet> connectedComponents(const Graph& g);
/// C_{i,H}: the cell of the union graph containing i.
VertexSet nodeComponent(Vertex i, const GraphCollection& c);
/// p_H = sum of member probabilities. Throws std::invalid_argument when a
/// member lies outside the support.
double collectionProbability(const GraphCollection& c, const GraphDistribution& d);

/// Size of a minimum edge cut (Stoer-Wagner); 0 for disconnected graphs or n < 2.
int minCut(const Graph& g);
/// Minimum cut together with one optimal side.
struct MinCutResult {
  int weight = 0;
  VertexSet side;
};
MinCutResult minCutWithSide(const Graph& g);

/// Probability that one draw of G_t has no edge crossing the cut.
double cutIsolationProbability(const CutSpec& s, const GraphDistribution& d);

inline constexpr int kMaxEnumerationVertices = 24;

struct ConsensusRate {
  double rate = 0.0;                // J, possibly +inf
  double maxCutProbability = 0.0;   // p_{H*}
  std::optional<CutSpec> cut;       // optimal cut (smaller side shown); empty when J = +inf
  bool viaMinCut = false;           // i.i.d. fast path was used
};

/// J = |log max_S cutIsolationProbability(S)|. Explicit models use exhaustive
/// cut enumeration (throws std::domain_error for N > 24); i.i.d. failure
/// models use minCut(base) * |log(1-p)|.
ConsensusRate rateOfConsensus(const GraphDistribution& d);
/// Exhaustive enumeration over all 2^(N-1)-1 cuts for either model.
ConsensusRate rateOfConsensusByEnumeration(const GraphDistribution& d);

/// p_{i,isol}: probability that i has no neighbour at a given step.
double isolationProbability(Vertex i, const GraphDistribution& d);

/// Lower-bound ingredients for node i from the collection H_S of support
/// graphs with no edge crossing the cut S (S contains i).
struct CollectionBound {
  CutSpec cut;
  int componentSize = 0;  // |C_{i,H_S}|
  double logProbability = 0.0;  // log p_{H_S} (finite)
};
/// One entry per cut side containing i whose collection has positive
/// probability. Requires N <= 24.
std::vector<CollectionBound> cutCollectionBounds(Vertex i, const GraphDistribution& d);
/// The members of H_S for an explicit model, or of a small i.i.d. model
/// (enumerates all subgraphs of the base; requires |E(base)| <= 20).
GraphCollection cutCollection(const CutSpec& s, const GraphDistribution& d);

namespace serial {
/// Single-threaded reference for rateOfConsensusByEnumeration.
ConsensusRate rateOfConsensusByEnumeration(const GraphDistribution& d);
}  // namespace serial

}  // namespace ldnet
