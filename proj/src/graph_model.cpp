#include "ldnet/graph_model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include <omp.h>

namespace ldnet {

namespace {

using Mask = std::uint32_t;

constexpr double kInf = std::numeric_limits<double>::infinity();

Mask bit(Vertex v) { return Mask{1} << v; }

VertexSet maskToSet(Mask m) {
  VertexSet out;
  while (m != 0) {
    out.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return out;
}

// Smaller side of the cut first, then lexicographically smaller vertex list.
VertexSet canonicalSide(Mask side, Mask full) {
  const Mask other = full & ~side;
  const int a = std::popcount(side);
  const int b = std::popcount(other);
  if (a != b) return maskToSet(a < b ? side : other);
  VertexSet x = maskToSet(side);
  VertexSet y = maskToSet(other);
  return std::min(x, y);
}

// Components of g as vertex masks.
std::vector<Mask> componentMasks(const Graph& g) {
  std::vector<Mask> out;
  for (const VertexSet& cell : connectedComponents(g)) {
    Mask m = 0;
    for (Vertex v : cell) m |= bit(v);
    out.push_back(m);
  }
  return out;
}

bool respectsCut(std::span<const Mask> components, Mask side) {
  for (Mask c : components) {
    const Mask inter = c & side;
    if (inter != 0 && inter != c) return false;
  }
  return true;
}

// Scores a cut side by log of the probability that no edge crosses it.
class CutScorer {
 public:
  explicit CutScorer(const GraphDistribution& d) : n_(d.vertexCount()) {
    if (const auto* ex = std::get_if<GraphDistribution::Explicit>(&d.model())) {
      for (const WeightedGraph& wg : ex->support) {
        components_.push_back(componentMasks(wg.graph));
        probabilities_.push_back(wg.probability);
      }
    } else {
      const auto& iid = std::get<GraphDistribution::IidFailures>(d.model());
      iid_ = true;
      logFail_ = std::log(iid.failProbability);
      for (const Edge& e : iid.base.edges()) baseEdges_.push_back(bit(e.u) | bit(e.v));
    }
  }

  double logProbability(Mask side) const {
    if (iid_) {
      int crossing = 0;
      for (Mask e : baseEdges_) crossing += std::popcount(e & side) == 1;
      return crossing == 0 ? 0.0 : crossing * logFail_;
    }
    double p = 0.0;
    for (std::size_t k = 0; k < components_.size(); ++k)
      if (respectsCut(components_[k], side)) p += probabilities_[k];
    return p > 0.0 ? std::log(p) : -kInf;
  }

  int vertexCount() const { return n_; }

 private:
  int n_;
  bool iid_ = false;
  double logFail_ = 0.0;
  std::vector<Mask> baseEdges_;
  std::vector<std::vector<Mask>> components_;
  std::vector<double> probabilities_;
};

struct CutCandidate {
  double logProbability = -kInf;
  Mask side = 0;
};

// Deterministic ordering: higher probability, then lexicographically smaller
// canonical side.
bool better(const CutCandidate& a, const CutCandidate& b, Mask full) {
  if (b.side == 0) return a.side != 0;
  if (a.side == 0) return false;
  if (a.logProbability != b.logProbability) return a.logProbability > b.logProbability;
  return canonicalSide(a.side, full) < canonicalSide(b.side, full);
}

CutCandidate scanRange(const CutScorer& scorer, Mask first, Mask last, Mask full) {
  CutCandidate best;
  for (Mask s = first; s < last; ++s) {
    CutCandidate c{scorer.logProbability(s), s};
    if (better(c, best, full)) best = c;
  }
  return best;
}

void requireEnumerable(int n) {
  if (n > kMaxEnumerationVertices)
    throw std::domain_error("cut enumeration is limited to " + std::to_string(kMaxEnumerationVertices) +
                            " vertices (got " + std::to_string(n) + ")");
}

ConsensusRate finish(const CutCandidate& best, int n, Mask full) {
  ConsensusRate out;
  if (best.side == 0 || best.logProbability == -kInf) {
    out.rate = kInf;
    out.maxCutProbability = 0.0;
    return out;
  }
  out.rate = std::abs(best.logProbability);
  out.maxCutProbability = std::exp(best.logProbability);
  out.cut = CutSpec(n, canonicalSide(best.side, full));
  return out;
}

constexpr Mask kChunk = 4096;

}  // namespace

// ---------------------------------------------------------------- Graph

Graph::Graph(int vertexCount, std::vector<Edge> edges) : n_(vertexCount), edges_(std::move(edges)) {
  if (n_ < 0) throw std::invalid_argument("negative vertex count");
  for (Edge& e : edges_) {
    if (e.u == e.v) throw std::invalid_argument("self-loop at vertex " + std::to_string(e.u));
    if (e.u > e.v) std::swap(e.u, e.v);
    if (e.u < 0 || e.v >= n_) throw std::invalid_argument("edge endpoint outside vertex range");
  }
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw std::invalid_argument("duplicate edge");
}

Graph Graph::chain(int n) {
  std::vector<Edge> e;
  for (int v = 0; v + 1 < n; ++v) e.push_back({v, v + 1});
  return Graph(n, std::move(e));
}

Graph Graph::star(int n) {
  std::vector<Edge> e;
  for (int v = 1; v < n; ++v) e.push_back({0, v});
  return Graph(n, std::move(e));
}

Graph Graph::complete(int n) {
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v) e.push_back({u, v});
  return Graph(n, std::move(e));
}

Graph Graph::circulant(int n, int degree) {
  if (degree % 2 != 0 || degree < 0 || degree > n - 1)
    throw std::invalid_argument("circulant degree must be even and at most n-1");
  std::vector<Edge> e;
  for (int u = 0; u < n; ++u)
    for (int k = 1; k <= degree / 2; ++k) {
      Edge x{u, (u + k) % n};
      if (x.u > x.v) std::swap(x.u, x.v);
      e.push_back(x);
    }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return Graph(n, std::move(e));
}

bool Graph::hasEdge(Vertex a, Vertex b) const {
  Edge e{std::min(a, b), std::max(a, b)};
  return std::binary_search(edges_.begin(), edges_.end(), e);
}

bool Graph::isSubgraphOf(const Graph& other) const {
  return n_ == other.n_ && std::includes(other.edges_.begin(), other.edges_.end(), edges_.begin(), edges_.end());
}

std::vector<int> Graph::degrees() const {
  std::vector<int> deg(static_cast<std::size_t>(n_), 0);
  for (const Edge& e : edges_) {
    ++deg[static_cast<std::size_t>(e.u)];
    ++deg[static_cast<std::size_t>(e.v)];
  }
  return deg;
}

// ---------------------------------------------------------------- distributions

GraphDistribution::GraphDistribution(Model m) : model_(std::move(m)) {}

GraphDistribution GraphDistribution::explicitSupport(std::vector<WeightedGraph> support) {
  if (support.empty()) throw std::invalid_argument("explicit distribution needs a nonempty support");
  const int n = support.front().graph.vertexCount();
  double total = 0.0;
  std::vector<double> cumulative;
  for (std::size_t k = 0; k < support.size(); ++k) {
    const WeightedGraph& wg = support[k];
    if (!(wg.probability > 0.0) || wg.probability > 1.0)
      throw std::invalid_argument("support probabilities must lie in (0, 1]");
    if (wg.graph.vertexCount() != n) throw std::invalid_argument("support graphs differ in vertex count");
    for (std::size_t j = 0; j < k; ++j)
      if (support[j].graph == wg.graph) throw std::invalid_argument("support graphs must be distinct");
    total += wg.probability;
    cumulative.push_back(total);
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("support probabilities must sum to 1");
  GraphDistribution d(Explicit{std::move(support)});
  d.cumulative_ = std::move(cumulative);
  return d;
}

GraphDistribution GraphDistribution::iidFailures(Graph base, double failProbability) {
  if (!(failProbability >= 0.0 && failProbability <= 1.0))
    throw std::invalid_argument("failure probability must lie in [0, 1]");
  return GraphDistribution(IidFailures{std::move(base), failProbability});
}

int GraphDistribution::vertexCount() const noexcept {
  if (const auto* ex = std::get_if<Explicit>(&model_)) return ex->support.front().graph.vertexCount();
  return std::get<IidFailures>(model_).base.vertexCount();
}

double GraphDistribution::graphProbability(const Graph& g) const {
  if (const auto* ex = std::get_if<Explicit>(&model_)) {
    for (const WeightedGraph& wg : ex->support)
      if (wg.graph == g) return wg.probability;
    return 0.0;
  }
  const auto& iid = std::get<IidFailures>(model_);
  if (!g.isSubgraphOf(iid.base)) return 0.0;
  const double present = static_cast<double>(g.edgeCount());
  const double absent = static_cast<double>(iid.base.edgeCount() - g.edgeCount());
  return std::pow(1.0 - iid.failProbability, present) * std::pow(iid.failProbability, absent);
}

std::span<const Edge> GraphDistribution::drawEdges(StreamRng& rng, std::vector<Edge>& scratch) const {
  if (const auto* ex = std::get_if<Explicit>(&model_)) {
    const double u = rng.uniform();
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    std::size_t k = static_cast<std::size_t>(it - cumulative_.begin());
    if (k >= ex->support.size()) k = ex->support.size() - 1;
    return ex->support[k].graph.edges();
  }
  const auto& iid = std::get<IidFailures>(model_);
  scratch.clear();
  for (const Edge& e : iid.base.edges())
    if (rng.uniform() >= iid.failProbability) scratch.push_back(e);
  return scratch;
}

Graph GraphDistribution::sample(StreamRng& rng) const {
  std::vector<Edge> scratch;
  auto e = drawEdges(rng, scratch);
  return Graph(vertexCount(), std::vector<Edge>(e.begin(), e.end()));
}

GraphCollection::GraphCollection(std::vector<Graph> members) : members_(std::move(members)) {
  for (std::size_t k = 0; k < members_.size(); ++k) {
    if (members_[k].vertexCount() != members_.front().vertexCount())
      throw std::invalid_argument("collection members differ in vertex count");
    for (std::size_t j = 0; j < k; ++j)
      if (members_[j] == members_[k]) throw std::invalid_argument("collection members must be distinct");
  }
}

CutSpec::CutSpec(int vertexCount, VertexSet side) : n_(vertexCount), side_(std::move(side)) {
  std::sort(side_.begin(), side_.end());
  side_.erase(std::unique(side_.begin(), side_.end()), side_.end());
  if (side_.empty() || static_cast<int>(side_.size()) >= n_)
    throw std::invalid_argument("cut side must be a nonempty proper vertex subset");
  if (side_.front() < 0 || side_.back() >= n_) throw std::invalid_argument("cut vertex outside range");
  member_.assign(static_cast<std::size_t>(n_), 0);
  for (Vertex v : side_) member_[static_cast<std::size_t>(v)] = 1;
}

bool CutSpec::contains(Vertex v) const {
  return v >= 0 && v < n_ && member_[static_cast<std::size_t>(v)] != 0;
}

std::size_t CutSpec::crossingCount(const Graph& g) const {
  return static_cast<std::size_t>(
      std::count_if(g.edges().begin(), g.edges().end(), [&](const Edge& e) { return crosses(e); }));
}

// ---------------------------------------------------------------- operations

Graph unionGraph(const GraphCollection& c) {
  if (c.empty()) throw std::invalid_argument("union of an empty collection");
  std::vector<Edge> all;
  for (const Graph& g : c.members()) all.insert(all.end(), g.edges().begin(), g.edges().end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return Graph(c.vertexCount(), std::move(all));
}

std::vector<VertexSet> connectedComponents(const Graph& g) {
  const auto n = static_cast<std::size_t>(g.vertexCount());
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (const Edge& e : g.edges()) {
    auto a = find(static_cast<std::size_t>(e.u));
    auto b = find(static_cast<std::size_t>(e.v));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<VertexSet> cells;
  std::vector<std::size_t> cellOf(n, n);
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t r = find(v);
    if (cellOf[r] == n) {
      cellOf[r] = cells.size();
      cells.emplace_back();
    }
    cells[cellOf[r]].push_back(static_cast<Vertex>(v));
  }
  return cells;
}

VertexSet nodeComponent(Vertex i, const GraphCollection& c) {
  if (c.empty()) throw std::invalid_argument("node component of an empty collection");
  if (i < 0 || i >= c.vertexCount()) throw std::out_of_range("vertex outside range");
  for (VertexSet& cell : connectedComponents(unionGraph(c)))
    if (std::binary_search(cell.begin(), cell.end(), i)) return cell;
  return {i};
}

double collectionProbability(const GraphCollection& c, const GraphDistribution& d) {
  double p = 0.0;
  const bool iid = !d.isExplicit();
  for (const Graph& g : c.members()) {
    if (g.vertexCount() != d.vertexCount()) throw std::invalid_argument("collection member has wrong vertex count");
    const double ph = d.graphProbability(g);
    if (ph == 0.0 && (!iid || !g.isSubgraphOf(std::get<GraphDistribution::IidFailures>(d.model()).base)))
      throw std::invalid_argument("collection member lies outside the support");
    p += ph;
  }
  return p;
}

MinCutResult minCutWithSide(const Graph& g) {
  const int n = g.vertexCount();
  MinCutResult best;
  if (n < 2) return best;
  const auto un = static_cast<std::size_t>(n);
  std::vector<std::vector<int>> w(un, std::vector<int>(un, 0));
  for (const Edge& e : g.edges()) {
    w[static_cast<std::size_t>(e.u)][static_cast<std::size_t>(e.v)] += 1;
    w[static_cast<std::size_t>(e.v)][static_cast<std::size_t>(e.u)] += 1;
  }
  std::vector<VertexSet> groups(un);
  for (std::size_t v = 0; v < un; ++v) groups[v] = {static_cast<Vertex>(v)};
  std::vector<std::size_t> active(un);
  std::iota(active.begin(), active.end(), std::size_t{0});
  best.weight = std::numeric_limits<int>::max();

  // Stoer-Wagner minimum cut phases.
  while (active.size() > 1) {
    std::vector<int> key(un, 0);
    std::vector<char> added(un, 0);
    std::size_t prev = active.front();
    std::size_t last = active.front();
    for (std::size_t step = 0; step < active.size(); ++step) {
      std::size_t sel = un;
      for (std::size_t v : active)
        if (!added[v] && (sel == un || key[v] > key[sel])) sel = v;
      added[sel] = 1;
      prev = last;
      last = sel;
      if (step + 1 == active.size()) {
        if (key[sel] < best.weight) {
          best.weight = key[sel];
          best.side = groups[sel];
        }
      }
      for (std::size_t v : active)
        if (!added[v]) key[v] += w[sel][v];
    }
    // Merge last into prev.
    groups[prev].insert(groups[prev].end(), groups[last].begin(), groups[last].end());
    for (std::size_t v = 0; v < un; ++v) {
      w[prev][v] += w[last][v];
      w[v][prev] = w[prev][v];
    }
    w[prev][prev] = 0;
    active.erase(std::find(active.begin(), active.end(), last));
  }
  std::sort(best.side.begin(), best.side.end());
  return best;
}

int minCut(const Graph& g) { return minCutWithSide(g).weight; }

double cutIsolationProbability(const CutSpec& s, const GraphDistribution& d) {
  if (s.vertexCount() != d.vertexCount()) throw std::invalid_argument("cut and distribution differ in vertex count");
  if (const auto* ex = std::get_if<GraphDistribution::Explicit>(&d.model())) {
    double p = 0.0;
    for (const WeightedGraph& wg : ex->support)
      if (s.crossingCount(wg.graph) == 0) p += wg.probability;
    return p;
  }
  const auto& iid = std::get<GraphDistribution::IidFailures>(d.model());
  const std::size_t k = s.crossingCount(iid.base);
  return k == 0 ? 1.0 : std::pow(iid.failProbability, static_cast<double>(k));
}

ConsensusRate rateOfConsensusByEnumeration(const GraphDistribution& d) {
  const int n = d.vertexCount();
  requireEnumerable(n);
  if (n < 2) return finish({}, n, 0);
  const CutScorer scorer(d);
  const Mask full = (n == 32) ? ~Mask{0} : (bit(n) - 1);
  const Mask last = bit(n - 1);  // sides exclude vertex n-1
  const Mask chunks = (last - 1 + kChunk - 1) / kChunk;
  std::vector<CutCandidate> partial(chunks);

#pragma omp parallel for schedule(dynamic, 1)
  for (std::int64_t c = 0; c < static_cast<std::int64_t>(chunks); ++c) {
    const Mask first = 1 + static_cast<Mask>(c) * kChunk;
    const Mask stop = std::min<Mask>(first + kChunk, last);
    partial[static_cast<std::size_t>(c)] = scanRange(scorer, first, stop, full);
  }

  CutCandidate best;
  for (const CutCandidate& c : partial)
    if (better(c, best, full)) best = c;
  return finish(best, n, full);
}

ConsensusRate serial::rateOfConsensusByEnumeration(const GraphDistribution& d) {
  const int n = d.vertexCount();
  requireEnumerable(n);
  if (n < 2) return finish({}, n, 0);
  const CutScorer scorer(d);
  const Mask full = bit(n) - 1;
  return finish(scanRange(scorer, 1, bit(n - 1), full), n, full);
}

ConsensusRate rateOfConsensus(const GraphDistribution& d) {
  const auto* iid = std::get_if<GraphDistribution::IidFailures>(&d.model());
  if (iid == nullptr) return rateOfConsensusByEnumeration(d);

  ConsensusRate out;
  out.viaMinCut = true;
  const int n = d.vertexCount();
  if (n < 2) {
    out.rate = kInf;
    return out;
  }
  const MinCutResult mc = minCutWithSide(iid->base);
  const Mask full = n <= kMaxEnumerationVertices ? bit(n) - 1 : 0;
  auto sideOf = [&](const VertexSet& s) {
    if (n > kMaxEnumerationVertices) {
      if (2 * s.size() <= static_cast<std::size_t>(n)) return s;
      VertexSet other;
      for (Vertex v = 0; v < n; ++v)
        if (!std::binary_search(s.begin(), s.end(), v)) other.push_back(v);
      return other;
    }
    Mask m = 0;
    for (Vertex v : s) m |= bit(v);
    return canonicalSide(m, full);
  };
  if (mc.weight == 0) {
    out.rate = 0.0;
    out.maxCutProbability = 1.0;
    out.cut = CutSpec(n, sideOf(mc.side));
    return out;
  }
  const double logFail = std::log(iid->failProbability);
  if (logFail == -kInf) {
    out.rate = kInf;
    return out;
  }
  out.rate = std::abs(mc.weight * logFail);
  out.maxCutProbability = std::exp(mc.weight * logFail);
  out.cut = CutSpec(n, sideOf(mc.side));
  return out;
}

double isolationProbability(Vertex i, const GraphDistribution& d) {
  const int n = d.vertexCount();
  if (i < 0 || i >= n) throw std::out_of_range("vertex outside range");
  if (n == 1) return 1.0;
  return cutIsolationProbability(CutSpec(n, {i}), d);
}

std::vector<CollectionBound> cutCollectionBounds(Vertex i, const GraphDistribution& d) {
  const int n = d.vertexCount();
  requireEnumerable(n);
  if (i < 0 || i >= n) throw std::out_of_range("vertex outside range");
  if (n < 2) return {};
  const CutScorer scorer(d);
  const Mask full = bit(n) - 1;

  std::vector<std::vector<Mask>> supportComponents;
  std::vector<Mask> adjacency(static_cast<std::size_t>(n), 0);
  if (const auto* ex = std::get_if<GraphDistribution::Explicit>(&d.model())) {
    for (const WeightedGraph& wg : ex->support) supportComponents.push_back(componentMasks(wg.graph));
  } else {
    for (const Edge& e : std::get<GraphDistribution::IidFailures>(d.model()).base.edges()) {
      adjacency[static_cast<std::size_t>(e.u)] |= bit(e.v);
      adjacency[static_cast<std::size_t>(e.v)] |= bit(e.u);
    }
  }

  // Component of i in the union of the members of H_S.
  auto componentOf = [&](Mask side) {
    Mask comp = bit(i);
    if (supportComponents.empty()) {
      const Mask allowedSide = (side & bit(i)) ? side : (full & ~side);
      Mask frontier = comp;
      while (frontier != 0) {
        const Vertex v = std::countr_zero(frontier);
        frontier &= frontier - 1;
        const Mask next = adjacency[static_cast<std::size_t>(v)] & allowedSide & ~comp;
        comp |= next;
        frontier |= next;
      }
      return comp;
    }
    bool grown = true;
    while (grown) {
      grown = false;
      for (const auto& comps : supportComponents) {
        if (!respectsCut(comps, side)) continue;
        for (Mask c : comps)
          if ((c & comp) != 0 && (c | comp) != comp) {
            comp |= c;
            grown = true;
          }
      }
    }
    return comp;
  };

  // Best (highest probability) collection for each component size.
  std::vector<CutCandidate> bestBySize(static_cast<std::size_t>(n) + 1);
  for (Mask s = 1; s < full; ++s) {
    if ((s & bit(i)) == 0) continue;
    const double lp = scorer.logProbability(s);
    if (lp == -kInf) continue;
    const int a = std::popcount(componentOf(s));
    CutCandidate c{lp, s};
    auto& slot = bestBySize[static_cast<std::size_t>(a)];
    if (slot.side == 0 || c.logProbability > slot.logProbability ||
        (c.logProbability == slot.logProbability && maskToSet(c.side) < maskToSet(slot.side)))
      slot = c;
  }
  std::vector<CollectionBound> out;
  for (std::size_t a = 1; a < bestBySize.size(); ++a) {
    const CutCandidate& c = bestBySize[a];
    if (c.side == 0) continue;
    out.push_back({CutSpec(n, maskToSet(c.side)), static_cast<int>(a), c.logProbability});
  }
  return out;
}

GraphCollection cutCollection(const CutSpec& s, const GraphDistribution& d) {
  std::vector<Graph> members;
  if (const auto* ex = std::get_if<GraphDistribution::Explicit>(&d.model())) {
    for (const WeightedGraph& wg : ex->support)
      if (s.crossingCount(wg.graph) == 0) members.push_back(wg.graph);
    return GraphCollection(std::move(members));
  }
  const auto& iid = std::get<GraphDistribution::IidFailures>(d.model());
  std::vector<Edge> inside;
  for (const Edge& e : iid.base.edges())
    if (!s.crosses(e)) inside.push_back(e);
  if (inside.size() > 20) throw std::domain_error("too many non-crossing edges to enumerate subgraphs");
  const std::uint32_t count = std::uint32_t{1} << inside.size();
  for (std::uint32_t m = 0; m < count; ++m) {
    std::vector<Edge> e;
    for (std::size_t k = 0; k < inside.size(); ++k)
      if (m & (std::uint32_t{1} << k)) e.push_back(inside[k]);
    members.emplace_back(d.vertexCount(), std::move(e));
  }
  return GraphCollection(std::move(members));
}

}  // namespace ldnet
