#pragma once

#include <algorithm>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "graphconc/error.hpp"

namespace graphconc {

/// Simple undirected graph on vertices 0..n-1. Loops are allowed, parallel
/// edges are not. Edges are kept sorted as pairs (i, j) with i <= j.
class Graph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  Graph() = default;
  explicit Graph(std::size_t n) : n_(n) {}

  Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
    for (auto& [i, j] : edges_) {
      require(i < n_ && j < n_, Errc::InvalidParameter, "edge endpoint out of range");
      if (i > j) std::swap(i, j);
    }
    std::sort(edges_.begin(), edges_.end());
    require(std::adjacent_find(edges_.begin(), edges_.end()) == edges_.end(), Errc::InvalidParameter,
            "duplicate edge");
  }

  std::size_t order() const noexcept { return n_; }
  std::size_t size() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  bool has_loops() const {
    return std::any_of(edges_.begin(), edges_.end(), [](const Edge& e) { return e.first == e.second; });
  }

  /// Number of j with ij an edge; a loop counts once.
  std::vector<std::size_t> degrees() const {
    std::vector<std::size_t> deg(n_, 0);
    for (const auto& [i, j] : edges_) {
      ++deg[i];
      if (i != j) ++deg[j];
    }
    return deg;
  }

  bool operator==(const Graph&) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

inline Graph complete_graph(std::size_t n) {
  std::vector<Graph::Edge> edges;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) edges.emplace_back(i, j);
  return Graph(n, std::move(edges));
}

inline Graph cycle_graph(std::size_t n) {
  require(n >= 3, Errc::InvalidParameter, "cycle_graph needs n >= 3");
  std::vector<Graph::Edge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.emplace_back(i, (i + 1) % n);
  return Graph(n, std::move(edges));
}

inline Graph path_graph(std::size_t n) {
  std::vector<Graph::Edge> edges;
  for (std::size_t i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
  return Graph(n, std::move(edges));
}

// Text format: first line "n m", then m lines "i j" with 1-based i <= j.

inline void write_graph(std::ostream& out, const Graph& g) {
  out << g.order() << ' ' << g.size() << '\n';
  for (const auto& [i, j] : g.edges()) out << (i + 1) << ' ' << (j + 1) << '\n';
}

inline Graph read_graph(std::istream& in) {
  long long n = -1;
  long long m = -1;
  if (!(in >> n >> m) || n < 1 || m < 0)
    throw Error(Errc::InvalidParameter, "graph file: bad header, expected \"n m\"");
  std::vector<Graph::Edge> edges;
  edges.reserve(static_cast<std::size_t>(m));
  for (long long k = 0; k < m; ++k) {
    long long i = 0;
    long long j = 0;
    if (!(in >> i >> j))
      throw Error(Errc::InvalidParameter, "graph file: expected " + std::to_string(m) + " edges, got " +
                                              std::to_string(k));
    if (i < 1 || j < 1 || i > n || j > n || i > j)
      throw Error(Errc::InvalidParameter, "graph file: edge " + std::to_string(k + 1) +
                                              " must satisfy 1 <= i <= j <= n");
    edges.emplace_back(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1));
  }
  std::string trailing;
  if (in >> trailing) throw Error(Errc::InvalidParameter, "graph file: trailing content after edge list");
  return Graph(static_cast<std::size_t>(n), std::move(edges));
}

inline Graph load_graph(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot open graph file " + path.string());
  return read_graph(in);
}

inline void save_graph(const std::filesystem::path& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw Error(Errc::IoError, "cannot write graph file " + path.string());
  write_graph(out, g);
  if (!out) throw Error(Errc::IoError, "write failed for " + path.string());
}

}  // namespace graphconc
