#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace stargraph {

using EdgeId = std::size_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// One vertex with finitely many half-line edges glued at their endpoints.
class StarGraph {
 public:
  explicit StarGraph(std::vector<std::string> edge_names);

  std::size_t size() const { return names_.size(); }
  const std::string& name(EdgeId e) const { return names_.at(e); }
  const std::vector<std::string>& names() const { return names_; }
  /// Throws InvalidArgument for unknown names.
  EdgeId id(const std::string& name) const;

  bool operator==(const StarGraph&) const = default;

 private:
  std::vector<std::string> names_;
};

/// A point of the star graph, the vertex, or the cemetery.  Points (e, 0)
/// are normalized to the vertex on construction.
class GraphPoint {
 public:
  enum class Kind : unsigned char { Vertex, Edge, Cemetery };

  GraphPoint() = default;

  static GraphPoint vertex() { return {}; }
  static GraphPoint cemetery() {
    GraphPoint g;
    g.kind_ = Kind::Cemetery;
    return g;
  }
  /// x must be >= 0; x == 0 yields the vertex.
  static GraphPoint on_edge(EdgeId e, double x);

  Kind kind() const { return kind_; }
  bool is_vertex() const { return kind_ == Kind::Vertex; }
  bool is_cemetery() const { return kind_ == Kind::Cemetery; }
  EdgeId edge() const { return edge_; }
  /// Radial coordinate; 0 at the vertex.
  double x() const { return x_; }

  bool operator==(const GraphPoint&) const = default;

 private:
  Kind kind_ = Kind::Vertex;
  EdgeId edge_ = 0;
  double x_ = 0.0;
};

/// Shortest-path metric: |x - y| on a common edge, x + y across edges.
double graph_distance(const GraphPoint& g, const GraphPoint& h);

}  // namespace stargraph
