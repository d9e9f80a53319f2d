#include "stargraph/graph.hpp"

#include <cmath>
#include <set>

#include "stargraph/error.hpp"

namespace stargraph {

StarGraph::StarGraph(std::vector<std::string> edge_names) : names_(std::move(edge_names)) {
  if (names_.empty()) throw Error(ErrorCode::InvalidArgument, "a star graph needs at least one edge");
  std::set<std::string> seen;
  for (const auto& n : names_) {
    if (n.empty()) throw Error(ErrorCode::InvalidArgument, "empty edge name");
    if (n == "vertex" || n == "cemetery")
      throw Error(ErrorCode::InvalidArgument, "reserved edge name '" + n + "'");
    if (!seen.insert(n).second) throw Error(ErrorCode::InvalidArgument, "duplicate edge '" + n + "'");
  }
}

EdgeId StarGraph::id(const std::string& name) const {
  for (EdgeId e = 0; e < names_.size(); ++e)
    if (names_[e] == name) return e;
  throw Error(ErrorCode::InvalidArgument, "unknown edge '" + name + "'");
}

GraphPoint GraphPoint::on_edge(EdgeId e, double x) {
  if (!(x >= 0.0) || !std::isfinite(x))
    throw Error(ErrorCode::InvalidArgument, "radial coordinate must be finite and >= 0");
  GraphPoint g;
  if (x > 0.0) {
    g.kind_ = Kind::Edge;
    g.edge_ = e;
    g.x_ = x;
  }
  return g;
}

double graph_distance(const GraphPoint& g, const GraphPoint& h) {
  if (g.is_cemetery() || h.is_cemetery())
    throw Error(ErrorCode::CemeteryArg, "distance to the cemetery is undefined");
  if (g.is_vertex() || h.is_vertex() || g.edge() != h.edge()) return g.x() + h.x();
  return std::abs(g.x() - h.x());
}

}  // namespace stargraph
