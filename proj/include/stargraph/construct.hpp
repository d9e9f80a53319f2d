#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stargraph/graph.hpp"
#include "stargraph/jumpset.hpp"
#include "stargraph/rng.hpp"
#include "stargraph/walsh.hpp"
#include "stargraph/weights.hpp"

namespace stargraph {

enum class Construction { ItoMcKean, Revival };

std::string to_string(Construction c);
Construction construction_from_string(const std::string& s);

struct PathMeta {
  Construction construction = Construction::ItoMcKean;
  double dt = 0.0;
  double eps = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t path_index = 0;
  std::size_t segments = 1;  // revival segments (1 for Ito-McKean)
  std::size_t revivals = 0;
};

/// Path of the process on the graph.  Node times are nondecreasing (equal
/// consecutive times encode instantaneous jumps); states are linearly
/// interpolated in the radial coordinate between nodes on a common edge.
/// After death the path holds one final cemetery node at `lifetime`.
struct GraphPath {
  std::vector<double> times;
  std::vector<GraphPoint> state;
  std::vector<double> ltime;  // local time of the process at the vertex
  double lifetime = kInfinity;
  PathMeta meta;

  std::size_t size() const { return times.size(); }
  void push(double t, const GraphPoint& g, double l) {
    times.push_back(t);
    state.push_back(g);
    ltime.push_back(l);
  }
};

struct ConstructionOptions {
  double eps = 1e-4;
  bool bridge_max = true;
};

/// Walsh path viewed as a graph path with local time L / scale.
GraphPath graph_path_from_walsh(const WalshPath& w, double ltime_scale = 1.0);

/// Assembly of X_t = (E(eta_t) o W_t, eta_t + |W_t|) from a Walsh path and a
/// jump set whose range covers the Walsh local time.  ltime = P^{-1}(L).
GraphPath assemble_itomckean(const WalshPath& w, const JumpSet& J, std::size_t n_edges);

/// Jump set with drift p2 whose range covers [0, lmax]: sampled up to
/// lmax / p2 + 1 when p2 > 0, otherwise on a horizon doubled until
/// P(horizon) > lmax.  Uses no randomness when p4 = 0.
JumpSet covering_jumpset(const BoundaryWeights& w, double lmax, double eps, Rng& rng);

/// Random inputs of one Ito-McKean path: the Walsh path (radius and edge
/// streams) and a covering jump set (jump stream).
struct ItoMcKeanInputs {
  WalshPath walsh;
  JumpSet jumps;
};
ItoMcKeanInputs sample_itomckean_inputs(const GraphPoint& start, double T, double dt,
                                        const BoundaryWeights& w, PathStreams& streams,
                                        const ConstructionOptions& opts = {});

/// Samples a Walsh path and a jump set (extending it until P(horizon) > L_T)
/// and assembles X on [0, T].
GraphPath itomckean_path(const GraphPoint& start, double T, double dt, const BoundaryWeights& w,
                         PathStreams& streams, const ConstructionOptions& opts = {});

/// Sticky time change tau_t = t + p3 * L^X_t followed by killing when
/// p1 * L^X exceeds an Exp(1) variable drawn from `rng`.
GraphPath apply_stickiness_and_killing(const GraphPath& path, double p1, double p3, Rng& rng);
/// Same with a prescribed exponential level.
GraphPath apply_stickiness_and_killing_at(const GraphPath& path, double p1, double p3,
                                          double exp_level);

/// Full Ito-McKean route: itomckean_path on [0, T] then stickiness and
/// killing (draw from streams.killing).  Covers at least [0, T].
GraphPath itomckean_full_path(const GraphPoint& start, double T, double dt,
                              const BoundaryWeights& w, PathStreams& streams,
                              const ConstructionOptions& opts = {});

struct RevivalOptions {
  bool bridge_max = true;
  std::size_t max_segments = 1000000;
};

/// Successive revivals of a sticky elastic Walsh process (or an absorbed one
/// with exponential holding at the vertex when p2 = 0).  Requires a finite
/// p4.  Covers [0, T] unless the path dies first.
GraphPath revival_path(const GraphPoint& start, double T, double dt, const BoundaryWeights& w,
                       PathStreams& streams, const RevivalOptions& opts = {});

}  // namespace stargraph
