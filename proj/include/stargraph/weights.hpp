#pragma once

#include <vector>

#include "stargraph/jump_measure.hpp"

namespace stargraph {

/// Boundary data (p1, (p2^e), p3, p4) of a Brownian motion on a star graph.
/// Normalization is not required anywhere in the library.
struct BoundaryWeights {
  double p1 = 0.0;
  std::vector<double> p2;  // indexed by EdgeId; size = number of edges
  double p3 = 0.0;
  JumpMeasureSpec jump;
  /// Edge distribution of the underlying Walsh process when p2 == 0.  Empty
  /// means uniform.
  std::vector<double> walsh_weights_override;

  std::size_t n_edges() const { return p2.size(); }
  double p2_total() const;
  /// q_e = p2^e / p2 if p2 > 0, otherwise the override or 1/n.
  std::vector<double> edge_distribution() const;

  /// True unless p2 = 0, p3 = 0 and p4 is finite.
  bool admissible() const;
  /// Throws InadmissibleWeights when !admissible(), InvalidArgument for
  /// negative or non-finite components.
  void check_admissible() const;
  /// Component checks only (signs, sizes, jump-measure validity).
  void validate() const;

  /// Multiplies every component, including p4, by s > 0.
  BoundaryWeights scaled(double s) const;

  /// p1 + sum p2^e + p3 + int (1 - e^{-x}) p4.
  double normalizing_sum() const;

  bool operator==(const BoundaryWeights&) const = default;
};

/// Scales w so that the normalizing sum equals 1.  Throws AllZero.
BoundaryWeights normalize(const BoundaryWeights& w);

}  // namespace stargraph
