#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "stargraph/graph.hpp"

namespace stargraph {

class Rng;
struct TestFunction;

/// Lambda(x) = c * x^(-beta), beta in (0, 1).  Infinite total mass.
struct PowerTail {
  double c = 1.0;
  double beta = 0.5;
  bool operator==(const PowerTail&) const = default;
};

/// Lambda(x) = c * exp(-rate * x).  Total mass c.
struct ExpTail {
  double c = 1.0;
  double rate = 1.0;
  bool operator==(const ExpTail&) const = default;
};

/// Tail function nu((x, inf)) of the per-edge jump measure.  `cutoff > 0`
/// restricts the measure to (cutoff, inf), which is how small-jump
/// truncation is represented in oracle computations.
struct EdgeTail {
  std::variant<PowerTail, ExpTail> family;
  double cutoff = 0.0;

  double tail(double x) const;
  /// Smallest x with tail(x) <= y, for 0 < y <= tail(cutoff).
  double inverse_tail(double y) const;
  bool finite_mass() const;
  double total_mass() const;  // +inf for infinite measures
  EdgeTail scaled(double s) const;
  std::string family_name() const;

  bool operator==(const EdgeTail&) const = default;
};

struct Atom {
  EdgeId edge = 0;
  double height = 0.0;
  double mass = 0.0;
  bool operator==(const Atom&) const = default;
};

/// The jump measure p4 on the graph minus the vertex, either as a finite
/// list of atoms (the zero measure is the empty list) or as one tail
/// function per edge.
class JumpMeasureSpec {
 public:
  using EdgeTails = std::vector<std::pair<EdgeId, EdgeTail>>;

  JumpMeasureSpec() = default;  // zero measure

  static JumpMeasureSpec atoms(std::vector<Atom> atoms);
  static JumpMeasureSpec density(EdgeTails tails);

  bool is_atoms() const { return std::holds_alternative<std::vector<Atom>>(data_); }
  bool is_zero() const;
  const std::vector<Atom>& atom_list() const { return std::get<std::vector<Atom>>(data_); }
  const EdgeTails& edge_tails() const { return std::get<EdgeTails>(data_); }

  bool finite_mass() const;
  double total_mass() const;
  /// Mass sitting on edge e (possibly +inf).
  double edge_mass(EdgeId e) const;
  /// nu_e((x, inf)) for the part on edge e; tail(e, 0) is the edge mass.
  double tail(EdgeId e, double x) const;

  JumpMeasureSpec scaled(double s) const;
  /// The measure as simulated with small-jump cutoff eps: infinite-mass
  /// tails are restricted to (eps, inf), finite parts are left unchanged.
  JumpMeasureSpec truncated(double eps) const;

  /// Checks heights, parameters and the finiteness of the normalizing
  /// integral.  Throws InvalidArgument or Divergent.
  void validate(std::size_t n_edges) const;

  /// Sample a point from p4 / |p4|; requires finite nonzero mass.
  GraphPoint sample_point(Rng& rng) const;

  bool operator==(const JumpMeasureSpec&) const = default;

 private:
  std::variant<std::vector<Atom>, EdgeTails> data_{std::vector<Atom>{}};
};

/// int (1 - exp(-lambda * l)) p4^Sigma(dl).
double jump_exp_integral(const JumpMeasureSpec& spec, double lambda);

/// int U^{W,D}_alpha f(g) p4(dg), with U^{W,D} the resolvent of the Walsh
/// process killed at the vertex.
double jump_dirichlet_integral(const JumpMeasureSpec& spec, double alpha, const TestFunction& f);

}  // namespace stargraph
