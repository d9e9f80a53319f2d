#pragma once

#include <optional>
#include <vector>

#include "stargraph/graph.hpp"
#include "stargraph/jump_measure.hpp"
#include "stargraph/rng.hpp"

namespace stargraph {

struct JumpEvent {
  double time = 0.0;
  EdgeId edge = 0;
  double height = 0.0;
  bool operator==(const JumpEvent&) const = default;
};

/// Jump interval [P(t_n-), P(t_n)) of the combined process P, tagged with the
/// edge of the jump.
struct FlatInterval {
  double lminus = 0.0;
  double lplus = 0.0;
  EdgeId edge = 0;
  double t_jump = 0.0;
};

/// Exact representation of P(t) = drift * t + sum of jump heights up to t on
/// [0, horizon], for the subordinators Q^e and the combined P, P_e.
class JumpSet {
 public:
  JumpSet() = default;
  /// Events need not be sorted; they are sorted here.  Throws InvalidArgument
  /// on duplicate times, non-positive heights or times outside (0, horizon].
  JumpSet(double drift, std::vector<JumpEvent> events, double horizon, double cutoff = 0.0);

  double drift() const { return drift_; }
  double horizon() const { return horizon_; }
  double cutoff() const { return cutoff_; }
  const std::vector<JumpEvent>& events() const { return events_; }

  /// P(t).  Throws BeyondHorizon for t > horizon.
  double p_eval(double t) const;
  /// P(t-), with P(0-) = 0.
  double p_left(double t) const;
  /// P_e(t): own-edge jumps counted at t, other jumps only strictly before t.
  double p_e_eval(EdgeId e, double t) const;

  /// Where the pseudo-inverse inf{s : P(s) > u} lands.
  struct Inverse {
    double s = 0.0;
    /// Index of the jump whose interval [P(t_n-), P(t_n)) contains u.
    std::optional<std::size_t> jump;
  };
  /// Throws HorizonExhausted when P(horizon) <= u.
  Inverse locate(double u) const;
  double p_inverse(double u) const { return locate(u).s; }

  std::vector<FlatInterval> flat_intervals() const;
  FlatInterval flat_interval(std::size_t n) const;

  bool operator==(const JumpSet&) const = default;

 private:
  double drift_ = 0.0;
  std::vector<JumpEvent> events_;
  std::vector<double> cum_;  // cum_[i] = sum of heights of events 0..i
  double horizon_ = 0.0;
  double cutoff_ = 0.0;
};

/// Remaining lengths of jump excursions at local time l.
struct EtaValue {
  std::vector<double> per_edge;  // eta^e
  double total = 0.0;            // eta
  /// Edge with eta^e > 0, if any.
  std::optional<EdgeId> active;
};

/// eta^e = P_e(P^{-1}(l)) - l and eta = P(P^{-1}(l)) - l.
EtaValue eta(const JumpSet& J, double l, std::size_t n_edges);

/// Events on (0, horizon]: per edge a Poisson(horizon * Lambda_e(cutoff))
/// count, uniform times and inverse-tail heights.  Finite-mass parts ignore
/// the cutoff.  Throws NeedsCutoff for infinite measures with eps = 0.
JumpSet sample_jumpset(const JumpMeasureSpec& spec, double drift, double horizon, double eps,
                       std::size_t n_edges, Rng& rng);

/// Appends independent events on (horizon, new_horizon]; existing events are
/// untouched.
JumpSet extend_jumpset(const JumpSet& J, const JumpMeasureSpec& spec, double new_horizon,
                       double eps, std::size_t n_edges, Rng& rng);

}  // namespace stargraph
