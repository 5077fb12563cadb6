// Relativistic timing engine: static-metric components, proper-time rates,
// radial light propagation, event-order classification, photon bounce
// schedules and protocol/decoherence timescales.
//
// Quantities that can be geometrically unattainable (no mass, degenerate
// geometry) are returned as +infinity rather than thrown, so parameter sweeps
// including M = 0 stay total.

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace tempord::spacetime {

// Fixed in one place for reproducibility of golden files.
struct PhysicalConstants {
  double G = 6.67430e-11;         // m^3 kg^-1 s^-2
  double c = 299792458.0;         // m / s
  double hbar = 1.054571817e-34;  // J s
};

enum class MetricMode { post_newtonian_1, exact_schwarzschild };

struct SpacetimeParams {
  double mass_kg = 0.0;
  MetricMode metric_mode = MetricMode::post_newtonian_1;
  double G = PhysicalConstants{}.G;
  double c = PhysicalConstants{}.c;
  // When set, replaces 2GM/c^2 as the geometric length scale everywhere the
  // metric is evaluated (mass_kg is still used by decoherence formulas).
  std::optional<double> schwarzschild_radius_override_m;

  double derived_schwarzschild_radius_m() const;  // always 2GM/c^2
  double schwarzschild_radius_m() const;          // override if present
  // GM/c^2 consistent with the (possibly overridden) Schwarzschild radius.
  double gravitational_length_m() const { return 0.5 * schwarzschild_radius_m(); }

  void validate() const;
};

enum class BranchLabel { K_AB, K_BA };

struct MassConfiguration {
  BranchLabel branch = BranchLabel::K_AB;
  std::map<std::string, double> agent_radii_m;

  double radius_of(const std::string& agent_id) const;
  void validate(const SpacetimeParams& p) const;
};

struct EventSpec {
  std::string agent_id;
  double trigger_proper_time_s = 0.0;

  void validate() const;
};

enum class CausalRelation { A_before_B, B_before_A, spacelike };

struct OrderOutcome {
  CausalRelation relation = CausalRelation::spacelike;
  double slack_s = 0.0;  // coordinate-time margin; >= 0 for timelike relations
};

struct MetricComponents {
  double g00 = -1.0;
  double grr = 1.0;
};

struct NearHorizonRatio {
  double approximate = 1.0;  // sqrt((R_S/eps) * (1 + 2 Phi(R_S+l)/c^2))
  double exact = 1.0;        // sqrt(g00(R_S+l) / g00(R_S+eps))
};

struct PhotonArrival {
  std::string agent_id;
  int bounce_index = 0;
  double coordinate_time_s = 0.0;
  double local_time_s = 0.0;
  bool coincides_with_trigger = false;
};

struct ProtocolTimes {
  double tau_a_s = 0.0;  // proper time at the inner agent fixing the order
  double tau_b_s = 0.0;  // proper time defining the partner event
  double t_a_s = 0.0;    // coordinate time corresponding to tau_a
  double t_o_s = 0.0;    // coordinate time spent applying the operations
  double t_p_s = 0.0;    // coordinate duration of the whole protocol
  bool attainable() const;
};

// ---------------------------------------------------------------------------

MetricComponents metric_components(const SpacetimeParams& p, double r_m);

// sqrt(-g00(r)), the rate d(tau)/dt of a static clock at radius r.
double proper_time_rate(const SpacetimeParams& p, double r_m);

// Coordinate travel time of a radial photon between the two radii,
// by adaptive quadrature (relative tolerance 1e-12). Symmetric.
// In post-Newtonian mode the integrand is the first-order expansion
// (1 - 2 Phi/c^2)/c; in exact mode it is 1/(c (1 - R_S/r)).
double light_coordinate_time(const SpacetimeParams& p, double r_from_m, double r_to_m);

// Local time at radius r_b when a photon emitted at local time tau_star from
// radius r_a arrives, with both clocks synchronized to coordinate time 0.
double arrival_local_time(const SpacetimeParams& p, double r_a_m, double r_b_m,
                          double tau_star_s);

// Smallest trigger proper time for which the event at the outer radius r_a is
// in the causal past of the event at r_b. +infinity when unattainable (M=0).
double tau_star_threshold(const SpacetimeParams& p, double r_a_m, double r_b_m);

// The quoted weak-field sufficient bound 2 r_a^2 c / GM (+infinity for M=0).
double tau_star_weak_field_bound(const SpacetimeParams& p, double r_a_m);

OrderOutcome classify_order(const SpacetimeParams& p, const MassConfiguration& config,
                            const EventSpec& event_a, const EventSpec& event_b);

// Ratio of ticking rates between clocks at R_S + l and R_S + eps
// (exact Schwarzschild mode only).
NearHorizonRatio near_horizon_rate_ratio(const SpacetimeParams& p, double epsilon_m,
                                         double l_m);

// Bounce schedule a -> b -> a -> b starting with the photon at agent_a at the
// given coordinate time. Arrival local times are flagged when they coincide
// with the trigger proper time within 1e-6 relative.
std::vector<PhotonArrival> photon_schedule(const SpacetimeParams& p,
                                           const MassConfiguration& config,
                                           const std::string& agent_a,
                                           const std::string& agent_b,
                                           double emission_coordinate_time_s,
                                           double trigger_proper_time_s);

// Protocol timescales for the symmetric two-configuration arrangement with the
// inner agent at r, configurations separated by L, and agent spacing h.
ProtocolTimes appendix_c_times(const SpacetimeParams& p, double r_m, double l_separation_m,
                               double h_m);

// Gravitational decoherence timescale 2 delta^3 hbar / (G (m L)^2).
double diosi_penrose_time(double delta_m, double mass_kg, double l_m, double hbar);

}  // namespace tempord::spacetime
