// Quantum-controlled temporal order: the single-system gravitational switch
// and the bipartite entangled-order protocol.
//
// Branch convention: the control basis state |0> ("K_AB") means the A-side
// unitary acts first, so the branch operator is U_B * U_A; |1> ("K_BA") is
// the reverse. Free evolution between the two events is omitted.

#pragma once

#include <optional>
#include <utility>

#include "tempord/qcore.hpp"
#include "tempord/spacetime.hpp"

namespace tempord::qswitch {

using qcore::cmat;
using qcore::complexd;
using qcore::DensityMatrix;
using qcore::StateVector;

inline const std::string kControlLabel = "M";

enum class OrderSource { explicit_order, from_spacetime };

// Timing data that ties the branch orders to a pair of mass configurations.
// Scenario validation requires classify_order to return A-before-B on the
// K_AB configuration and B-before-A on the K_BA one.
struct SpacetimeOrderSource {
  spacetime::SpacetimeParams params;
  spacetime::MassConfiguration config_k_ab;
  spacetime::MassConfiguration config_k_ba;
  spacetime::EventSpec event_a;
  spacetime::EventSpec event_b;
};

struct SwitchScenario {
  StateVector target1;                  // first (or only) target register
  std::optional<StateVector> target2;   // second target register (bipartite)
  cmat u_a1;
  cmat u_b1;
  cmat u_a2;                            // bipartite only
  cmat u_b2;
  complexd alpha{1.0, 0.0};             // control amplitude on |K_AB>
  complexd beta{0.0, 0.0};              // control amplitude on |K_BA>
  OrderSource order_source = OrderSource::explicit_order;
  std::optional<SpacetimeOrderSource> spacetime_order;

  bool is_bipartite() const { return target2.has_value(); }
  void validate() const;

  static SwitchScenario single(StateVector target, cmat u_a, cmat u_b,
                               complexd alpha, complexd beta);
  static SwitchScenario bipartite(StateVector target1, StateVector target2,
                                  cmat u_a1, cmat u_b1, cmat u_a2, cmat u_b2,
                                  complexd alpha, complexd beta);
};

// alpha |K_AB>|U_B U_A psi> + beta |K_BA>|U_A U_B psi> over (M, S).
StateVector switch_state(const SwitchScenario& sc);

// Explicit mixture |alpha|^2 |psi1~><psi1~| + |beta|^2 |psi2~><psi2~| of the
// branch targets; an independent route to tracing the control out of
// switch_state.
DensityMatrix reduced_target(const SwitchScenario& sc);

// Two wings with correlated branch orders, over (M, S1, S2).
StateVector bipartite_switch_state(const SwitchScenario& sc);

// Projects the control of the bipartite state onto (|K_AB> + sign |K_BA>)/sqrt(2).
// Returns (probability, conditional state of the two targets).
std::pair<double, StateVector> condition_on_mass(const SwitchScenario& sc, int sign);

// |<U_B U_A psi | U_A U_B psi>|, the overlap that must vanish for the
// conditional states to be maximally entangled.
double order_orthogonality(const cmat& u_a, const cmat& u_b, const StateVector& psi);

}  // namespace tempord::qswitch
