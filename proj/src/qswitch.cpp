#include "tempord/qswitch.hpp"

#include <cmath>
#include <stdexcept>

namespace tempord::qswitch {

namespace {

using qcore::cvec;
using qcore::Labels;

void check_single_qubit_unitary(const cmat& u, const char* name) {
  if (u.rows() != 2 || u.cols() != 2) {
    throw std::invalid_argument(std::string("SwitchScenario: ") + name + " must be 2x2");
  }
  if ((u.adjoint() * u - cmat::Identity(2, 2)).cwiseAbs().maxCoeff() > qcore::kStructuralTol) {
    throw std::invalid_argument(std::string("SwitchScenario: ") + name + " is not unitary");
  }
}

cvec branch_target(const cmat& first, const cmat& second, const StateVector& psi) {
  return second * (first * psi.amplitudes());
}

StateVector control_basis(int sign) {
  cvec v(2);
  v << 1.0 / std::sqrt(2.0), sign >= 0 ? 1.0 / std::sqrt(2.0) : -1.0 / std::sqrt(2.0);
  return StateVector(std::move(v), {kControlLabel});
}

}  // namespace

void SwitchScenario::validate() const {
  if (target1.num_registers() != 1) {
    throw std::invalid_argument("SwitchScenario: targets must be single registers");
  }
  if (target1.labels()[0] == kControlLabel) {
    throw std::invalid_argument("SwitchScenario: target label collides with the control register");
  }
  check_single_qubit_unitary(u_a1, "U_A1");
  check_single_qubit_unitary(u_b1, "U_B1");
  if (is_bipartite()) {
    if (target2->num_registers() != 1 || target2->labels()[0] == kControlLabel ||
        target2->labels()[0] == target1.labels()[0]) {
      throw std::invalid_argument("SwitchScenario: invalid second target register");
    }
    check_single_qubit_unitary(u_a2, "U_A2");
    check_single_qubit_unitary(u_b2, "U_B2");
  }
  const double weight = std::norm(alpha) + std::norm(beta);
  if (std::abs(weight - 1.0) > qcore::kStructuralTol) {
    throw std::invalid_argument("SwitchScenario: |alpha|^2 + |beta|^2 must equal 1");
  }
  if (order_source == OrderSource::from_spacetime) {
    if (!spacetime_order) {
      throw std::invalid_argument("SwitchScenario: missing spacetime order source");
    }
    const auto& so = *spacetime_order;
    const auto ab = spacetime::classify_order(so.params, so.config_k_ab, so.event_a, so.event_b);
    const auto ba = spacetime::classify_order(so.params, so.config_k_ba, so.event_a, so.event_b);
    if (ab.relation != spacetime::CausalRelation::A_before_B ||
        ba.relation != spacetime::CausalRelation::B_before_A) {
      throw std::invalid_argument(
          "SwitchScenario: mass configurations do not realize the branch orders");
    }
  }
}

SwitchScenario SwitchScenario::single(StateVector target, cmat u_a, cmat u_b,
                                      complexd a, complexd b) {
  SwitchScenario sc{std::move(target), std::nullopt,
                    std::move(u_a),    std::move(u_b),
                    cmat(),            cmat(),
                    a,                 b,
                    OrderSource::explicit_order,
                    std::nullopt};
  sc.validate();
  return sc;
}

SwitchScenario SwitchScenario::bipartite(StateVector target1, StateVector target2,
                                         cmat u_a1, cmat u_b1, cmat u_a2, cmat u_b2,
                                         complexd a, complexd b) {
  SwitchScenario sc{std::move(target1), std::move(target2),
                    std::move(u_a1),    std::move(u_b1),
                    std::move(u_a2),    std::move(u_b2),
                    a,                  b,
                    OrderSource::explicit_order,
                    std::nullopt};
  sc.validate();
  return sc;
}

StateVector switch_state(const SwitchScenario& sc) {
  sc.validate();
  if (sc.is_bipartite()) {
    throw std::invalid_argument("switch_state: scenario is bipartite, use bipartite_switch_state");
  }
  const cvec first = branch_target(sc.u_a1, sc.u_b1, sc.target1);   // U_B U_A psi
  const cvec second = branch_target(sc.u_b1, sc.u_a1, sc.target1);  // U_A U_B psi
  cvec amps(4);
  amps.segment(0, 2) = sc.alpha * first;
  amps.segment(2, 2) = sc.beta * second;
  return StateVector(std::move(amps), {kControlLabel, sc.target1.labels()[0]});
}

DensityMatrix reduced_target(const SwitchScenario& sc) {
  sc.validate();
  if (sc.is_bipartite()) {
    throw std::invalid_argument("reduced_target: scenario is bipartite");
  }
  const cvec first = branch_target(sc.u_a1, sc.u_b1, sc.target1);
  const cvec second = branch_target(sc.u_b1, sc.u_a1, sc.target1);
  const cmat mixture = std::norm(sc.alpha) * (first * first.adjoint()) +
                       std::norm(sc.beta) * (second * second.adjoint());
  return DensityMatrix(mixture, {sc.target1.labels()[0]});
}

StateVector bipartite_switch_state(const SwitchScenario& sc) {
  sc.validate();
  if (!sc.is_bipartite()) {
    throw std::invalid_argument("bipartite_switch_state: scenario has a single target");
  }
  const cvec wing1_ab = branch_target(sc.u_a1, sc.u_b1, sc.target1);
  const cvec wing1_ba = branch_target(sc.u_b1, sc.u_a1, sc.target1);
  const cvec wing2_ab = branch_target(sc.u_a2, sc.u_b2, *sc.target2);
  const cvec wing2_ba = branch_target(sc.u_b2, sc.u_a2, *sc.target2);

  const cvec branch_ab = qcore::kron(wing1_ab, wing2_ab);
  const cvec branch_ba = qcore::kron(wing1_ba, wing2_ba);
  cvec amps(8);
  amps.segment(0, 4) = sc.alpha * branch_ab;
  amps.segment(4, 4) = sc.beta * branch_ba;
  return StateVector(std::move(amps),
                     {kControlLabel, sc.target1.labels()[0], sc.target2->labels()[0]});
}

std::pair<double, StateVector> condition_on_mass(const SwitchScenario& sc, int sign) {
  const StateVector joint = bipartite_switch_state(sc);
  return qcore::project_and_condition(joint, kControlLabel, control_basis(sign));
}

double order_orthogonality(const cmat& u_a, const cmat& u_b, const StateVector& psi) {
  check_single_qubit_unitary(u_a, "U_A");
  check_single_qubit_unitary(u_b, "U_B");
  const cvec ab = branch_target(u_a, u_b, psi);
  const cvec ba = branch_target(u_b, u_a, psi);
  return std::abs(ab.dot(ba));
}

}  // namespace tempord::qswitch
