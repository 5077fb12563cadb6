#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "tempord/qcore.hpp"
#include "tempord/qswitch.hpp"
#include "testutil.hpp"

using namespace tempord;
using namespace tempord::qcore;
using namespace tempord::qswitch;

namespace {

const complexd kI(0.0, 1.0);
const double kSqrt2Inv = 1.0 / std::sqrt(2.0);

cmat unitary_a() { return (identity2() + kI * pauli_x()) / std::sqrt(2.0); }
cmat unitary_b() { return pauli_z(); }

SwitchScenario balanced_single() {
  return SwitchScenario::single(z_plus("S"), unitary_a(), unitary_b(), kSqrt2Inv, kSqrt2Inv);
}

SwitchScenario balanced_bipartite() {
  return SwitchScenario::bipartite(z_plus("S1"), z_plus("S2"), unitary_a(), unitary_b(),
                                   unitary_a(), unitary_b(), kSqrt2Inv, kSqrt2Inv);
}

}  // namespace

TEST_CASE("switch_state: identity branches give a product state") {
  const auto sc = SwitchScenario::single(z_plus("S"), identity2(), identity2(),
                                         kSqrt2Inv, kSqrt2Inv);
  const auto state = switch_state(sc);
  CHECK(entanglement_entropy(state, {kControlLabel}) == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("switch_state: branch targets for the protocol unitaries") {
  const auto state = switch_state(balanced_single());
  CHECK(state.amplitudes().norm() == doctest::Approx(1.0).epsilon(1e-12));

  // Branch K_AB carries U_B U_A |z+> = |y->, branch K_BA carries |y+>.
  const auto y_m = y_minus("S").amplitudes();
  const auto y_p = y_plus("S").amplitudes();
  CHECK(std::abs(state.amplitudes()(0) - kSqrt2Inv * y_m(0)) < 1e-12);
  CHECK(std::abs(state.amplitudes()(1) - kSqrt2Inv * y_m(1)) < 1e-12);
  CHECK(std::abs(state.amplitudes()(2) - kSqrt2Inv * y_p(0)) < 1e-12);
  CHECK(std::abs(state.amplitudes()(3) - kSqrt2Inv * y_p(1)) < 1e-12);
}

TEST_CASE("switch_state: commuting unitaries stay separable for any amplitudes") {
  const cmat rot = (identity2() * std::cos(0.3) + kI * std::sin(0.3) * pauli_x());
  const cmat rot2 = (identity2() * std::cos(1.1) + kI * std::sin(1.1) * pauli_x());
  const complexd alpha(0.6, 0.0);
  const complexd beta(0.0, 0.8);
  const auto sc = SwitchScenario::single(y_plus("S"), rot, rot2, alpha, beta);
  CHECK(entanglement_entropy(switch_state(sc), {kControlLabel}) ==
        doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("reduced_target: balanced protocol gives the maximally mixed state") {
  const auto rho = reduced_target(balanced_single());
  CHECK((rho.entries() - 0.5 * cmat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  const auto pure = reduced_target(SwitchScenario::single(z_plus("S"), unitary_a(), unitary_b(),
                                                          1.0, 0.0));
  const auto expected = y_minus("S");
  CHECK(std::abs((pure.entries() - expected.amplitudes() * expected.amplitudes().adjoint())
                     .cwiseAbs()
                     .maxCoeff()) < 1e-12);
}

TEST_CASE("tracing the control out of switch_state reproduces reduced_target") {
  rng::Stream rng(101);
  for (int rep = 0; rep < 10; ++rep) {
    const cmat u_a = testutil::random_unitary(rng, 2);
    const cmat u_b = testutil::random_unitary(rng, 2);
    const double theta = rng.uniform(0.0, M_PI / 2.0);
    const complexd alpha(std::cos(theta), 0.0);
    const complexd beta(std::sin(theta) * std::cos(0.7), std::sin(theta) * std::sin(0.7));
    const StateVector psi(testutil::random_state_vector(rng, 2), {"S"});
    const auto sc = SwitchScenario::single(psi, u_a, u_b, alpha, beta);

    const auto traced = partial_trace(density_matrix(switch_state(sc)), {kControlLabel});
    CHECK(trace_distance(traced, reduced_target(sc)) < 1e-12);
  }
}

TEST_CASE("bipartite_switch_state: identity unitaries factorize") {
  const auto sc = SwitchScenario::bipartite(z_plus("S1"), z_plus("S2"), identity2(), identity2(),
                                            identity2(), identity2(), kSqrt2Inv, kSqrt2Inv);
  const auto state = bipartite_switch_state(sc);
  const auto plus_control = StateVector((cvec(2) << kSqrt2Inv, kSqrt2Inv).finished(),
                                        {kControlLabel});
  const auto expected = tensor_product(tensor_product(plus_control, z_plus("S1")), z_plus("S2"));
  CHECK(std::abs(overlap(expected, state)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("bipartite_switch_state: wing states for the protocol unitaries") {
  const auto state = bipartite_switch_state(balanced_bipartite());
  CHECK(state.dim() == 8);
  const auto branch_ab = tensor_product(y_minus("S1"), y_minus("S2"));
  const auto branch_ba = tensor_product(y_plus("S1"), y_plus("S2"));
  // <K_AB, branch_ab | state> = alpha; <K_BA, branch_ba | state> = beta.
  const auto full_ab = tensor_product(z_plus(kControlLabel), branch_ab);
  const auto full_ba = tensor_product(z_minus(kControlLabel), branch_ba);
  CHECK(std::abs(overlap(full_ab, state)) == doctest::Approx(kSqrt2Inv).epsilon(1e-12));
  CHECK(std::abs(overlap(full_ba, state)) == doctest::Approx(kSqrt2Inv).epsilon(1e-12));
}

TEST_CASE("bipartite_switch_state: commuting second wing factors out") {
  const cmat rot = identity2() * std::cos(0.4) + kI * std::sin(0.4) * pauli_z();
  const auto sc = SwitchScenario::bipartite(z_plus("S1"), x_plus("S2"), unitary_a(), unitary_b(),
                                            rot, rot, kSqrt2Inv, kSqrt2Inv);
  const auto joint = bipartite_switch_state(sc);
  const auto no_wing2 = partial_trace(density_matrix(joint), {"S2"});

  const auto single = SwitchScenario::single(z_plus("S1"), unitary_a(), unitary_b(),
                                             kSqrt2Inv, kSqrt2Inv);
  const auto single_density = density_matrix(switch_state(single));
  CHECK(trace_distance(no_wing2, single_density) < 1e-12);
}

TEST_CASE("condition_on_mass: protocol unitaries") {
  const auto sc = balanced_bipartite();

  const auto [p_minus, minus_state] = condition_on_mass(sc, -1);
  CHECK(p_minus == doctest::Approx(0.5).epsilon(1e-12));
  cvec psi_plus(4);
  psi_plus << 0.0, kSqrt2Inv, kSqrt2Inv, 0.0;  // (|01> + |10>)/sqrt(2)
  CHECK(std::abs(overlap(StateVector(psi_plus, {"S1", "S2"}), minus_state)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  // Direct composition puts the + branch on (|00> - |11>)/sqrt(2).
  const auto [p_plus, plus_state] = condition_on_mass(sc, +1);
  CHECK(p_plus == doctest::Approx(0.5).epsilon(1e-12));
  cvec phi_minus(4);
  phi_minus << kSqrt2Inv, 0.0, 0.0, -kSqrt2Inv;
  CHECK(std::abs(overlap(StateVector(phi_minus, {"S1", "S2"}), plus_state)) ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK(std::abs(overlap(minus_state, plus_state)) < 1e-12);
}

TEST_CASE("condition_on_mass: identity unitaries") {
  const auto sc = SwitchScenario::bipartite(z_plus("S1"), z_plus("S2"), identity2(), identity2(),
                                            identity2(), identity2(), kSqrt2Inv, kSqrt2Inv);
  const auto [p_plus, state] = condition_on_mass(sc, +1);
  CHECK(p_plus == doctest::Approx(1.0).epsilon(1e-12));
  const auto product = tensor_product(z_plus("S1"), z_plus("S2"));
  CHECK(std::abs(overlap(product, state)) == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(condition_on_mass(sc, -1), std::domain_error);
}

TEST_CASE("conditional states are maximally entangled when orders are orthogonal") {
  // Conjugating an exactly orthogonal pair by a random unitary preserves the
  // orthogonality, giving a randomized family where entropy must be 1 bit.
  rng::Stream rng(55);
  for (int rep = 0; rep < 8; ++rep) {
    const cmat v = testutil::random_unitary(rng, 2);
    const cmat u_a = v * unitary_a() * v.adjoint();
    const cmat u_b = v * unitary_b() * v.adjoint();
    const qcore::cvec psi = v * z_plus("S").amplitudes();
    CHECK(order_orthogonality(u_a, u_b, StateVector(psi, {"S"})) < 1e-12);

    const auto sc = SwitchScenario::bipartite(StateVector(psi, {"S1"}), StateVector(psi, {"S2"}),
                                              u_a, u_b, u_a, u_b, kSqrt2Inv, kSqrt2Inv);
    for (int sign : {+1, -1}) {
      const auto [prob, state] = condition_on_mass(sc, sign);
      CHECK(prob == doctest::Approx(0.5).epsilon(1e-10));
      CHECK(entanglement_entropy(state, {"S1"}) == doctest::Approx(1.0).epsilon(1e-9));
    }
  }
}

TEST_CASE("conditional branch probabilities sum to 1") {
  rng::Stream rng(77);
  for (int rep = 0; rep < 12; ++rep) {
    const cmat u_a = testutil::random_unitary(rng, 2);
    const cmat u_b = testutil::random_unitary(rng, 2);
    const StateVector psi1(testutil::random_state_vector(rng, 2), {"S1"});
    const StateVector psi2(testutil::random_state_vector(rng, 2), {"S2"});
    const auto sc = SwitchScenario::bipartite(psi1, psi2, u_a, u_b, u_a, u_b,
                                              kSqrt2Inv, kSqrt2Inv);
    double total = 0.0;
    for (int sign : {+1, -1}) {
      try {
        total += condition_on_mass(sc, sign).first;
      } catch (const std::domain_error&) {
      }
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("conditional states are mutually orthogonal for orthogonal orders") {
  // With a balanced control and orthogonal branch states the +/- outcomes
  // project onto orthogonal target states. (With a non-real branch overlap
  // this need not hold, so the family below keeps the overlap at zero.)
  rng::Stream rng(78);
  for (int rep = 0; rep < 8; ++rep) {
    const cmat v = testutil::random_unitary(rng, 2);
    const cmat u_a = v * unitary_a() * v.adjoint();
    const cmat u_b = v * unitary_b() * v.adjoint();
    const qcore::cvec psi = v * z_plus("S").amplitudes();
    const auto sc = SwitchScenario::bipartite(StateVector(psi, {"S1"}), StateVector(psi, {"S2"}),
                                              u_a, u_b, u_a, u_b, kSqrt2Inv, kSqrt2Inv);
    const auto [p_plus, plus] = condition_on_mass(sc, +1);
    const auto [p_minus, minus] = condition_on_mass(sc, -1);
    CHECK(p_plus > 0.0);
    CHECK(p_minus > 0.0);
    CHECK(std::abs(overlap(plus, minus)) < 1e-10);
  }
}

TEST_CASE("order_orthogonality") {
  CHECK(order_orthogonality(unitary_a(), unitary_b(), z_plus("S")) ==
        doctest::Approx(0.0).epsilon(1e-12));
  CHECK(order_orthogonality(unitary_a(), unitary_a(), z_plus("S")) ==
        doctest::Approx(1.0).epsilon(1e-12));

  rng::Stream rng(91);
  for (int rep = 0; rep < 20; ++rep) {
    const double value = order_orthogonality(testutil::random_unitary(rng, 2),
                                             testutil::random_unitary(rng, 2),
                                             StateVector(testutil::random_state_vector(rng, 2), {"S"}));
    CHECK(value <= 1.0 + 1e-12);
  }
}

TEST_CASE("scenario validation") {
  CHECK_THROWS_AS(SwitchScenario::single(z_plus("S"), unitary_a(), unitary_b(), 1.0, 1.0),
                  std::invalid_argument);
  cmat not_unitary(2, 2);
  not_unitary << 1, 0, 0, 2;
  CHECK_THROWS_AS(SwitchScenario::single(z_plus("S"), not_unitary, unitary_b(),
                                         1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(SwitchScenario::single(z_plus(kControlLabel), unitary_a(), unitary_b(),
                                         1.0, 0.0),
                  std::invalid_argument);
}

TEST_CASE("spacetime order source: accepted and rejected configurations") {
  spacetime::SpacetimeParams p;
  p.mass_kg = spacetime::PhysicalConstants{}.c * spacetime::PhysicalConstants{}.c /
              spacetime::PhysicalConstants{}.G;  // GM/c^2 = 1 m
  const double r_far = 1.0e6;
  const double r_near = 0.9e6;
  const double threshold = spacetime::tau_star_threshold(p, r_far, r_near);

  SpacetimeOrderSource source;
  source.params = p;
  source.config_k_ab = {spacetime::BranchLabel::K_AB, {{"a", r_far}, {"b", r_near}}};
  source.config_k_ba = {spacetime::BranchLabel::K_BA, {{"a", r_near}, {"b", r_far}}};
  source.event_a = {"a", 1.1 * threshold};
  source.event_b = {"b", 1.1 * threshold};

  auto sc = balanced_bipartite();
  sc.order_source = OrderSource::from_spacetime;
  sc.spacetime_order = source;
  CHECK_NOTHROW(sc.validate());
  CHECK_NOTHROW(bipartite_switch_state(sc));

  // Below threshold the events are spacelike and the scenario is rejected.
  sc.spacetime_order->event_a.trigger_proper_time_s = 0.1 * threshold;
  sc.spacetime_order->event_b.trigger_proper_time_s = 0.1 * threshold;
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
}
