#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "tempord/bell.hpp"
#include "tempord/qswitch.hpp"
#include "testutil.hpp"

using namespace tempord;
using namespace tempord::bell;
using namespace tempord::qcore;

namespace {

const double kSqrt2 = std::sqrt(2.0);
const double kSqrt2Inv = 1.0 / kSqrt2;

StateVector phi_plus() {
  cvec v(4);
  v << kSqrt2Inv, 0, 0, kSqrt2Inv;
  return StateVector(v, {"S1", "S2"});
}

StateVector psi_plus() {
  cvec v(4);
  v << 0, kSqrt2Inv, kSqrt2Inv, 0;
  return StateVector(v, {"S1", "S2"});
}

MeasurementSettings random_settings(rng::Stream& rng) {
  MeasurementSettings s;
  for (int wing = 0; wing < 2; ++wing) {
    for (int setting = 0; setting < 2; ++setting) {
      const double theta = std::acos(rng.uniform(-1.0, 1.0));
      const double phi = rng.uniform(0.0, 2.0 * M_PI);
      const Eigen::Vector3d n(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                              std::cos(theta));
      s.observables[wing][setting] =
          n(0) * pauli_x() + n(1) * pauli_y() + n(2) * pauli_z();
    }
  }
  return s;
}

// Deterministic single-order strategy; outcomes in {+1,-1} per setting.
HiddenOrderModel deterministic_model(int a0, int a1, int b0, int b1) {
  HiddenOrderModel m;
  m.n_lambda = 1;
  m.n_f = 1;
  m.p_lambda_f = {1.0};
  m.response[0] = {a0 > 0 ? 1.0 : 0.0, a0 > 0 ? 1.0 : 0.0,
                   a1 > 0 ? 1.0 : 0.0, a1 > 0 ? 1.0 : 0.0};
  m.response[1] = {b0 > 0 ? 1.0 : 0.0, b0 > 0 ? 1.0 : 0.0,
                   b1 > 0 ? 1.0 : 0.0, b1 > 0 ? 1.0 : 0.0};
  m.order_rule[0] = {1.0, 0.0};
  m.order_rule[1] = {1.0, 0.0};
  m.p_z = {1.0, 1.0, 1.0, 1.0};
  return m;
}

}  // namespace

TEST_CASE("chsh_value: protocol conditional states and the product bound") {
  const auto bundle = appendix_b_protocol();

  const auto sc = qswitch::SwitchScenario::bipartite(bundle.psi1, bundle.psi2, bundle.u_a,
                                                     bundle.u_b, bundle.u_a, bundle.u_b,
                                                     kSqrt2Inv, kSqrt2Inv);
  const auto [p_minus, minus_state] = qswitch::condition_on_mass(sc, -1);
  CHECK(chsh_value(minus_state, bundle.settings) ==
        doctest::Approx(2.0 * kSqrt2).epsilon(1e-12));

  // Directly composed + branch: these settings see no violation at all.
  const auto [p_plus, plus_state] = qswitch::condition_on_mass(sc, +1);
  CHECK(chsh_value(plus_state, bundle.settings) == doctest::Approx(0.0).epsilon(1e-12));

  // Correlator arithmetic for (|00>+|11>)/sqrt(2): T = diag(1,-1,1) gives
  // (2<yy> - 2<zz>)/sqrt(2) = -2 sqrt(2).
  CHECK(chsh_value(phi_plus(), bundle.settings) ==
        doctest::Approx(-2.0 * kSqrt2).epsilon(1e-12));

  rng::Stream rng(13);
  for (int rep = 0; rep < 20; ++rep) {
    const auto product = tensor_product(
        StateVector(testutil::random_state_vector(rng, 2), {"S1"}),
        StateVector(testutil::random_state_vector(rng, 2), {"S2"}));
    CHECK(std::abs(chsh_value(product, bundle.settings)) <= 2.0 + 1e-10);
  }
}

TEST_CASE("chsh_value is linear in the state") {
  const auto bundle = appendix_b_protocol();
  rng::Stream rng(29);
  for (int rep = 0; rep < 10; ++rep) {
    const auto rho1 = density_matrix(StateVector(testutil::random_state_vector(rng, 4), {"S1", "S2"}));
    const auto rho2 = density_matrix(StateVector(testutil::random_state_vector(rng, 4), {"S1", "S2"}));
    const double p = rng.uniform();
    const DensityMatrix mix(p * rho1.entries() + (1.0 - p) * rho2.entries(), rho1.labels());
    const double lhs = chsh_value(mix, bundle.settings);
    const double rhs = p * chsh_value(rho1, bundle.settings) +
                       (1.0 - p) * chsh_value(rho2, bundle.settings);
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
  }
}

TEST_CASE("appendix_b_protocol bundle contents") {
  const auto bundle = appendix_b_protocol();
  // U_A U_B = (sigma_z + sigma_y)/sqrt(2).
  const cmat composed = bundle.u_a * bundle.u_b;
  const cmat expected = (pauli_z() + pauli_y()) / kSqrt2;
  CHECK((composed - expected).cwiseAbs().maxCoeff() < 1e-12);

  for (int wing = 0; wing < 2; ++wing) {
    for (int setting = 0; setting < 2; ++setting) {
      const cmat& obs = bundle.settings.observables[wing][setting];
      CHECK((obs * obs - cmat::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
  CHECK(std::abs(overlap(bundle.d_plus, bundle.d_minus)) < 1e-12);
}

TEST_CASE("optimal_chsh: canonical states and realizing settings") {
  const auto max_entangled = optimal_chsh(phi_plus());
  CHECK(max_entangled.value == doctest::Approx(2.0 * kSqrt2).epsilon(1e-12));
  CHECK(chsh_value(density_matrix(phi_plus()), max_entangled.settings) ==
        doctest::Approx(max_entangled.value).epsilon(1e-9));

  const auto psi = optimal_chsh(psi_plus());
  CHECK(psi.value == doctest::Approx(2.0 * kSqrt2).epsilon(1e-12));

  const auto product = optimal_chsh(tensor_product(z_plus("S1"), x_plus("S2")));
  CHECK(product.value == doctest::Approx(2.0).epsilon(1e-12));

  const DensityMatrix mixed(0.25 * cmat::Identity(4, 4), {"S1", "S2"});
  CHECK(optimal_chsh(mixed).value == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("optimal_chsh dominates sampled settings") {
  rng::Stream rng(31);
  for (int rep = 0; rep < 10; ++rep) {
    const StateVector state(testutil::random_state_vector(rng, 4), {"S1", "S2"});
    const auto best = optimal_chsh(state);
    CHECK(chsh_value(density_matrix(state), best.settings) ==
          doctest::Approx(best.value).epsilon(1e-9));
    for (int s = 0; s < 6; ++s) {
      const auto settings = random_settings(rng);
      CHECK(best.value >= std::abs(chsh_value(state, settings)) - 1e-9);
    }
  }
}

TEST_CASE("classical_joint_probability: deterministic point mass and normalization") {
  const auto m = deterministic_model(+1, -1, +1, +1);
  const auto table = classical_joint_probability(m, 0, 0);
  CHECK(table[0][0][0] == doctest::Approx(1.0));  // o1=+1, o2=+1, z=+1
  double total = 0.0;
  for (int o1 = 0; o1 < 2; ++o1)
    for (int o2 = 0; o2 < 2; ++o2)
      for (int z = 0; z < 2; ++z) total += table[o1][o2][z];
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));

  rng::Stream seedgen(3);
  for (int rep = 0; rep < 10; ++rep) {
    const auto model = sample_hidden_order_model(991, rep, SweepOptions{});
    for (int i1 = 0; i1 < 2; ++i1) {
      for (int i2 = 0; i2 < 2; ++i2) {
        const auto t = classical_joint_probability(model, i1, i2);
        double s = 0.0;
        for (int o1 = 0; o1 < 2; ++o1)
          for (int o2 = 0; o2 < 2; ++o2)
            for (int z = 0; z < 2; ++z) s += t[o1][o2][z];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("Born-rule response tables reproduce the unconditioned switch statistics") {
  const auto bundle = appendix_b_protocol();
  const auto sc = qswitch::SwitchScenario::bipartite(bundle.psi1, bundle.psi2, bundle.u_a,
                                                     bundle.u_b, bundle.u_a, bundle.u_b,
                                                     kSqrt2Inv, kSqrt2Inv);
  const auto reduced = partial_trace(density_matrix(qswitch::bipartite_switch_state(sc)), {"M"});

  // Hidden-order model: lambda picks the shared order, responses are the Born
  // probabilities of the per-branch wing states.
  const cvec branch_states[2] = {bundle.u_b * (bundle.u_a * z_plus("S").amplitudes()),
                                 bundle.u_a * (bundle.u_b * z_plus("S").amplitudes())};
  HiddenOrderModel model;
  model.n_lambda = 2;
  model.n_f = 1;
  model.p_lambda_f = {0.5, 0.5};
  model.order_rule[0] = {1.0, 0.0, 0.0, 1.0};  // sigma_1 = lambda
  model.order_rule[1] = {1.0, 0.0, 0.0, 1.0};
  for (int wing = 0; wing < 2; ++wing) {
    model.response[wing].resize(4);
    for (int setting = 0; setting < 2; ++setting) {
      const cmat projector_plus =
          0.5 * (identity2() + bundle.settings.observables[wing][setting]);
      for (int order = 0; order < 2; ++order) {
        const cvec& chi = branch_states[order];
        model.response[wing][static_cast<std::size_t>(setting * 2 + order)] =
            chi.dot(projector_plus * chi).real();
      }
    }
  }
  model.p_z.assign(8, 0.5);  // z uninformative

  for (int i1 = 0; i1 < 2; ++i1) {
    for (int i2 = 0; i2 < 2; ++i2) {
      const auto table = classical_joint_probability(model, i1, i2);
      for (int o1 = 0; o1 < 2; ++o1) {
        for (int o2 = 0; o2 < 2; ++o2) {
          const double classical = table[o1][o2][0] + table[o1][o2][1];
          const cmat p1 = 0.5 * (identity2() + (o1 == 0 ? 1.0 : -1.0) *
                                                   bundle.settings.observables[0][i1]);
          const cmat p2 = 0.5 * (identity2() + (o2 == 0 ? 1.0 : -1.0) *
                                                   bundle.settings.observables[1][i2]);
          const double quantum = expectation(reduced, kron(p1, p2));
          CHECK(classical == doctest::Approx(quantum).epsilon(1e-12));
        }
      }
    }
  }
}

TEST_CASE("condition_on_outcome_z: no-op for independent z and Bayes identity") {
  auto m = deterministic_model(+1, +1, -1, +1);
  m.p_z.assign(4, 0.37);  // z independent of everything
  const auto table = classical_joint_probability(m, 1, 0);
  for (int z = 0; z < 2; ++z) {
    const auto conditioned = condition_on_outcome_z(table, z);
    CHECK(conditioned.p_z == doctest::Approx(z == 0 ? 0.37 : 0.63).epsilon(1e-12));
    for (int o1 = 0; o1 < 2; ++o1) {
      for (int o2 = 0; o2 < 2; ++o2) {
        const double marginal = table[o1][o2][0] + table[o1][o2][1];
        CHECK(conditioned.p[o1][o2] == doctest::Approx(marginal).epsilon(1e-12));
      }
    }
  }

  for (int rep = 0; rep < 10; ++rep) {
    const auto model = sample_hidden_order_model(17, rep, SweepOptions{});
    const auto t = classical_joint_probability(model, 0, 1);
    for (int z = 0; z < 2; ++z) {
      const auto conditioned = condition_on_outcome_z(t, z);
      for (int o1 = 0; o1 < 2; ++o1)
        for (int o2 = 0; o2 < 2; ++o2)
          CHECK(conditioned.p[o1][o2] * conditioned.p_z ==
                doctest::Approx(t[o1][o2][z]).epsilon(1e-12));
    }
  }

  JointOutcomeTable dead{};
  dead[0][0][0] = 1.0;
  CHECK_THROWS_AS(condition_on_outcome_z(dead, 1), std::domain_error);
}

TEST_CASE("free choice: P(z) does not depend on the settings") {
  for (int rep = 0; rep < 10; ++rep) {
    const auto model = sample_hidden_order_model(71, rep, SweepOptions{});
    double reference = -1.0;
    for (int i1 = 0; i1 < 2; ++i1) {
      for (int i2 = 0; i2 < 2; ++i2) {
        const auto table = classical_joint_probability(model, i1, i2);
        double pz = 0.0;
        for (int o1 = 0; o1 < 2; ++o1)
          for (int o2 = 0; o2 < 2; ++o2) pz += table[o1][o2][0];
        if (reference < 0.0) {
          reference = pz;
        } else {
          CHECK(pz == doctest::Approx(reference).epsilon(1e-13));
        }
      }
    }
  }
}

TEST_CASE("all 16 deterministic strategies peak at exactly 2") {
  double max_abs = 0.0;
  for (int a0 : {+1, -1}) {
    for (int a1 : {+1, -1}) {
      for (int b0 : {+1, -1}) {
        for (int b1 : {+1, -1}) {
          const auto model = deterministic_model(a0, a1, b0, b1);
          const double value = std::abs(conditioned_chsh(model, 0));
          max_abs = std::max(max_abs, value);
          CHECK(value <= 2.0);
        }
      }
    }
  }
  CHECK(max_abs == 2.0);
}

TEST_CASE("random hidden-order models respect the classical bound") {
  const auto result = classical_chsh_sweep(400, 20250810, SweepOptions{}, 1);
  CHECK(result.max_abs_chsh <= 2.0 + kClassicalBoundTol);
  CHECK(result.max_abs_chsh > 0.0);

  SweepOptions joint;
  joint.joint_order_rule = true;
  const auto correlated = classical_chsh_sweep(400, 20250810, joint, 1);
  CHECK(correlated.max_abs_chsh <= 2.0 + kClassicalBoundTol);
}

TEST_CASE("sweep is deterministic and thread-count independent") {
  const auto serial = classical_chsh_sweep(300, 99, SweepOptions{}, 1);
  const auto parallel = classical_chsh_sweep(300, 99, SweepOptions{}, 4);
  CHECK(serial.max_abs_chsh == parallel.max_abs_chsh);
  CHECK(serial.worst_index == parallel.worst_index);
  CHECK(serial.worst_z_index == parallel.worst_z_index);
}

TEST_CASE("model validation rejects malformed distributions") {
  auto m = deterministic_model(+1, +1, +1, +1);
  m.p_lambda_f = {0.7};  // not normalized
  CHECK_THROWS_AS(classical_joint_probability(m, 0, 0), std::invalid_argument);

  auto m2 = deterministic_model(+1, +1, +1, +1);
  m2.response[0][0] = 1.5;
  CHECK_THROWS_AS(classical_joint_probability(m2, 0, 0), std::invalid_argument);
}
