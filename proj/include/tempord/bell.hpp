// CHSH evaluation, the fixed two-wing measurement protocol, optimal-settings
// search via the correlation matrix, and a generative model of classically
// ordered events whose conditioned statistics provably stay at or below the
// classical bound.

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "tempord/qcore.hpp"

namespace tempord::bell {

using qcore::cmat;
using qcore::DensityMatrix;
using qcore::StateVector;

inline constexpr double kClassicalBoundTol = 1e-9;

// Two dichotomic (+1/-1) observables per wing.
struct MeasurementSettings {
  // observables[wing][setting], each 2x2 Hermitian with eigenvalues +-1.
  std::array<std::array<cmat, 2>, 2> observables;

  void validate() const;
};

// <C1_i1 C2_i2> correlator combination C00 + C01 + C10 - C11.
double chsh_value(const DensityMatrix& state, const MeasurementSettings& settings);
double chsh_value(const StateVector& state, const MeasurementSettings& settings);

// The fixed protocol bundle: initial product state, local unitaries,
// measurement settings and the control measurement basis.
struct ProtocolBundle {
  StateVector psi1;
  StateVector psi2;
  cmat u_a;
  cmat u_b;
  MeasurementSettings settings;
  StateVector d_plus;   // (|K_AB> + |K_BA>)/sqrt(2) on the control register
  StateVector d_minus;
};

ProtocolBundle appendix_b_protocol();

struct OptimalChsh {
  double value = 0.0;
  MeasurementSettings settings;  // realizes the value on the given state
};

// Largest CHSH over all dichotomic settings: 2 sqrt(sum of the two largest
// eigenvalues of T^T T), with T the 3x3 Pauli correlation matrix.
OptimalChsh optimal_chsh(const DensityMatrix& state);
OptimalChsh optimal_chsh(const StateVector& state);

// ---------------------------------------------------------------------------
// Classically ordered hidden-variable models.
//
// Outcome and order indices are 0/1; outcome index 0 encodes +1, index 1
// encodes -1. Order index 0 means A-before-B on that wing.

struct HiddenOrderModel {
  int n_lambda = 1;
  int n_f = 1;
  // P(lambda, f), flattened as lambda * n_f + f. Settings never enter here.
  std::vector<double> p_lambda_f;
  // Per wing: P(o = +1 | setting, f, order), flattened as
  // (setting * n_f + f) * 2 + order. Locality: wing j sees only (i_j, f, sigma_j).
  std::array<std::vector<double>, 2> response;
  // Per wing: P(order | lambda), flattened as lambda * 2 + order.
  std::array<std::vector<double>, 2> order_rule;
  // Optional joint P(order1, order2 | lambda), flattened lambda * 4 + o1 * 2 + o2.
  // When non-empty it replaces the product form (exploration toggle).
  std::vector<double> joint_order_rule;
  // P(z = +1 | lambda, f, order1, order2), flattened
  // ((lambda * n_f + f) * 2 + order1) * 2 + order2.
  std::vector<double> p_z;

  bool uses_joint_order_rule() const { return !joint_order_rule.empty(); }
  void validate() const;
};

// P(o1, o2, z) for one pair of settings, exact summation over the hidden
// variables. Indices: [o1][o2][z].
using JointOutcomeTable = std::array<std::array<std::array<double, 2>, 2>, 2>;

JointOutcomeTable classical_joint_probability(const HiddenOrderModel& model, int i1, int i2);

struct ConditionedTable {
  double p_z = 0.0;                            // marginal probability of this z
  std::array<std::array<double, 2>, 2> p{};    // P(o1, o2 | z)
};

// Bayesian inversion for one z value. Throws when P(z) vanishes.
ConditionedTable condition_on_outcome_z(const JointOutcomeTable& table, int z_index);

// CHSH of the z-conditioned statistics across the four setting pairs.
double conditioned_chsh(const HiddenOrderModel& model, int z_index);

struct SweepOptions {
  int max_lambda = 16;
  int max_f = 16;
  double extremal_fraction = 0.5;  // chance a wing's response table is deterministic
  bool joint_order_rule = false;
};

struct SweepResult {
  double max_abs_chsh = 0.0;
  std::uint64_t worst_index = 0;
  int worst_z_index = 0;
  HiddenOrderModel worst_model;
};

HiddenOrderModel sample_hidden_order_model(std::uint64_t seed, std::uint64_t index,
                                           const SweepOptions& options);

// Max |z-conditioned CHSH| over sampled models. Per-model draws come from the
// stream (seed, model index), so serial and parallel runs agree bit-for-bit.
SweepResult classical_chsh_sweep(std::uint64_t n_models, std::uint64_t seed,
                                 const SweepOptions& options = {}, int threads = 1);

}  // namespace tempord::bell
