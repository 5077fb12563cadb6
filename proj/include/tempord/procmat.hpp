// Process matrices over labeled qubit slots, the generalized Born rule, and
// the fixed-order / switch / entangled-order constructions with their
// non-separability certificates.
//
// Choi convention (pinned operationally by the requirement that born_rule
// reproduce circuit simulation on fixed-order processes): a channel
// rho -> M(rho) on a slot pair (X_I, X_O) is represented by the full
// transpose of (id (x) M) applied to the unnormalized maximally entangled
// projector. Concretely,
//   unitary U        -> |v><v| with |v> = sum_j |j>^{X_I} (x) conj(U)|j>^{X_O},
//   identity channel -> |1>><<1|  with |1>> = sum_j |j>|j>,
//   measure-and-prepare (P, sigma) -> P^{X_I} (x) sigma^T{X_O},
//   terminal POVM element E  -> E^{X_I} (untransposed),
//   terminal discard         -> identity on X_I.
// Chains terminate at the final input slot (measure-and-discard); no output
// slot is attached to the last region.

#pragma once

#include <string>
#include <vector>

#include "tempord/qcore.hpp"

namespace tempord::procmat {

using qcore::cmat;
using qcore::cvec;
using qcore::Labels;

inline constexpr double kSignallingThreshold = 1e-9;
inline constexpr double kBornImagTol = 1e-10;
inline constexpr double kBornRangeTol = 1e-9;

enum class OperationKind {
  unitary_channel,
  projective_outcome,
  state_preparation,
  identity_channel,
  trace_out,
};

struct LocalOperationCJ {
  cmat entries;
  OperationKind kind = OperationKind::identity_channel;
};

LocalOperationCJ choi_of_unitary(const cmat& u);
LocalOperationCJ choi_identity(Eigen::Index dim);
// Selective measure-and-prepare: POVM element at the input, state at the output.
LocalOperationCJ measure_and_prepare(const cmat& povm_element, const cmat& prepared);
// Discard the input, prepare `rho` at the output (trace preserving).
LocalOperationCJ prepare_state(Eigen::Index input_dim, const cmat& rho);
// Terminal slots (input only).
LocalOperationCJ povm_element(const cmat& element);
LocalOperationCJ trace_out(Eigen::Index dim);

struct ProcessMatrix {
  cmat entries;
  Labels slot_labels;
  std::vector<int> slot_dims;  // per-label dimension (qubit slots: 2)

  Eigen::Index dim() const { return entries.rows(); }
};

// One local operation covering an ordered subset of slots.
struct SlotOperation {
  Labels slots;
  LocalOperationCJ op;
};

// Tr[(ops_1 (x) ... (x) ops_n) W] with the operations permuted into the
// process's slot order. The operations must cover every slot exactly once.
// Throws when the trace has a non-negligible imaginary part or falls outside
// [-1e-9, 1+1e-9]; otherwise the value is clamped to [0, 1].
double born_rule(const ProcessMatrix& w, const std::vector<SlotOperation>& ops);

enum class EventOrder { a_first, b_first };

// rho^{first_I} (x) |1>><<1|^{first_O second_I} (x) 1^{second_O}
// on slots (A_I, A_O, B_I, B_O).
ProcessMatrix fixed_order_process(const cmat& rho, EventOrder order);

// Three-region chain ending in a terminal measurement slot:
// rho^{first_I} (x) |1>><<1|^{first_O second_I} (x) |1>><<1|^{second_O C_I}
// on slots (A_I, A_O, B_I, B_O, C_I).
ProcessMatrix fixed_order_chain(const cmat& rho, EventOrder order);

// Convex mixture p * W_{A first} + (1-p) * W_{B first} of the two-party
// fixed-order processes.
ProcessMatrix mixture_of_fixed_orders(const cmat& rho, double p_a_first);

// Rank-one switch process on slots (M_I, A_I, A_O, B_I, B_O, C_I); the
// control basis state |0> routes the target through A first.
ProcessMatrix switch_process(const cvec& target = qcore::z_plus("S").amplitudes());

// Classically correlated counterpart of the switch (the control dephased):
// p |0><0| (x) W_chain(A first) + (1-p) |1><1| (x) W_chain(B first).
ProcessMatrix causal_mixture(double p_a_first,
                             const cvec& target = qcore::z_plus("S").amplitudes());

// Rank-one two-wing process on slots
// (M_I, A1_I, A1_O, B1_I, B1_O, C1_I, A2_I, A2_O, B2_I, B2_O, C2_I)
// with the branch orders correlated across the wings.
ProcessMatrix entangled_order_process(const cvec& target1 = qcore::z_plus("S").amplitudes(),
                                      const cvec& target2 = qcore::z_plus("S").amplitudes());

// Hermiticity, positivity and Born-rule normalization (identity operations in
// every slot). Throws std::invalid_argument on violation.
void validate_process(const ProcessMatrix& w);

// True iff varying the preparation at `from_party`'s output changes some
// outcome probability of a Pauli measurement at `to_party`'s input, maximized
// over the fixed probe set (6 Pauli eigenstate preparations, 3 Pauli bases).
bool signalling_test(const ProcessMatrix& w, const std::string& from_party,
                     const std::string& to_party);

struct NonseparabilityReport {
  bool is_rank_one = false;
  bool two_way_signalling = false;
  bool certified() const { return is_rank_one && two_way_signalling; }
};

// Rank-one + two-way-signalling certificate between the two full parties
// (A and B, or A1 and B1 for the two-wing process).
NonseparabilityReport nonseparability_certificate(const ProcessMatrix& w);

}  // namespace tempord::procmat
