#include "tempord/procmat.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tempord::procmat {

namespace {

using qcore::complexd;

const Labels kSwitchSlots{"M_I", "A_I", "A_O", "B_I", "B_O", "C_I"};
const Labels kChainSlots{"A_I", "A_O", "B_I", "B_O", "C_I"};
const Labels kPairSlots{"A_I", "A_O", "B_I", "B_O"};

cvec identity_pair_vector() {
  cvec v = cvec::Zero(4);
  v(0) = 1.0;
  v(3) = 1.0;  // |00> + |11>, unnormalized
  return v;
}

void check_qubit_state(const cvec& psi, const char* what) {
  if (psi.size() != 2 || std::abs(psi.norm() - 1.0) > qcore::kStructuralTol) {
    throw std::invalid_argument(std::string(what) + ": target must be a normalized qubit state");
  }
}

void check_density(const cmat& rho, const char* what) {
  if (rho.rows() != 2 || rho.cols() != 2 ||
      (rho - rho.adjoint()).cwiseAbs().maxCoeff() > qcore::kStructuralTol ||
      std::abs(rho.trace().real() - 1.0) > qcore::kStructuralTol) {
    throw std::invalid_argument(std::string(what) + ": expected a qubit density matrix");
  }
}

// Chain vector |psi>^{first_I} |1>>^{first_O second_I} |1>>^{second_O C_I},
// expressed on the canonical (A_I, A_O, B_I, B_O, C_I) slot order.
cvec chain_vector(const cvec& psi, EventOrder order, const std::string& prefix_a,
                  const std::string& prefix_b, const std::string& terminal) {
  const std::string a_i = prefix_a + "_I";
  const std::string a_o = prefix_a + "_O";
  const std::string b_i = prefix_b + "_I";
  const std::string b_o = prefix_b + "_O";
  const Labels canonical{a_i, a_o, b_i, b_o, terminal};
  Labels built;
  if (order == EventOrder::a_first) {
    built = {a_i, a_o, b_i, b_o, terminal};
  } else {
    built = {b_i, b_o, a_i, a_o, terminal};
  }
  const cvec raw = qcore::kron(qcore::kron(psi, identity_pair_vector()), identity_pair_vector());
  return qcore::permute_registers(raw, built, canonical);
}

cvec basis2(int bit) {
  cvec v = cvec::Zero(2);
  v(bit) = 1.0;
  return v;
}

std::vector<int> qubit_dims(std::size_t n) { return std::vector<int>(n, 2); }

struct Party {
  std::string name;
  std::string input_slot;
  std::string output_slot;  // empty for terminal regions
  bool has_output() const { return !output_slot.empty(); }
};

Party resolve_party(const ProcessMatrix& w, const std::string& name) {
  Party party{name, name + "_I", name + "_O"};
  const auto has = [&](const std::string& slot) {
    return std::find(w.slot_labels.begin(), w.slot_labels.end(), slot) != w.slot_labels.end();
  };
  if (!has(party.input_slot)) {
    throw std::invalid_argument("procmat: process has no party '" + name + "'");
  }
  if (!has(party.output_slot)) party.output_slot.clear();
  return party;
}

// Complete (trace preserving) operation for any slot group not under probe.
SlotOperation complete_operation(const Party& party) {
  if (party.has_output()) {
    // Discard the input, prepare the maximally mixed state.
    return SlotOperation{{party.input_slot, party.output_slot},
                         prepare_state(2, 0.5 * cmat::Identity(2, 2))};
  }
  return SlotOperation{{party.input_slot}, trace_out(2)};
}

std::vector<Party> all_parties(const ProcessMatrix& w) {
  std::vector<Party> parties;
  for (const auto& slot : w.slot_labels) {
    if (slot.size() > 2 && slot.substr(slot.size() - 2) == "_I") {
      parties.push_back(resolve_party(w, slot.substr(0, slot.size() - 2)));
    }
  }
  return parties;
}

}  // namespace

// ---------------------------------------------------------------------------
// Local operations.

LocalOperationCJ choi_of_unitary(const cmat& u) {
  if (u.rows() != u.cols() ||
      (u.adjoint() * u - cmat::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff() >
          qcore::kStructuralTol) {
    throw std::invalid_argument("choi_of_unitary: operator is not unitary");
  }
  const Eigen::Index d = u.rows();
  cvec v = cvec::Zero(d * d);
  for (Eigen::Index j = 0; j < d; ++j) {
    v.segment(j * d, d) = u.col(j).conjugate();  // |j> (x) conj(U)|j>
  }
  return LocalOperationCJ{v * v.adjoint(), OperationKind::unitary_channel};
}

LocalOperationCJ choi_identity(Eigen::Index dim) {
  cvec v = cvec::Zero(dim * dim);
  for (Eigen::Index j = 0; j < dim; ++j) v(j * dim + j) = 1.0;
  return LocalOperationCJ{v * v.adjoint(), OperationKind::identity_channel};
}

LocalOperationCJ measure_and_prepare(const cmat& povm, const cmat& prepared) {
  const cmat transposed = prepared.transpose();
  return LocalOperationCJ{qcore::kron(povm, transposed), OperationKind::projective_outcome};
}

LocalOperationCJ prepare_state(Eigen::Index input_dim, const cmat& rho) {
  const cmat identity = cmat::Identity(input_dim, input_dim);
  const cmat transposed = rho.transpose();
  return LocalOperationCJ{qcore::kron(identity, transposed), OperationKind::state_preparation};
}

LocalOperationCJ povm_element(const cmat& element) {
  return LocalOperationCJ{element, OperationKind::projective_outcome};
}

LocalOperationCJ trace_out(Eigen::Index dim) {
  return LocalOperationCJ{cmat::Identity(dim, dim), OperationKind::trace_out};
}

// ---------------------------------------------------------------------------

double born_rule(const ProcessMatrix& w, const std::vector<SlotOperation>& ops) {
  Labels combined_labels;
  cmat combined;
  bool first = true;
  for (const auto& slot_op : ops) {
    const Eigen::Index expected =
        Eigen::Index{1} << static_cast<Eigen::Index>(slot_op.slots.size());
    if (slot_op.op.entries.rows() != expected) {
      throw std::invalid_argument("born_rule: operation dimension does not match its slots");
    }
    combined_labels.insert(combined_labels.end(), slot_op.slots.begin(), slot_op.slots.end());
    combined = first ? slot_op.op.entries : qcore::kron(combined, slot_op.op.entries);
    first = false;
  }
  const std::set<std::string> seen(combined_labels.begin(), combined_labels.end());
  const std::set<std::string> expected(w.slot_labels.begin(), w.slot_labels.end());
  if (combined_labels.size() != w.slot_labels.size() || seen != expected) {
    throw std::invalid_argument("born_rule: operations must cover every slot exactly once");
  }
  const cmat arranged = qcore::permute_registers(combined, combined_labels, w.slot_labels);

  const complexd trace = arranged.transpose().cwiseProduct(w.entries).sum();
  if (std::abs(trace.imag()) > kBornImagTol) {
    std::ostringstream os;
    os << "born_rule: probability has imaginary part " << trace.imag();
    throw std::runtime_error(os.str());
  }
  const double p = trace.real();
  if (p < -kBornRangeTol || p > 1.0 + kBornRangeTol) {
    std::ostringstream os;
    os << "born_rule: probability " << p << " outside [0, 1]";
    throw std::runtime_error(os.str());
  }
  return std::clamp(p, 0.0, 1.0);
}

ProcessMatrix fixed_order_process(const cmat& rho, EventOrder order) {
  check_density(rho, "fixed_order_process");
  const cmat pair = identity_pair_vector() * identity_pair_vector().adjoint();
  const cmat raw = qcore::kron(qcore::kron(rho, pair), cmat::Identity(2, 2));
  const Labels built = order == EventOrder::a_first
                           ? Labels{"A_I", "A_O", "B_I", "B_O"}
                           : Labels{"B_I", "B_O", "A_I", "A_O"};
  return ProcessMatrix{qcore::permute_registers(raw, built, kPairSlots), kPairSlots,
                       qubit_dims(4)};
}

ProcessMatrix fixed_order_chain(const cmat& rho, EventOrder order) {
  check_density(rho, "fixed_order_chain");
  // Rank factorization: a mixed input is a convex mixture of chain projectors.
  Eigen::SelfAdjointEigenSolver<cmat> es(rho);
  cmat total = cmat::Zero(32, 32);
  for (Eigen::Index k = 0; k < 2; ++k) {
    const double weight = std::max(es.eigenvalues()(k), 0.0);
    if (weight <= 0.0) continue;
    const cvec chain = chain_vector(es.eigenvectors().col(k), order, "A", "B", "C_I");
    total += weight * (chain * chain.adjoint());
  }
  return ProcessMatrix{std::move(total), kChainSlots, qubit_dims(5)};
}

ProcessMatrix mixture_of_fixed_orders(const cmat& rho, double p_a_first) {
  if (p_a_first < 0.0 || p_a_first > 1.0) {
    throw std::invalid_argument("mixture_of_fixed_orders: weight outside [0, 1]");
  }
  const auto ab = fixed_order_process(rho, EventOrder::a_first);
  const auto ba = fixed_order_process(rho, EventOrder::b_first);
  return ProcessMatrix{p_a_first * ab.entries + (1.0 - p_a_first) * ba.entries, kPairSlots,
                       qubit_dims(4)};
}

ProcessMatrix switch_process(const cvec& target) {
  check_qubit_state(target, "switch_process");
  const cvec chain_ab = chain_vector(target, EventOrder::a_first, "A", "B", "C_I");
  const cvec chain_ba = chain_vector(target, EventOrder::b_first, "A", "B", "C_I");
  const double s = 1.0 / std::sqrt(2.0);
  const cvec omega =
      s * (qcore::kron(basis2(0), chain_ab) + qcore::kron(basis2(1), chain_ba));
  return ProcessMatrix{omega * omega.adjoint(), kSwitchSlots, qubit_dims(6)};
}

ProcessMatrix causal_mixture(double p_a_first, const cvec& target) {
  if (p_a_first < 0.0 || p_a_first > 1.0) {
    throw std::invalid_argument("causal_mixture: weight outside [0, 1]");
  }
  check_qubit_state(target, "causal_mixture");
  const cvec chain_ab = chain_vector(target, EventOrder::a_first, "A", "B", "C_I");
  const cvec chain_ba = chain_vector(target, EventOrder::b_first, "A", "B", "C_I");
  const cvec branch0 = qcore::kron(basis2(0), chain_ab);
  const cvec branch1 = qcore::kron(basis2(1), chain_ba);
  return ProcessMatrix{p_a_first * (branch0 * branch0.adjoint()) +
                           (1.0 - p_a_first) * (branch1 * branch1.adjoint()),
                       kSwitchSlots, qubit_dims(6)};
}

ProcessMatrix entangled_order_process(const cvec& target1, const cvec& target2) {
  check_qubit_state(target1, "entangled_order_process");
  check_qubit_state(target2, "entangled_order_process");
  Labels slots{"M_I"};
  const Labels wing1{"A1_I", "A1_O", "B1_I", "B1_O", "C1_I"};
  const Labels wing2{"A2_I", "A2_O", "B2_I", "B2_O", "C2_I"};
  slots.insert(slots.end(), wing1.begin(), wing1.end());
  slots.insert(slots.end(), wing2.begin(), wing2.end());

  const auto two_wing = [&](EventOrder order) {
    return qcore::kron(chain_vector(target1, order, "A1", "B1", "C1_I"),
                       chain_vector(target2, order, "A2", "B2", "C2_I"));
  };
  const double s = 1.0 / std::sqrt(2.0);
  const cvec varpi = s * (qcore::kron(basis2(0), two_wing(EventOrder::a_first)) +
                          qcore::kron(basis2(1), two_wing(EventOrder::b_first)));
  return ProcessMatrix{varpi * varpi.adjoint(), std::move(slots), qubit_dims(11)};
}

// ---------------------------------------------------------------------------

void validate_process(const ProcessMatrix& w) {
  if (w.entries.rows() != w.entries.cols()) {
    throw std::invalid_argument("validate_process: matrix is not square");
  }
  if ((Eigen::Index{1} << w.slot_labels.size()) != w.dim()) {
    throw std::invalid_argument("validate_process: slot labels do not match the dimension");
  }
  const double scale = std::max(1.0, w.entries.cwiseAbs().maxCoeff());
  if ((w.entries - w.entries.adjoint()).cwiseAbs().maxCoeff() > qcore::kStructuralTol * scale) {
    throw std::invalid_argument("validate_process: matrix is not Hermitian");
  }
  if (w.dim() <= 512) {
    Eigen::SelfAdjointEigenSolver<cmat> es(w.entries, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -1e-10 * scale) {
      throw std::invalid_argument("validate_process: matrix is not positive semidefinite");
    }
  } else {
    Eigen::LDLT<cmat> ldlt(w.entries);
    if (ldlt.vectorD().real().minCoeff() < -1e-10 * scale) {
      throw std::invalid_argument("validate_process: matrix is not positive semidefinite");
    }
  }
  // Normalization: deterministic identity operations exhaust the probability.
  std::vector<SlotOperation> ops;
  for (const auto& party : all_parties(w)) {
    if (party.has_output()) {
      ops.push_back(SlotOperation{{party.input_slot, party.output_slot}, choi_identity(2)});
    } else {
      ops.push_back(SlotOperation{{party.input_slot}, trace_out(2)});
    }
  }
  const double total = born_rule(w, ops);
  if (std::abs(total - 1.0) > kBornRangeTol) {
    std::ostringstream os;
    os << "validate_process: identity operations give total probability " << total;
    throw std::invalid_argument(os.str());
  }
}

bool signalling_test(const ProcessMatrix& w, const std::string& from_party,
                     const std::string& to_party) {
  const Party from = resolve_party(w, from_party);
  const Party to = resolve_party(w, to_party);
  if (!from.has_output()) return false;  // nothing to vary

  // Fixed probe set: 6 Pauli eigenstate preparations at `from`, 3 Pauli
  // measurement bases at `to`.
  std::vector<cmat> preparations;
  const std::array<cmat, 3> paulis{qcore::pauli_x(), qcore::pauli_y(), qcore::pauli_z()};
  for (const auto& pauli : paulis) {
    for (double sign : {+1.0, -1.0}) {
      preparations.push_back(0.5 * (cmat::Identity(2, 2) + sign * pauli));
    }
  }

  std::vector<SlotOperation> background;
  for (const auto& party : all_parties(w)) {
    if (party.name == from.name || party.name == to.name) continue;
    background.push_back(complete_operation(party));
  }

  double max_spread = 0.0;
  for (int basis = 0; basis < 3; ++basis) {
    for (double sign : {+1.0, -1.0}) {
      const cmat outcome = 0.5 * (cmat::Identity(2, 2) + sign * paulis[basis]);
      double lo = 2.0;
      double hi = -1.0;
      for (const auto& prep : preparations) {
        std::vector<SlotOperation> ops = background;
        ops.push_back(SlotOperation{{from.input_slot, from.output_slot},
                                    prepare_state(2, prep)});
        if (to.has_output()) {
          ops.push_back(SlotOperation{{to.input_slot, to.output_slot},
                                      measure_and_prepare(outcome, 0.5 * cmat::Identity(2, 2))});
        } else {
          ops.push_back(SlotOperation{{to.input_slot}, povm_element(outcome)});
        }
        const double p = born_rule(w, ops);
        lo = std::min(lo, p);
        hi = std::max(hi, p);
      }
      max_spread = std::max(max_spread, hi - lo);
    }
  }
  return max_spread > kSignallingThreshold;
}

NonseparabilityReport nonseparability_certificate(const ProcessMatrix& w) {
  NonseparabilityReport report;

  // Rank-one check via the outer product of the dominant column.
  const Eigen::Index d = w.dim();
  Eigen::Index pivot = 0;
  double best = -1.0;
  for (Eigen::Index k = 0; k < d; ++k) {
    const double diag = w.entries(k, k).real();
    if (diag > best) {
      best = diag;
      pivot = k;
    }
  }
  const double scale = std::max(1.0, w.entries.cwiseAbs().maxCoeff());
  if (best > 1e-12 * scale) {
    const cvec v = w.entries.col(pivot) / std::sqrt(best);
    report.is_rank_one = (w.entries - v * v.adjoint()).cwiseAbs().maxCoeff() <= 1e-9 * scale;
  }

  const auto has_slot = [&](const std::string& slot) {
    return std::find(w.slot_labels.begin(), w.slot_labels.end(), slot) != w.slot_labels.end();
  };
  const std::string party_a = has_slot("A_I") ? "A" : "A1";
  const std::string party_b = has_slot("B_I") ? "B" : "B1";
  report.two_way_signalling =
      signalling_test(w, party_a, party_b) && signalling_test(w, party_b, party_a);
  return report;
}

}  // namespace tempord::procmat
