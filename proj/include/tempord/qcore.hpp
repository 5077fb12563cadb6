// Dense complex linear algebra for labeled multi-qubit registers.
//
// Register convention: big-endian. The first label owns the most significant
// bit of the basis index, so |ab⟩ on labels (A, B) is amplitudes[2*a + b].
// All modules share this convention.

#pragma once

#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace tempord::qcore {

using complexd = std::complex<double>;
using cvec = Eigen::VectorXcd;
using cmat = Eigen::MatrixXcd;
using Labels = std::vector<std::string>;

// Structural tolerance for norm / unitarity / Hermiticity checks.
inline constexpr double kStructuralTol = 1e-10;
// Probability below which a measurement branch is treated as empty.
inline constexpr double kConditioningCutoff = 1e-12;
// Dense representation only; largest object in the toolkit is 11 registers,
// the cap leaves headroom.
inline constexpr int kMaxRegisters = 13;

// ---------------------------------------------------------------------------
// Raw kron / register permutation helpers (label bookkeeping done by caller).

cvec kron(const cvec& a, const cvec& b);
cmat kron(const cmat& a, const cmat& b);

// Reorders the tensor factors of a vector/matrix indexed by `from` so that
// they are indexed by `to` (a permutation of `from`).
cvec permute_registers(const cvec& v, const Labels& from, const Labels& to);
cmat permute_registers(const cmat& m, const Labels& from, const Labels& to);

// ---------------------------------------------------------------------------
// Domain types. Values are immutable after construction and validated on
// construction; all operations below are pure functions.

class StateVector {
 public:
  StateVector(cvec amplitudes, Labels labels);

  const cvec& amplitudes() const { return amplitudes_; }
  const Labels& labels() const { return labels_; }
  Eigen::Index dim() const { return amplitudes_.size(); }
  int num_registers() const { return static_cast<int>(labels_.size()); }

 private:
  cvec amplitudes_;
  Labels labels_;
};

class Operator {
 public:
  Operator(cmat entries, Labels labels);

  const cmat& entries() const { return entries_; }
  const Labels& labels() const { return labels_; }
  Eigen::Index dim() const { return entries_.rows(); }

  bool is_unitary(double tol = kStructuralTol) const;
  bool is_hermitian(double tol = kStructuralTol) const;

 private:
  cmat entries_;
  Labels labels_;
};

class DensityMatrix {
 public:
  // Validates Hermiticity, unit trace and positivity (eigenvalues >= -1e-10).
  DensityMatrix(cmat entries, Labels labels);

  const cmat& entries() const { return entries_; }
  const Labels& labels() const { return labels_; }
  Eigen::Index dim() const { return entries_.rows(); }

 private:
  cmat entries_;
  Labels labels_;
};

// ---------------------------------------------------------------------------
// Operations.

// Tensor product; left argument occupies the most significant position.
// Throws on overlapping label sets.
StateVector tensor_product(const StateVector& a, const StateVector& b);
Operator tensor_product(const Operator& a, const Operator& b);
DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b);

// Applies a unitary acting on a subset of the state's registers (identity on
// the rest). Throws if u is not unitary or labels are unknown.
StateVector apply(const Operator& u, const StateVector& s);
DensityMatrix apply(const Operator& u, const DensityMatrix& rho);

DensityMatrix density_matrix(const StateVector& s);

// Traces out the `discard` registers; remaining labels keep their order.
DensityMatrix partial_trace(const DensityMatrix& rho, const Labels& discard);

// Projects the named register onto `onto` (a single-register state) and
// renormalizes the rest. Returns (probability, conditional state). Throws a
// zero-probability-branch error when the outcome probability is below the
// conditioning cutoff.
std::pair<double, StateVector> project_and_condition(const StateVector& s,
                                                     const std::string& register_label,
                                                     const StateVector& onto);

// Von Neumann entropy (base 2) of the reduced state on the `cut` registers.
double entanglement_entropy(const StateVector& s, const Labels& cut);

// (1/2) * sum of absolute eigenvalues of (a - b).
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// ⟨a|b⟩ with b's registers permuted into a's order.
complexd overlap(const StateVector& a, const StateVector& b);

double expectation(const DensityMatrix& rho, const cmat& observable);
double expectation(const StateVector& s, const cmat& observable);

// ---------------------------------------------------------------------------
// Common single-qubit constants and basis states.

cmat pauli_x();
cmat pauli_y();
cmat pauli_z();
cmat identity2();

StateVector basis_state(const std::string& label, int bit);
StateVector z_plus(const std::string& label);
StateVector z_minus(const std::string& label);
StateVector x_plus(const std::string& label);
StateVector x_minus(const std::string& label);
StateVector y_plus(const std::string& label);
StateVector y_minus(const std::string& label);

}  // namespace tempord::qcore
