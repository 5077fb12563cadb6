#include "tempord/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>
#include <stdexcept>

namespace tempord::qcore {

namespace {

bool is_power_of_two(Eigen::Index n) { return n > 0 && (n & (n - 1)) == 0; }

int log2_exact(Eigen::Index n) {
  int k = 0;
  while ((Eigen::Index{1} << k) < n) ++k;
  return k;
}

void check_labels(const Labels& labels, Eigen::Index dim, const char* what) {
  if (!is_power_of_two(dim)) {
    throw std::invalid_argument(std::string(what) + ": dimension is not a power of two");
  }
  if ((Eigen::Index{1} << labels.size()) != dim) {
    std::ostringstream os;
    os << what << ": " << labels.size() << " labels do not match dimension " << dim;
    throw std::invalid_argument(os.str());
  }
  if (labels.size() > static_cast<std::size_t>(kMaxRegisters)) {
    throw std::invalid_argument(std::string(what) + ": register count exceeds dense-representation cap");
  }
  std::set<std::string> seen;
  for (const auto& l : labels) {
    if (l.empty()) throw std::invalid_argument(std::string(what) + ": empty register label");
    if (!seen.insert(l).second) {
      throw std::invalid_argument(std::string(what) + ": duplicate register label '" + l + "'");
    }
  }
}

// Position of each `to` label inside `from`.
std::vector<int> positions_in(const Labels& from, const Labels& to) {
  if (from.size() != to.size()) {
    throw std::invalid_argument("permute_registers: label lists differ in size");
  }
  std::vector<int> pos(to.size());
  for (std::size_t i = 0; i < to.size(); ++i) {
    auto it = std::find(from.begin(), from.end(), to[i]);
    if (it == from.end()) {
      throw std::invalid_argument("permute_registers: label '" + to[i] + "' not present");
    }
    pos[i] = static_cast<int>(it - from.begin());
  }
  return pos;
}

// Index map old->new for the permutation taking `from` ordering to `to`.
std::vector<Eigen::Index> permutation_index_map(const Labels& from, const Labels& to) {
  const auto pos = positions_in(from, to);
  const int n = static_cast<int>(from.size());
  const Eigen::Index dim = Eigen::Index{1} << n;
  std::vector<Eigen::Index> map(static_cast<std::size_t>(dim));
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::Index j = 0;
    for (int p = 0; p < n; ++p) {
      const int bit = static_cast<int>((i >> (n - 1 - pos[p])) & 1);
      j |= static_cast<Eigen::Index>(bit) << (n - 1 - p);
    }
    map[static_cast<std::size_t>(i)] = j;
  }
  return map;
}

Labels concat_disjoint(const Labels& a, const Labels& b, const char* what) {
  for (const auto& l : b) {
    if (std::find(a.begin(), a.end(), l) != a.end()) {
      throw std::invalid_argument(std::string(what) + ": label collision on '" + l + "'");
    }
  }
  Labels out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

void check_hermitian(const cmat& m, double tol, const char* what) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

cvec kron(const cvec& a, const cvec& b) {
  cvec out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    out.segment(i * b.size(), b.size()) = a(i) * b;
  }
  return out;
}

cmat kron(const cmat& a, const cmat& b) {
  cmat out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

cvec permute_registers(const cvec& v, const Labels& from, const Labels& to) {
  if (from == to) return v;
  const auto map = permutation_index_map(from, to);
  cvec out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) out(map[static_cast<std::size_t>(i)]) = v(i);
  return out;
}

cmat permute_registers(const cmat& m, const Labels& from, const Labels& to) {
  if (from == to) return m;
  const auto map = permutation_index_map(from, to);
  cmat out(m.rows(), m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      out(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)]) = m(i, j);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

StateVector::StateVector(cvec amplitudes, Labels labels)
    : amplitudes_(std::move(amplitudes)), labels_(std::move(labels)) {
  check_labels(labels_, amplitudes_.size(), "StateVector");
  const double norm = amplitudes_.norm();
  if (std::abs(norm - 1.0) > kStructuralTol) {
    std::ostringstream os;
    os << "StateVector: norm " << norm << " deviates from 1 beyond tolerance";
    throw std::invalid_argument(os.str());
  }
}

Operator::Operator(cmat entries, Labels labels)
    : entries_(std::move(entries)), labels_(std::move(labels)) {
  if (entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("Operator: matrix is not square");
  }
  check_labels(labels_, entries_.rows(), "Operator");
}

bool Operator::is_unitary(double tol) const {
  const cmat gram = entries_.adjoint() * entries_;
  return (gram - cmat::Identity(dim(), dim())).cwiseAbs().maxCoeff() <= tol;
}

bool Operator::is_hermitian(double tol) const {
  return (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

DensityMatrix::DensityMatrix(cmat entries, Labels labels)
    : entries_(std::move(entries)), labels_(std::move(labels)) {
  if (entries_.rows() != entries_.cols()) {
    throw std::invalid_argument("DensityMatrix: matrix is not square");
  }
  check_labels(labels_, entries_.rows(), "DensityMatrix");
  check_hermitian(entries_, kStructuralTol, "DensityMatrix");
  const double tr = entries_.trace().real();
  if (std::abs(tr - 1.0) > kStructuralTol || std::abs(entries_.trace().imag()) > kStructuralTol) {
    throw std::invalid_argument("DensityMatrix: trace deviates from 1 beyond tolerance");
  }
  Eigen::SelfAdjointEigenSolver<cmat> es(entries_, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() < -kStructuralTol) {
    throw std::invalid_argument("DensityMatrix: negative eigenvalue beyond tolerance");
  }
}

// ---------------------------------------------------------------------------

StateVector tensor_product(const StateVector& a, const StateVector& b) {
  return StateVector(kron(a.amplitudes(), b.amplitudes()),
                     concat_disjoint(a.labels(), b.labels(), "tensor_product"));
}

Operator tensor_product(const Operator& a, const Operator& b) {
  return Operator(kron(a.entries(), b.entries()),
                  concat_disjoint(a.labels(), b.labels(), "tensor_product"));
}

DensityMatrix tensor_product(const DensityMatrix& a, const DensityMatrix& b) {
  return DensityMatrix(kron(a.entries(), b.entries()),
                       concat_disjoint(a.labels(), b.labels(), "tensor_product"));
}

namespace {

// Applies u (on registers at given positions, in u's label order) to a dense
// vector over n registers without materializing the embedded operator.
cvec apply_on_positions(const cmat& u, const std::vector<int>& pos, int n, const cvec& in) {
  const int k = static_cast<int>(pos.size());
  const Eigen::Index dim = in.size();
  const Eigen::Index sub_dim = Eigen::Index{1} << k;
  cvec out = cvec::Zero(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::Index row = 0;
    for (int p = 0; p < k; ++p) {
      row |= ((i >> (n - 1 - pos[p])) & 1) << (k - 1 - p);
    }
    complexd acc = 0.0;
    for (Eigen::Index col = 0; col < sub_dim; ++col) {
      const complexd coeff = u(row, col);
      if (coeff == complexd(0.0, 0.0)) continue;
      Eigen::Index src = i;
      for (int p = 0; p < k; ++p) {
        const Eigen::Index bit = (col >> (k - 1 - p)) & 1;
        const Eigen::Index mask = Eigen::Index{1} << (n - 1 - pos[p]);
        src = (src & ~mask) | (bit << (n - 1 - pos[p]));
      }
      acc += coeff * in(src);
    }
    out(i) = acc;
  }
  return out;
}

std::vector<int> subset_positions(const Labels& sub, const Labels& full, const char* what) {
  std::vector<int> pos;
  pos.reserve(sub.size());
  for (const auto& l : sub) {
    auto it = std::find(full.begin(), full.end(), l);
    if (it == full.end()) {
      throw std::invalid_argument(std::string(what) + ": unknown register label '" + l + "'");
    }
    pos.push_back(static_cast<int>(it - full.begin()));
  }
  return pos;
}

}  // namespace

StateVector apply(const Operator& u, const StateVector& s) {
  if (!u.is_unitary()) {
    throw std::invalid_argument("apply: operator is not unitary within tolerance");
  }
  const auto pos = subset_positions(u.labels(), s.labels(), "apply");
  cvec out = apply_on_positions(u.entries(), pos, s.num_registers(), s.amplitudes());
  return StateVector(std::move(out), s.labels());
}

DensityMatrix apply(const Operator& u, const DensityMatrix& rho) {
  if (!u.is_unitary()) {
    throw std::invalid_argument("apply: operator is not unitary within tolerance");
  }
  const auto pos = subset_positions(u.labels(), rho.labels(), "apply");
  const int n = static_cast<int>(rho.labels().size());
  cmat out(rho.dim(), rho.dim());
  // U rho U†, one column / row sweep at a time.
  for (Eigen::Index j = 0; j < rho.dim(); ++j) {
    out.col(j) = apply_on_positions(u.entries(), pos, n, rho.entries().col(j));
  }
  for (Eigen::Index i = 0; i < rho.dim(); ++i) {
    cvec row = out.row(i).conjugate();
    out.row(i) = apply_on_positions(u.entries(), pos, n, row).conjugate();
  }
  return DensityMatrix(std::move(out), rho.labels());
}

DensityMatrix density_matrix(const StateVector& s) {
  return DensityMatrix(s.amplitudes() * s.amplitudes().adjoint(), s.labels());
}

DensityMatrix partial_trace(const DensityMatrix& rho, const Labels& discard) {
  const auto dpos = subset_positions(discard, rho.labels(), "partial_trace");
  const int n = static_cast<int>(rho.labels().size());
  std::vector<int> keep_pos;
  Labels keep_labels;
  for (int p = 0; p < n; ++p) {
    if (std::find(dpos.begin(), dpos.end(), p) == dpos.end()) {
      keep_pos.push_back(p);
      keep_labels.push_back(rho.labels()[static_cast<std::size_t>(p)]);
    }
  }
  const int k = static_cast<int>(keep_pos.size());
  const int m = n - k;
  const Eigen::Index keep_dim = Eigen::Index{1} << k;
  const Eigen::Index disc_dim = Eigen::Index{1} << m;

  auto compose = [&](Eigen::Index kept, Eigen::Index disc) {
    Eigen::Index idx = 0;
    for (int p = 0; p < k; ++p) {
      idx |= ((kept >> (k - 1 - p)) & 1) << (n - 1 - keep_pos[static_cast<std::size_t>(p)]);
    }
    for (int p = 0; p < m; ++p) {
      idx |= ((disc >> (m - 1 - p)) & 1) << (n - 1 - dpos[static_cast<std::size_t>(p)]);
    }
    return idx;
  };

  cmat out = cmat::Zero(keep_dim, keep_dim);
  for (Eigen::Index a = 0; a < keep_dim; ++a) {
    for (Eigen::Index b = 0; b < keep_dim; ++b) {
      complexd acc = 0.0;
      for (Eigen::Index d = 0; d < disc_dim; ++d) {
        acc += rho.entries()(compose(a, d), compose(b, d));
      }
      out(a, b) = acc;
    }
  }
  return DensityMatrix(std::move(out), keep_labels);
}

std::pair<double, StateVector> project_and_condition(const StateVector& s,
                                                     const std::string& register_label,
                                                     const StateVector& onto) {
  if (onto.num_registers() != 1) {
    throw std::invalid_argument("project_and_condition: projection target must be a single register");
  }
  const auto pos_v = subset_positions({register_label}, s.labels(), "project_and_condition");
  const int p = pos_v[0];
  const int n = s.num_registers();
  const Eigen::Index rest_dim = s.dim() / 2;

  Labels rest_labels;
  for (int q = 0; q < n; ++q) {
    if (q != p) rest_labels.push_back(s.labels()[static_cast<std::size_t>(q)]);
  }

  auto compose = [&](Eigen::Index bit, Eigen::Index rest) {
    Eigen::Index idx = 0;
    int rp = 0;
    for (int q = 0; q < n; ++q) {
      Eigen::Index b;
      if (q == p) {
        b = bit;
      } else {
        b = (rest >> (n - 2 - rp)) & 1;
        ++rp;
      }
      idx |= b << (n - 1 - q);
    }
    return idx;
  };

  cvec rest(rest_dim);
  for (Eigen::Index j = 0; j < rest_dim; ++j) {
    rest(j) = std::conj(onto.amplitudes()(0)) * s.amplitudes()(compose(0, j)) +
              std::conj(onto.amplitudes()(1)) * s.amplitudes()(compose(1, j));
  }
  const double probability = rest.squaredNorm();
  if (probability < kConditioningCutoff) {
    throw std::domain_error("project_and_condition: zero-probability branch");
  }
  rest /= std::sqrt(probability);
  return {probability, StateVector(std::move(rest), std::move(rest_labels))};
}

double entanglement_entropy(const StateVector& s, const Labels& cut) {
  Labels discard;
  for (const auto& l : s.labels()) {
    if (std::find(cut.begin(), cut.end(), l) == cut.end()) discard.push_back(l);
  }
  // Validates cut ⊆ labels as a side effect.
  subset_positions(cut, s.labels(), "entanglement_entropy");
  if (discard.empty() || cut.empty()) return 0.0;
  const DensityMatrix reduced = partial_trace(density_matrix(s), discard);
  Eigen::SelfAdjointEigenSolver<cmat> es(reduced.entries(), Eigen::EigenvaluesOnly);
  double entropy = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double p = es.eigenvalues()(i);
    if (p < 0.0) p = 0.0;  // clamp eigensolver noise
    if (p > 0.0) entropy -= p * std::log2(p);
  }
  return entropy;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.labels() != b.labels()) {
    throw std::invalid_argument("trace_distance: register labels differ");
  }
  Eigen::SelfAdjointEigenSolver<cmat> es(a.entries() - b.entries(), Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

complexd overlap(const StateVector& a, const StateVector& b) {
  const cvec bperm = permute_registers(b.amplitudes(), b.labels(), a.labels());
  return a.amplitudes().dot(bperm);  // Eigen's dot conjugates the left factor
}

double expectation(const DensityMatrix& rho, const cmat& observable) {
  if (observable.rows() != rho.dim()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  return (observable * rho.entries()).trace().real();
}

double expectation(const StateVector& s, const cmat& observable) {
  if (observable.rows() != s.dim()) {
    throw std::invalid_argument("expectation: dimension mismatch");
  }
  return s.amplitudes().dot(observable * s.amplitudes()).real();
}

// ---------------------------------------------------------------------------

cmat pauli_x() {
  cmat m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

cmat pauli_y() {
  cmat m(2, 2);
  m << complexd(0, 0), complexd(0, -1), complexd(0, 1), complexd(0, 0);
  return m;
}

cmat pauli_z() {
  cmat m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

cmat identity2() { return cmat::Identity(2, 2); }

StateVector basis_state(const std::string& label, int bit) {
  cvec v = cvec::Zero(2);
  v(bit ? 1 : 0) = 1.0;
  return StateVector(std::move(v), {label});
}

StateVector z_plus(const std::string& label) { return basis_state(label, 0); }
StateVector z_minus(const std::string& label) { return basis_state(label, 1); }

StateVector x_plus(const std::string& label) {
  cvec v(2);
  v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
  return StateVector(std::move(v), {label});
}

StateVector x_minus(const std::string& label) {
  cvec v(2);
  v << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
  return StateVector(std::move(v), {label});
}

StateVector y_plus(const std::string& label) {
  cvec v(2);
  v << complexd(1.0 / std::sqrt(2.0), 0), complexd(0, 1.0 / std::sqrt(2.0));
  return StateVector(std::move(v), {label});
}

StateVector y_minus(const std::string& label) {
  cvec v(2);
  v << complexd(1.0 / std::sqrt(2.0), 0), complexd(0, -1.0 / std::sqrt(2.0));
  return StateVector(std::move(v), {label});
}

}  // namespace tempord::qcore
