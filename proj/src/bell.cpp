#include "tempord/bell.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tempord/rng.hpp"

namespace tempord::bell {

namespace {

using qcore::complexd;
using qcore::cvec;

constexpr double kSpectrumTol = 1e-9;
constexpr double kDistributionTol = 1e-12;

void check_dichotomic(const cmat& m, const char* what) {
  if (m.rows() != 2 || m.cols() != 2) {
    throw std::invalid_argument(std::string(what) + ": observable must be 2x2");
  }
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > qcore::kStructuralTol) {
    throw std::invalid_argument(std::string(what) + ": observable is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<cmat> es(m, Eigen::EigenvaluesOnly);
  for (Eigen::Index i = 0; i < 2; ++i) {
    if (std::abs(std::abs(es.eigenvalues()(i)) - 1.0) > kSpectrumTol) {
      throw std::invalid_argument(std::string(what) + ": observable spectrum is not {+1, -1}");
    }
  }
}

cmat bloch_observable(const Eigen::Vector3d& n) {
  return n(0) * qcore::pauli_x() + n(1) * qcore::pauli_y() + n(2) * qcore::pauli_z();
}

void check_distribution(const double* p, int n, const char* what) {
  double total = 0.0;
  for (int i = 0; i < n; ++i) {
    if (p[i] < -kDistributionTol || p[i] > 1.0 + kDistributionTol) {
      throw std::invalid_argument(std::string(what) + ": probability out of range");
    }
    total += p[i];
  }
  if (std::abs(total - 1.0) > kDistributionTol * n) {
    std::ostringstream os;
    os << what << ": distribution sums to " << total;
    throw std::invalid_argument(os.str());
  }
}

void check_bernoulli(double p, const char* what) {
  if (p < -kDistributionTol || p > 1.0 + kDistributionTol) {
    throw std::invalid_argument(std::string(what) + ": probability out of range");
  }
}

}  // namespace

// ---------------------------------------------------------------------------

void MeasurementSettings::validate() const {
  check_dichotomic(observables[0][0], "settings C1^0");
  check_dichotomic(observables[0][1], "settings C1^1");
  check_dichotomic(observables[1][0], "settings C2^0");
  check_dichotomic(observables[1][1], "settings C2^1");
}

double chsh_value(const DensityMatrix& state, const MeasurementSettings& settings) {
  settings.validate();
  if (state.dim() != 4) {
    throw std::invalid_argument("chsh_value: state must cover exactly two qubits");
  }
  auto correlator = [&](int i1, int i2) {
    return qcore::expectation(state,
                              qcore::kron(settings.observables[0][i1], settings.observables[1][i2]));
  };
  return correlator(0, 0) + correlator(0, 1) + correlator(1, 0) - correlator(1, 1);
}

double chsh_value(const StateVector& state, const MeasurementSettings& settings) {
  return chsh_value(qcore::density_matrix(state), settings);
}

ProtocolBundle appendix_b_protocol() {
  const double s = 1.0 / std::sqrt(2.0);
  ProtocolBundle bundle{qcore::z_plus("S1"),
                        qcore::z_plus("S2"),
                        (qcore::identity2() + complexd(0.0, 1.0) * qcore::pauli_x()) * s,
                        qcore::pauli_z(),
                        MeasurementSettings{},
                        qcore::x_plus("M"),
                        qcore::x_minus("M")};
  bundle.settings.observables[0][0] = (qcore::pauli_y() - qcore::pauli_z()) * s;
  bundle.settings.observables[0][1] = (qcore::pauli_y() + qcore::pauli_z()) * s;
  bundle.settings.observables[1][0] = qcore::pauli_y();
  bundle.settings.observables[1][1] = qcore::pauli_z();
  return bundle;
}

OptimalChsh optimal_chsh(const DensityMatrix& state) {
  if (state.dim() != 4) {
    throw std::invalid_argument("optimal_chsh: state must cover exactly two qubits");
  }
  const std::array<cmat, 3> paulis{qcore::pauli_x(), qcore::pauli_y(), qcore::pauli_z()};
  Eigen::Matrix3d t;
  for (int m = 0; m < 3; ++m) {
    for (int n = 0; n < 3; ++n) {
      t(m, n) = qcore::expectation(state, qcore::kron(paulis[m], paulis[n]));
    }
  }

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(t.transpose() * t);
  const double s1_sq = std::max(es.eigenvalues()(2), 0.0);
  const double s2_sq = std::max(es.eigenvalues()(1), 0.0);
  const Eigen::Vector3d v1 = es.eigenvectors().col(2);
  const Eigen::Vector3d v2 = es.eigenvectors().col(1);
  const double s1 = std::sqrt(s1_sq);
  const double s2 = std::sqrt(s2_sq);

  auto image_direction = [&](const Eigen::Vector3d& v, const Eigen::Vector3d& fallback) {
    const Eigen::Vector3d image = t * v;
    return image.norm() > 1e-12 ? Eigen::Vector3d(image.normalized()) : fallback;
  };
  const Eigen::Vector3d a0 = image_direction(v1, Eigen::Vector3d::UnitX());
  Eigen::Vector3d a1 = image_direction(v2, Eigen::Vector3d::UnitY());
  if (std::abs(a0.dot(a1)) > 1.0 - 1e-9) {
    a1 = a0.unitOrthogonal();  // degenerate image, any orthogonal direction works
  }
  const double phi = std::atan2(s2, s1);
  const Eigen::Vector3d b0 = std::cos(phi) * v1 + std::sin(phi) * v2;
  const Eigen::Vector3d b1 = std::cos(phi) * v1 - std::sin(phi) * v2;

  OptimalChsh result;
  result.value = 2.0 * std::sqrt(s1_sq + s2_sq);
  result.settings.observables[0][0] = bloch_observable(a0);
  result.settings.observables[0][1] = bloch_observable(a1);
  result.settings.observables[1][0] = bloch_observable(b0);
  result.settings.observables[1][1] = bloch_observable(b1);
  return result;
}

OptimalChsh optimal_chsh(const StateVector& state) {
  return optimal_chsh(qcore::density_matrix(state));
}

// ---------------------------------------------------------------------------

void HiddenOrderModel::validate() const {
  if (n_lambda < 1 || n_f < 1) {
    throw std::invalid_argument("HiddenOrderModel: supports must be non-empty");
  }
  const std::size_t nlf = static_cast<std::size_t>(n_lambda) * static_cast<std::size_t>(n_f);
  if (p_lambda_f.size() != nlf) {
    throw std::invalid_argument("HiddenOrderModel: P(lambda, f) has the wrong size");
  }
  check_distribution(p_lambda_f.data(), static_cast<int>(nlf), "HiddenOrderModel P(lambda,f)");

  for (int wing = 0; wing < 2; ++wing) {
    if (response[wing].size() != 2 * static_cast<std::size_t>(n_f) * 2) {
      throw std::invalid_argument("HiddenOrderModel: response table has the wrong size");
    }
    for (double p : response[wing]) check_bernoulli(p, "HiddenOrderModel response");
    if (uses_joint_order_rule()) continue;
    if (order_rule[wing].size() != static_cast<std::size_t>(n_lambda) * 2) {
      throw std::invalid_argument("HiddenOrderModel: order rule has the wrong size");
    }
    for (int l = 0; l < n_lambda; ++l) {
      check_distribution(order_rule[wing].data() + 2 * l, 2, "HiddenOrderModel P(sigma|lambda)");
    }
  }
  if (uses_joint_order_rule()) {
    if (joint_order_rule.size() != static_cast<std::size_t>(n_lambda) * 4) {
      throw std::invalid_argument("HiddenOrderModel: joint order rule has the wrong size");
    }
    for (int l = 0; l < n_lambda; ++l) {
      check_distribution(joint_order_rule.data() + 4 * l, 4,
                         "HiddenOrderModel P(sigma1,sigma2|lambda)");
    }
  }
  if (p_z.size() != nlf * 4) {
    throw std::invalid_argument("HiddenOrderModel: P(z|...) has the wrong size");
  }
  for (double p : p_z) check_bernoulli(p, "HiddenOrderModel P(z|...)");
}

JointOutcomeTable classical_joint_probability(const HiddenOrderModel& model, int i1, int i2) {
  model.validate();
  if ((i1 != 0 && i1 != 1) || (i2 != 0 && i2 != 1)) {
    throw std::invalid_argument("classical_joint_probability: settings must be 0 or 1");
  }
  JointOutcomeTable table{};
  const int n_f = model.n_f;
  for (int l = 0; l < model.n_lambda; ++l) {
    for (int f = 0; f < n_f; ++f) {
      const double p_lf = model.p_lambda_f[static_cast<std::size_t>(l * n_f + f)];
      if (p_lf == 0.0) continue;
      for (int s1 = 0; s1 < 2; ++s1) {
        for (int s2 = 0; s2 < 2; ++s2) {
          // Free choice: the hidden-variable weight never depends on (i1, i2).
          double w;
          if (model.uses_joint_order_rule()) {
            w = p_lf * model.joint_order_rule[static_cast<std::size_t>(4 * l + 2 * s1 + s2)];
          } else {
            w = p_lf * model.order_rule[0][static_cast<std::size_t>(2 * l + s1)] *
                model.order_rule[1][static_cast<std::size_t>(2 * l + s2)];
          }
          if (w == 0.0) continue;
          const double r1 = model.response[0][static_cast<std::size_t>((i1 * n_f + f) * 2 + s1)];
          const double r2 = model.response[1][static_cast<std::size_t>((i2 * n_f + f) * 2 + s2)];
          const double zp = model.p_z[static_cast<std::size_t>(((l * n_f + f) * 2 + s1) * 2 + s2)];
          const double o1p[2] = {r1, 1.0 - r1};
          const double o2p[2] = {r2, 1.0 - r2};
          const double zpr[2] = {zp, 1.0 - zp};
          for (int o1 = 0; o1 < 2; ++o1) {
            for (int o2 = 0; o2 < 2; ++o2) {
              for (int z = 0; z < 2; ++z) {
                table[o1][o2][z] += w * o1p[o1] * o2p[o2] * zpr[z];
              }
            }
          }
        }
      }
    }
  }
  return table;
}

ConditionedTable condition_on_outcome_z(const JointOutcomeTable& table, int z_index) {
  if (z_index != 0 && z_index != 1) {
    throw std::invalid_argument("condition_on_outcome_z: z index must be 0 or 1");
  }
  ConditionedTable out;
  for (int o1 = 0; o1 < 2; ++o1) {
    for (int o2 = 0; o2 < 2; ++o2) {
      out.p_z += table[o1][o2][z_index];
    }
  }
  if (out.p_z <= 0.0) {
    throw std::domain_error("condition_on_outcome_z: conditioning on a zero-probability outcome");
  }
  for (int o1 = 0; o1 < 2; ++o1) {
    for (int o2 = 0; o2 < 2; ++o2) {
      out.p[o1][o2] = table[o1][o2][z_index] / out.p_z;
    }
  }
  return out;
}

double conditioned_chsh(const HiddenOrderModel& model, int z_index) {
  auto correlator = [&](int i1, int i2) {
    const auto table = classical_joint_probability(model, i1, i2);
    const auto conditioned = condition_on_outcome_z(table, z_index);
    return conditioned.p[0][0] - conditioned.p[0][1] - conditioned.p[1][0] + conditioned.p[1][1];
  };
  return correlator(0, 0) + correlator(0, 1) + correlator(1, 0) - correlator(1, 1);
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> dirichlet_flat(rng::Stream& rng, int n) {
  std::vector<double> out(static_cast<std::size_t>(n));
  double total = 0.0;
  for (auto& x : out) {
    x = -std::log(1.0 - rng.uniform() + 1e-300);
    total += x;
  }
  for (auto& x : out) x /= total;
  return out;
}

}  // namespace

HiddenOrderModel sample_hidden_order_model(std::uint64_t seed, std::uint64_t index,
                                           const SweepOptions& options) {
  rng::Stream rng(seed, index);
  HiddenOrderModel model;
  model.n_lambda = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(options.max_lambda)));
  model.n_f = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(options.max_f)));
  model.p_lambda_f = dirichlet_flat(rng, model.n_lambda * model.n_f);

  for (int wing = 0; wing < 2; ++wing) {
    const bool extremal = rng.uniform() < options.extremal_fraction;
    model.response[wing].resize(static_cast<std::size_t>(2 * model.n_f * 2));
    for (auto& p : model.response[wing]) {
      p = extremal ? (rng.uniform() < 0.5 ? 0.0 : 1.0) : rng.uniform();
    }
  }

  if (options.joint_order_rule) {
    model.joint_order_rule.reserve(static_cast<std::size_t>(4 * model.n_lambda));
    for (int l = 0; l < model.n_lambda; ++l) {
      const auto row = dirichlet_flat(rng, 4);
      model.joint_order_rule.insert(model.joint_order_rule.end(), row.begin(), row.end());
    }
  } else {
    for (int wing = 0; wing < 2; ++wing) {
      model.order_rule[wing].resize(static_cast<std::size_t>(2 * model.n_lambda));
      for (int l = 0; l < model.n_lambda; ++l) {
        const double p = rng.uniform();
        model.order_rule[wing][static_cast<std::size_t>(2 * l)] = p;
        model.order_rule[wing][static_cast<std::size_t>(2 * l + 1)] = 1.0 - p;
      }
    }
  }

  model.p_z.resize(static_cast<std::size_t>(model.n_lambda * model.n_f * 4));
  for (auto& p : model.p_z) p = rng.uniform();
  return model;
}

SweepResult classical_chsh_sweep(std::uint64_t n_models, std::uint64_t seed,
                                 const SweepOptions& options, int threads) {
  if (n_models < 1) {
    throw std::invalid_argument("classical_chsh_sweep: need at least one model");
  }
  threads = std::max(1, threads);

  struct Candidate {
    double value = -1.0;
    std::uint64_t index = 0;
    int z_index = 0;
  };

  auto evaluate_range = [&](std::uint64_t begin, std::uint64_t end) {
    Candidate best;
    for (std::uint64_t i = begin; i < end; ++i) {
      const HiddenOrderModel model = sample_hidden_order_model(seed, i, options);
      for (int z = 0; z < 2; ++z) {
        double value;
        try {
          value = std::abs(conditioned_chsh(model, z));
        } catch (const std::domain_error&) {
          continue;  // this z never occurs
        }
        if (value > best.value || (value == best.value && i < best.index)) {
          best = Candidate{value, i, z};
        }
      }
    }
    return best;
  };

  std::vector<Candidate> partial(static_cast<std::size_t>(threads));
  if (threads == 1) {
    partial[0] = evaluate_range(0, n_models);
  } else {
    std::vector<std::thread> pool;
    const std::uint64_t chunk = (n_models + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      const std::uint64_t begin = chunk * static_cast<std::uint64_t>(t);
      const std::uint64_t end = std::min(n_models, begin + chunk);
      pool.emplace_back([&partial, t, begin, end, &evaluate_range] {
        partial[static_cast<std::size_t>(t)] = evaluate_range(begin, end);
      });
    }
    for (auto& th : pool) th.join();
  }

  Candidate best;
  for (const auto& c : partial) {
    if (c.value > best.value || (c.value == best.value && c.index < best.index)) best = c;
  }

  SweepResult result;
  result.max_abs_chsh = best.value;
  result.worst_index = best.index;
  result.worst_z_index = best.z_index;
  result.worst_model = sample_hidden_order_model(seed, best.index, options);
  return result;
}

}  // namespace tempord::bell
