#include "tempord/spacetime.hpp"

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace tempord::spacetime {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kQuadratureRelTol = 1e-12;
constexpr std::uint64_t kQuadratureMaxIntervals = 1'000'000;
constexpr double kPostNewtonianPotentialGuard = 0.1;  // |Phi|/c^2 validity bound
constexpr double kCoincidenceRelTol = 1e-6;

void check_radius(const SpacetimeParams& p, double r_m) {
  if (!(r_m > 0.0) || !std::isfinite(r_m)) {
    throw std::domain_error("spacetime: radius must be positive and finite");
  }
  const double rs = p.schwarzschild_radius_m();
  if (p.metric_mode == MetricMode::exact_schwarzschild) {
    if (r_m <= rs) {
      std::ostringstream os;
      os << "spacetime: radius " << r_m << " m is inside the Schwarzschild radius " << rs << " m";
      throw std::domain_error(os.str());
    }
  } else {
    const double phi_over_c2 = 0.5 * rs / r_m;  // |Phi|/c^2
    if (phi_over_c2 >= kPostNewtonianPotentialGuard) {
      std::ostringstream os;
      os << "spacetime: |Phi|/c^2 = " << phi_over_c2 << " at r = " << r_m
         << " m exceeds the post-Newtonian validity guard " << kPostNewtonianPotentialGuard;
      throw std::domain_error(os.str());
    }
  }
}

// Adaptive Simpson with Richardson extrapolation and a hard interval cap.
class AdaptiveSimpson {
 public:
  AdaptiveSimpson(std::function<double(double)> f, double rel_tol, std::uint64_t max_intervals)
      : f_(std::move(f)), rel_tol_(rel_tol), max_intervals_(max_intervals) {}

  double integrate(double a, double b) {
    if (a == b) return 0.0;
    const double fa = f_(a);
    const double fb = f_(b);
    const double m = 0.5 * (a + b);
    const double fm = f_(m);
    const double whole = simpson(a, b, fa, fm, fb);
    const double abs_tol = rel_tol_ * std::abs(whole);
    return recurse(a, b, fa, fm, fb, whole, abs_tol, 64);
  }

 private:
  static double simpson(double a, double b, double fa, double fm, double fb) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  double recurse(double a, double b, double fa, double fm, double fb, double whole,
                 double tol, int depth) {
    if (++intervals_ > max_intervals_) {
      std::ostringstream os;
      os << "quadrature failed to converge after " << max_intervals_
         << " subintervals on [" << a << ", " << b << "]";
      throw std::runtime_error(os.str());
    }
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f_(lm);
    const double frm = f_(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
      return left + right + delta / 15.0;
    }
    return recurse(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           recurse(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }

  std::function<double(double)> f_;
  double rel_tol_;
  std::uint64_t max_intervals_;
  std::uint64_t intervals_ = 0;
};

}  // namespace

// ---------------------------------------------------------------------------

double SpacetimeParams::derived_schwarzschild_radius_m() const {
  return 2.0 * G * mass_kg / (c * c);
}

double SpacetimeParams::schwarzschild_radius_m() const {
  return schwarzschild_radius_override_m.value_or(derived_schwarzschild_radius_m());
}

void SpacetimeParams::validate() const {
  if (!(G > 0.0) || !(c > 0.0)) {
    throw std::domain_error("SpacetimeParams: G and c must be positive");
  }
  if (mass_kg < 0.0 || !std::isfinite(mass_kg)) {
    throw std::domain_error("SpacetimeParams: mass must be non-negative and finite");
  }
  if (schwarzschild_radius_override_m && !(*schwarzschild_radius_override_m > 0.0)) {
    throw std::domain_error("SpacetimeParams: Schwarzschild radius override must be positive");
  }
}

double MassConfiguration::radius_of(const std::string& agent_id) const {
  auto it = agent_radii_m.find(agent_id);
  if (it == agent_radii_m.end()) {
    throw std::invalid_argument("MassConfiguration: unknown agent '" + agent_id + "'");
  }
  return it->second;
}

void MassConfiguration::validate(const SpacetimeParams& p) const {
  const double rs = p.schwarzschild_radius_m();
  for (const auto& [agent, r] : agent_radii_m) {
    if (!(r > 0.0)) {
      throw std::domain_error("MassConfiguration: radius of '" + agent + "' must be positive");
    }
    if (p.metric_mode == MetricMode::exact_schwarzschild ? r <= rs : r <= 5.0 * rs) {
      throw std::domain_error("MassConfiguration: radius of '" + agent +
                              "' violates the metric-mode validity bound");
    }
  }
}

void EventSpec::validate() const {
  if (!(trigger_proper_time_s > 0.0) || !std::isfinite(trigger_proper_time_s)) {
    throw std::domain_error("EventSpec: trigger proper time must be positive and finite");
  }
}

// ---------------------------------------------------------------------------

MetricComponents metric_components(const SpacetimeParams& p, double r_m) {
  p.validate();
  check_radius(p, r_m);
  // With Phi = -GM/r both modes share g00 = -(1 - R_S/r) and grr = -1/g00;
  // they differ in validity region and in the light-time truncation below.
  const double factor = 1.0 - p.schwarzschild_radius_m() / r_m;
  return MetricComponents{-factor, 1.0 / factor};
}

double proper_time_rate(const SpacetimeParams& p, double r_m) {
  return std::sqrt(-metric_components(p, r_m).g00);
}

double light_coordinate_time(const SpacetimeParams& p, double r_from_m, double r_to_m) {
  p.validate();
  check_radius(p, r_from_m);
  check_radius(p, r_to_m);
  if (r_from_m == r_to_m) return 0.0;
  const double lo = std::min(r_from_m, r_to_m);
  const double hi = std::max(r_from_m, r_to_m);
  const double rs = p.schwarzschild_radius_m();
  const double c = p.c;

  std::function<double(double)> integrand;
  if (p.metric_mode == MetricMode::post_newtonian_1) {
    // First-order expansion of sqrt(-grr/g00)/c = 1/(c (1 + 2 Phi/c^2));
    // the quadratic correction is beyond this metric's accuracy.
    integrand = [rs, c](double r) { return (1.0 + rs / r) / c; };
  } else {
    integrand = [rs, c](double r) { return 1.0 / (c * (1.0 - rs / r)); };
  }
  AdaptiveSimpson quad(integrand, kQuadratureRelTol, kQuadratureMaxIntervals);
  return quad.integrate(lo, hi);
}

double arrival_local_time(const SpacetimeParams& p, double r_a_m, double r_b_m,
                          double tau_star_s) {
  const double rate_a = proper_time_rate(p, r_a_m);
  const double rate_b = proper_time_rate(p, r_b_m);
  const double t_c = light_coordinate_time(p, r_a_m, r_b_m);
  return rate_b * (tau_star_s / rate_a + t_c);
}

double tau_star_threshold(const SpacetimeParams& p, double r_a_m, double r_b_m) {
  if (!(r_a_m > r_b_m)) {
    throw std::domain_error("tau_star_threshold: emitter must be farther from the mass (r_a > r_b)");
  }
  const double rate_a = proper_time_rate(p, r_a_m);
  const double rate_b = proper_time_rate(p, r_b_m);
  const double t_c = light_coordinate_time(p, r_a_m, r_b_m);
  const double denominator = 1.0 - rate_b / rate_a;
  if (denominator <= 0.0) return kInf;  // no dilation, no order reversal
  return t_c * rate_b / denominator;
}

double tau_star_weak_field_bound(const SpacetimeParams& p, double r_a_m) {
  p.validate();
  if (!(r_a_m > 0.0)) throw std::domain_error("tau_star_weak_field_bound: radius must be positive");
  const double gm = p.gravitational_length_m() * p.c * p.c;  // respects the override
  if (gm <= 0.0) return kInf;
  return 2.0 * r_a_m * r_a_m * p.c / gm;
}

OrderOutcome classify_order(const SpacetimeParams& p, const MassConfiguration& config,
                            const EventSpec& event_a, const EventSpec& event_b) {
  p.validate();
  config.validate(p);
  event_a.validate();
  event_b.validate();
  const double r_a = config.radius_of(event_a.agent_id);
  const double r_b = config.radius_of(event_b.agent_id);
  const double t_a = event_a.trigger_proper_time_s / proper_time_rate(p, r_a);
  const double t_b = event_b.trigger_proper_time_s / proper_time_rate(p, r_b);
  const double t_c = light_coordinate_time(p, r_a, r_b);

  const double margin_ab = t_b - (t_a + t_c);  // light from A reaches b before B
  const double margin_ba = t_a - (t_b + t_c);
  if (margin_ab >= 0.0 && margin_ab > margin_ba) {
    return OrderOutcome{CausalRelation::A_before_B, margin_ab};
  }
  if (margin_ba >= 0.0 && margin_ba > margin_ab) {
    return OrderOutcome{CausalRelation::B_before_A, margin_ba};
  }
  return OrderOutcome{CausalRelation::spacelike, std::max(margin_ab, margin_ba)};
}

NearHorizonRatio near_horizon_rate_ratio(const SpacetimeParams& p, double epsilon_m,
                                         double l_m) {
  p.validate();
  if (p.metric_mode != MetricMode::exact_schwarzschild) {
    throw std::domain_error("near_horizon_rate_ratio: requires the exact Schwarzschild mode");
  }
  if (!(epsilon_m > 0.0)) {
    throw std::domain_error("near_horizon_rate_ratio: epsilon must be positive");
  }
  if (!(l_m > 0.0)) {
    throw std::domain_error("near_horizon_rate_ratio: l must be positive");
  }
  const double rs = p.schwarzschild_radius_m();
  if (!(rs > 0.0)) {
    throw std::domain_error("near_horizon_rate_ratio: requires a non-zero mass");
  }
  // 1 + 2 Phi(R_S + l)/c^2 with Phi = -GM/r.
  const double potential_factor = l_m / (rs + l_m);
  NearHorizonRatio out;
  out.approximate = std::sqrt(rs / epsilon_m * potential_factor);
  out.exact = proper_time_rate(p, rs + l_m) / proper_time_rate(p, rs + epsilon_m);
  return out;
}

std::vector<PhotonArrival> photon_schedule(const SpacetimeParams& p,
                                           const MassConfiguration& config,
                                           const std::string& agent_a,
                                           const std::string& agent_b,
                                           double emission_coordinate_time_s,
                                           double trigger_proper_time_s) {
  p.validate();
  config.validate(p);
  const double r_a = config.radius_of(agent_a);
  const double r_b = config.radius_of(agent_b);
  const double leg = light_coordinate_time(p, r_a, r_b);

  std::vector<PhotonArrival> schedule;
  schedule.reserve(4);
  for (int k = 0; k < 4; ++k) {
    const bool at_a = (k % 2 == 0);
    PhotonArrival arrival;
    arrival.agent_id = at_a ? agent_a : agent_b;
    arrival.bounce_index = k;
    arrival.coordinate_time_s = emission_coordinate_time_s + k * leg;
    arrival.local_time_s = arrival.coordinate_time_s * proper_time_rate(p, at_a ? r_a : r_b);
    arrival.coincides_with_trigger =
        std::abs(arrival.local_time_s - trigger_proper_time_s) <=
        kCoincidenceRelTol * std::max(std::abs(trigger_proper_time_s), std::abs(arrival.local_time_s));
    schedule.push_back(std::move(arrival));
  }
  return schedule;
}

ProtocolTimes appendix_c_times(const SpacetimeParams& p, double r_m, double l_separation_m,
                               double h_m) {
  p.validate();
  if (!(r_m > 0.0) || !(l_separation_m > 0.0) || !(h_m > 0.0)) {
    throw std::domain_error("appendix_c_times: all lengths must be positive");
  }
  const double r = r_m;
  const double L = l_separation_m;
  const double h = h_m;
  check_radius(p, r);

  const auto g00_at = [&](double radius) { return metric_components(p, radius).g00; };
  const double g_r = g00_at(r);
  const double g_rh = g00_at(r + h);
  const double g_rl = g00_at(r + L);
  const double g_rlh = g00_at(r + L + h);

  const double tc_near = light_coordinate_time(p, r, r + h);
  const double tc_far = light_coordinate_time(p, r + L, r + L + h);

  const double numerator = tc_near + tc_far * std::sqrt(g_rlh / g_rh);
  const double denominator = 1.0 - std::sqrt(g_r * g_rlh / (g_rh * g_rl));

  ProtocolTimes times;
  if (denominator <= 0.0) {
    times.tau_a_s = kInf;
    times.tau_b_s = kInf;
    times.t_a_s = kInf;
    times.t_p_s = kInf;
  } else {
    times.tau_a_s = std::sqrt(-g_r) * numerator / denominator;
    times.t_a_s = times.tau_a_s / std::sqrt(-g_r);
    times.tau_b_s = std::sqrt(-g_rlh) * (times.tau_a_s / std::sqrt(-g_rl) + tc_far);
    times.t_p_s = 2.0 * times.t_a_s + 2.0 * L / p.c;
  }
  times.t_o_s = 2.0 * light_coordinate_time(p, r + 0.5 * L, r + 0.5 * L + h);
  return times;
}

bool ProtocolTimes::attainable() const { return std::isfinite(tau_a_s); }

double diosi_penrose_time(double delta_m, double mass_kg, double l_m, double hbar) {
  if (!(delta_m > 0.0) || !(mass_kg > 0.0) || !(l_m > 0.0) || !(hbar > 0.0)) {
    throw std::domain_error("diosi_penrose_time: all arguments must be positive");
  }
  const double ml = mass_kg * l_m;
  return 2.0 * delta_m * delta_m * delta_m * hbar / (PhysicalConstants{}.G * ml * ml);
}

}  // namespace tempord::spacetime
