#include <cmath>
#include <numbers>

#include "qcawalk/errors.hpp"
#include "qcawalk/noise.hpp"

namespace qcaw {

std::map<std::string, double> reference_gate_fidelities() {
  return {{"sqrt_iswap", 0.9991}, {"iswap", 0.9987}, {"rx", 0.9999}, {"ry", 0.9999}, {"rz", 1.0}};
}

double native_gate_fidelity(const std::string& gate, const NoiseModel& noise) {
  const auto timing = noise.timing();
  GateSpec spec;
  if (gate == "sqrt_iswap") {
    spec = make_xy(0, 1, std::numbers::pi / 4, timing);
  } else if (gate == "iswap") {
    spec = make_xy(0, 1, std::numbers::pi / 2, timing);
  } else if (gate == "rx") {
    spec = make_rotation(PauliAxis::x, 0, std::numbers::pi / 2, timing);
  } else if (gate == "ry") {
    spec = make_rotation(PauliAxis::y, 0, std::numbers::pi / 2, timing);
  } else if (gate == "rz") {
    spec = make_rotation(PauliAxis::z, 0, std::numbers::pi / 2, timing);
  } else {
    throw DomainError("unknown native gate: " + gate);
  }
  return average_gate_fidelity(noisy_gate_channel(spec, noise));
}

CalibrationResult calibrate_rates(const std::map<std::string, double>& targets,
                                  const NoiseModel& templ, double tolerance) {
  templ.validate();
  if (!(tolerance > 0.0)) throw DomainError("tolerance must be > 0");
  if (!targets.contains("sqrt_iswap") && !targets.contains("iswap")) {
    throw DomainError("calibration needs a sqrt_iswap or iswap fidelity target");
  }
  for (const auto& [name, f] : targets) {
    if (!(f > 0.0 && f <= 1.0)) throw DomainError("target fidelity for " + name + " not in (0, 1]");
    native_gate_fidelity(name, templ);  // rejects unknown names
  }

  // Direction normalised so that s = K + 2 delta.
  double a = templ.relaxation_rate;
  double b = templ.dephasing_rate;
  if (a == 0.0 && b == 0.0) a = b = 1.0;
  const double norm = a + 2.0 * b;
  a /= norm;
  b /= norm;

  auto model_at = [&](double s) {
    NoiseModel m = templ;
    m.relaxation_rate = s * a;
    m.dephasing_rate = s * b;
    return m;
  };
  auto cost = [&](double s) {
    const NoiseModel m = model_at(s);
    double c = 0.0;
    for (const auto& [name, f] : targets) {
      const double r = native_gate_fidelity(name, m) - f;
      c += r * r;
    }
    return c;
  };

  // Coarse log scan, then golden section around the best grid point.
  double best_s = 0.0;
  double best_c = cost(0.0);
  std::vector<double> grid{0.0};
  for (int k = 0; k <= 90; ++k) grid.push_back(std::pow(10.0, k / 10.0));
  std::size_t best_k = 0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    const double c = cost(grid[k]);
    if (c < best_c) {
      best_c = c;
      best_s = grid[k];
      best_k = k;
    }
  }
  double lo = best_k == 0 ? 0.0 : grid[best_k - 1];
  double hi = best_k + 1 < grid.size() ? grid[best_k + 1] : grid[best_k];
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - phi * (hi - lo);
  double x2 = lo + phi * (hi - lo);
  double c1 = cost(x1);
  double c2 = cost(x2);
  for (int it = 0; it < 100 && hi - lo > 1e-9 * std::max(1.0, hi); ++it) {
    if (c1 < c2) {
      hi = x2;
      x2 = x1;
      c2 = c1;
      x1 = hi - phi * (hi - lo);
      c1 = cost(x1);
    } else {
      lo = x1;
      x1 = x2;
      c1 = c2;
      x2 = lo + phi * (hi - lo);
      c2 = cost(x2);
    }
  }
  const double mid = 0.5 * (lo + hi);
  if (const double c = cost(mid); c < best_c) {
    best_c = c;
    best_s = mid;
  }

  CalibrationResult res;
  res.model = model_at(best_s);
  res.target = targets;
  for (const auto& [name, f] : targets) {
    const double got = native_gate_fidelity(name, res.model);
    res.achieved[name] = got;
    res.residual[name] = got - f;
    res.max_abs_residual = std::max(res.max_abs_residual, std::abs(got - f));
  }
  res.within_tolerance = res.max_abs_residual <= tolerance;
  return res;
}

}  // namespace qcaw
