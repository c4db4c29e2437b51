#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qcawalk/state.hpp"

namespace qcaw {

/// F = (1 - H^2)^2, H^2 = 1/2 sum (sqrt p - sqrt q)^2. Missing labels count as 0.
double hellinger_fidelity(const Distribution& p, const Distribution& q);
/// sum |p_i - q_i|
double l1_distance(const Distribution& p, const Distribution& q);

struct Peak {
  double probability = 0.0;
  int step = 0;
};

/// Largest P(marked) over the series; the first step attaining it.
Peak success_probability(std::span<const Distribution> series, int marked);
int hitting_time(std::span<const Distribution> series, int marked);

/// noisy / ideal; DomainError when ideal_peak <= 0.
double degraded_ratio(double noisy_peak, double ideal_peak);

struct Selectivity {
  double value = 0.0;
  bool infinite = false;  // no probability on any non-marked vertex
};

/// ln(P(marked) / max over other vertices); leakage is ignored.
Selectivity selectivity(const Distribution& dist, int marked);

struct MetricSeries {
  std::string metric;
  std::string reference;  // id of the ideal run, if any
  std::string subject;    // id of the run being scored
  std::vector<double> values;
};

MetricSeries hellinger_series(std::span<const Distribution> ideal,
                              std::span<const Distribution> noisy);
MetricSeries l1_series(std::span<const Distribution> ideal, std::span<const Distribution> noisy);

/// Trailing-window mean; the first window-1 entries average what is available.
std::vector<double> moving_average(std::span<const double> values, int window);
/// True when every value is <= its predecessor + tolerance.
bool non_increasing(std::span<const double> values, double tolerance = 0.0);

struct LinearFit {
  double intercept = 0.0;
  double slope = 0.0;
  double r_squared = 0.0;
};

/// Least squares y = intercept + slope x.
LinearFit fit_linear(std::span<const double> x, std::span<const double> y);

struct InverseFit {
  double c = 0.0;  // y ~ c / x
  std::vector<double> residuals;
  double rms_residual = 0.0;
};

/// Least squares y = c / x.
InverseFit fit_inverse(std::span<const double> x, std::span<const double> y);

}  // namespace qcaw
