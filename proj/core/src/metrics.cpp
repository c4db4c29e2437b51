#include "qcawalk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "qcawalk/errors.hpp"

namespace qcaw {

namespace {

std::set<Outcome> label_union(const Distribution& p, const Distribution& q) {
  std::set<Outcome> labels;
  for (const auto& [o, v] : p.probabilities()) labels.insert(o);
  for (const auto& [o, v] : q.probabilities()) labels.insert(o);
  return labels;
}

void check_same_length(std::size_t a, std::size_t b) {
  if (a != b) throw DomainError("series lengths differ");
}

}  // namespace

double hellinger_fidelity(const Distribution& p, const Distribution& q) {
  double h2 = 0.0;
  for (const auto& o : label_union(p, q)) {
    const double d = std::sqrt(p.prob(o)) - std::sqrt(q.prob(o));
    h2 += d * d;
  }
  h2 = std::clamp(0.5 * h2, 0.0, 1.0);
  return (1.0 - h2) * (1.0 - h2);
}

double l1_distance(const Distribution& p, const Distribution& q) {
  double s = 0.0;
  for (const auto& o : label_union(p, q)) s += std::abs(p.prob(o) - q.prob(o));
  return s;
}

Peak success_probability(std::span<const Distribution> series, int marked) {
  if (series.empty()) throw DomainError("empty series");
  const auto label = Outcome::vertex(static_cast<std::uint64_t>(marked));
  Peak best{series[0].prob(label), 0};
  for (std::size_t t = 1; t < series.size(); ++t) {
    const double p = series[t].prob(label);
    if (p > best.probability) best = {p, static_cast<int>(t)};
  }
  return best;
}

int hitting_time(std::span<const Distribution> series, int marked) {
  return success_probability(series, marked).step;
}

double degraded_ratio(double noisy_peak, double ideal_peak) {
  if (!(ideal_peak > 0.0)) throw DomainError("ideal peak must be > 0");
  return noisy_peak / ideal_peak;
}

Selectivity selectivity(const Distribution& dist, int marked) {
  const auto label = Outcome::vertex(static_cast<std::uint64_t>(marked));
  double best_other = 0.0;
  for (const auto& [o, p] : dist.probabilities()) {
    if (o.kind == Outcome::Kind::vertex && o != label) best_other = std::max(best_other, p);
  }
  if (best_other <= 0.0) return {std::numeric_limits<double>::infinity(), true};
  return {std::log(dist.prob(label) / best_other), false};
}

MetricSeries hellinger_series(std::span<const Distribution> ideal,
                              std::span<const Distribution> noisy) {
  check_same_length(ideal.size(), noisy.size());
  MetricSeries s{"hellinger_fidelity", {}, {}, {}};
  for (std::size_t t = 0; t < ideal.size(); ++t) {
    s.values.push_back(hellinger_fidelity(ideal[t], noisy[t]));
  }
  return s;
}

MetricSeries l1_series(std::span<const Distribution> ideal, std::span<const Distribution> noisy) {
  check_same_length(ideal.size(), noisy.size());
  MetricSeries s{"l1_distance", {}, {}, {}};
  for (std::size_t t = 0; t < ideal.size(); ++t) s.values.push_back(l1_distance(ideal[t], noisy[t]));
  return s;
}

std::vector<double> moving_average(std::span<const double> values, int window) {
  if (window < 1) throw DomainError("window must be >= 1");
  std::vector<double> out(values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    sum += values[i];
    if (i >= static_cast<std::size_t>(window)) sum -= values[i - static_cast<std::size_t>(window)];
    const auto n = std::min<std::size_t>(i + 1, static_cast<std::size_t>(window));
    out[i] = sum / static_cast<double>(n);
  }
  return out;
}

bool non_increasing(std::span<const double> values, double tolerance) {
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[i - 1] + tolerance) return false;
  }
  return true;
}

LinearFit fit_linear(std::span<const double> x, std::span<const double> y) {
  check_same_length(x.size(), y.size());
  if (x.size() < 2) throw DomainError("linear fit needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw DomainError("linear fit needs distinct x values");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return f;
}

InverseFit fit_inverse(std::span<const double> x, std::span<const double> y) {
  check_same_length(x.size(), y.size());
  if (x.empty()) throw DomainError("inverse fit needs >= 1 point");
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) throw DomainError("inverse fit needs nonzero x");
    num += y[i] / x[i];
    den += 1.0 / (x[i] * x[i]);
  }
  InverseFit f;
  f.c = num / den;
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.c / x[i];
    f.residuals.push_back(r);
    ss += r * r;
  }
  f.rms_residual = std::sqrt(ss / static_cast<double>(x.size()));
  return f;
}

}  // namespace qcaw
