#include "geoloc/latency_model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>

#include <Eigen/Dense>

#include "geoloc/error.hpp"

namespace geoloc {

void validate(const Measurement& m) {
  const std::string who = "measurement " + m.landmark_id + " -> " + m.target_id;
  if (m.rtt_samples_ms.empty()) throw ValidationError(who + ": no RTT samples");
  for (double s : m.rtt_samples_ms) {
    if (!std::isfinite(s) || s < 0.0) throw ValidationError(who + ": invalid RTT sample");
  }
  if (m.hop_count < 0) throw ValidationError(who + ": negative hop count");
}

double min_rtt_ms(const Measurement& m) {
  validate(m);
  return *std::min_element(m.rtt_samples_ms.begin(), m.rtt_samples_ms.end());
}

EffectiveLatency effective_latency(const Measurement& m, double per_hop_ms) {
  const double raw = min_rtt_ms(m) / 2.0 - per_hop_ms * m.hop_count;
  if (raw < 0.0) return {0.0, true};
  return {raw, false};
}

double predict_distance_km(const LatencyModel& model, double latency_ms) {
  const double arg = model.q * latency_ms + model.n;
  if (!(arg > 0.0)) {
    std::ostringstream os;
    os << "latency " << latency_ms << " ms is outside the model domain (q*latency + n = " << arg << ")";
    throw DomainError(os.str());
  }
  // log1p keeps precision when the fitted curve is nearly linear (tiny q, huge p).
  const double d = model.p * std::log1p(model.q * latency_ms + (model.n - 1.0)) + model.m;
  return std::max(0.0, d);
}

double residual_sum_of_squares(const LatencyModel& model, std::span<const CalibrationSample> samples) {
  double rss = 0.0;
  for (const auto& s : samples) {
    const double r = s.distance_km - predict_distance_km(model, s.latency_ms);
    rss += r * r;
  }
  return rss;
}

namespace {

// The fit runs on the equivalent form  f(x) = a * log1p(k x) / k + b  with
// a = p q, k = q, b = m and n fixed at 1. Any increasing curve with n > 0 has
// such a representation. For fixed k the problem is linear in (a, b), so the
// search is one-dimensional over t = ln k; k -> 0 reaches the straight line
// a x + b and large k approaches the pure logarithm.
constexpr double kMinCurvature = 1e-12;
constexpr double kMaxCurvature = 1e6;
constexpr int kScanPoints = 400;
constexpr int kRefineIterations = 200;

struct Params {
  double a = 0.0, k = 0.0, b = 0.0;
  double rss = std::numeric_limits<double>::infinity();
};

double shape(double k, double x) { return std::log1p(k * x) / k; }

double rss_of(double a, double k, double b, std::span<const CalibrationSample> samples) {
  double rss = 0.0;
  for (const auto& s : samples) {
    const double r = s.distance_km - (a * shape(k, s.latency_ms) + b);
    rss += r * r;
  }
  return rss;
}

// Exact least squares for (a, b) at a fixed curvature.
Params solve_linear(double k, std::span<const CalibrationSample> samples) {
  Eigen::MatrixXd design(static_cast<Eigen::Index>(samples.size()), 2);
  Eigen::VectorXd y(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    design(row, 0) = shape(k, samples[i].latency_ms);
    design(row, 1) = 1.0;
    y(row) = samples[i].distance_km;
  }
  const Eigen::Vector2d ab = design.colPivHouseholderQr().solve(y);
  Params out{ab(0), k, ab(1)};
  out.rss = rss_of(out.a, out.k, out.b, samples);
  return out;
}

bool better(const Params& x, const Params& best) {
  return std::isfinite(x.rss) && x.a > 0.0 && (!(best.a > 0.0) || x.rss < best.rss);
}

}  // namespace

LatencyModel fit_model(std::span<const CalibrationSample> samples) {
  if (samples.size() < 4) {
    throw InsufficientData("insufficient samples: " + std::to_string(samples.size()) + " < 4");
  }
  std::set<double> distinct;
  for (const auto& s : samples) {
    if (!std::isfinite(s.latency_ms) || !std::isfinite(s.distance_km) || s.latency_ms < 0.0 ||
        s.distance_km < 0.0) {
      throw ValidationError("calibration samples must be finite and non-negative");
    }
    distinct.insert(s.latency_ms);
  }
  if (distinct.size() < 4) {
    throw InsufficientData("degenerate samples: only " + std::to_string(distinct.size()) +
                           " distinct latency value(s), need 4");
  }

  // Log-spaced scan over the curvature range; the customary starting
  // curvatures 0.1 and 1 are always among the evaluated points.
  const double t_lo = std::log(kMinCurvature);
  const double t_hi = std::log(kMaxCurvature);
  std::vector<double> ts;
  for (int i = 0; i < kScanPoints; ++i) ts.push_back(t_lo + (t_hi - t_lo) * i / (kScanPoints - 1));
  ts.push_back(std::log(0.1));
  ts.push_back(0.0);
  std::sort(ts.begin(), ts.end());

  std::vector<Params> scan;
  scan.reserve(ts.size());
  std::size_t best_i = ts.size();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    scan.push_back(solve_linear(std::exp(ts[i]), samples));
    if (better(scan[i], best_i == ts.size() ? Params{} : scan[best_i])) best_i = i;
  }
  if (best_i == ts.size()) throw FitError("fit produced no increasing distance curve");

  // Golden-section refinement inside the bracket around the best scan point.
  Params best = scan[best_i];
  double lo = ts[best_i == 0 ? 0 : best_i - 1];
  double hi = ts[std::min(best_i + 1, ts.size() - 1)];
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo);
  double x2 = lo + g * (hi - lo);
  Params f1 = solve_linear(std::exp(x1), samples);
  Params f2 = solve_linear(std::exp(x2), samples);
  for (int it = 0; it < kRefineIterations && hi - lo > 1e-12; ++it) {
    if (f1.rss < f2.rss) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = solve_linear(std::exp(x1), samples);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = solve_linear(std::exp(x2), samples);
    }
    if (better(f1, best)) best = f1;
    if (better(f2, best)) best = f2;
  }
  if (!std::isfinite(best.rss)) throw FitError("fit failed to converge");

  LatencyModel model;
  model.p = best.a / best.k;
  model.q = best.k;
  model.n = 1.0;
  model.m = best.b;
  model.sample_count = samples.size();
  model.fit_rss = residual_sum_of_squares(model, samples);
  return model;
}

namespace {

std::map<NodeId, std::vector<CalibrationSample>> calibration_samples(std::span<const NodeId> landmarks,
                                                                     std::span<const Measurement> measurements,
                                                                     const std::map<NodeId, GeoPoint>& positions,
                                                                     double per_hop_ms) {
  const std::set<NodeId> members(landmarks.begin(), landmarks.end());
  for (const auto& l : landmarks) {
    if (!positions.count(l)) throw ValidationError("no position for landmark \"" + l + "\"");
  }
  std::map<NodeId, std::vector<CalibrationSample>> samples;
  for (const auto& l : landmarks) samples[l];
  for (const auto& meas : measurements) {
    if (meas.landmark_id == meas.target_id) continue;
    if (!members.count(meas.landmark_id) || !members.count(meas.target_id)) continue;
    const double km =
        orthodromic_distance(positions.at(meas.landmark_id), positions.at(meas.target_id)) / 1000.0;
    samples[meas.landmark_id].push_back({effective_latency(meas, per_hop_ms).latency_ms, km});
  }
  return samples;
}

}  // namespace

std::map<NodeId, LatencyModel> calibrate_all(std::span<const NodeId> landmarks,
                                             std::span<const Measurement> measurements,
                                             const std::map<NodeId, GeoPoint>& positions,
                                             double per_hop_ms) {
  auto samples = calibration_samples(landmarks, measurements, positions, per_hop_ms);

  std::vector<NodeId> deficient;
  for (const auto& l : landmarks) {
    if (samples[l].size() < 4) deficient.push_back(l);
  }
  if (!deficient.empty()) {
    std::string msg = "insufficient calibration data (need 4 peers) for landmark(s):";
    for (const auto& l : deficient) msg += " \"" + l + "\" (" + std::to_string(samples[l].size()) + ")";
    throw InsufficientData(msg);
  }

  std::map<NodeId, LatencyModel> models;
  for (const auto& l : landmarks) {
    try {
      models.emplace(l, fit_model(samples[l]));
    } catch (const InsufficientData& e) {
      throw InsufficientData("landmark \"" + l + "\": " + e.what());
    } catch (const FitError& e) {
      throw FitError("landmark \"" + l + "\": " + e.what());
    }
  }
  return models;
}

CalibrationOutcome calibrate_each(std::span<const NodeId> landmarks, std::span<const Measurement> measurements,
                                  const std::map<NodeId, GeoPoint>& positions, double per_hop_ms) {
  auto samples = calibration_samples(landmarks, measurements, positions, per_hop_ms);
  CalibrationOutcome out;
  for (const auto& l : landmarks) {
    try {
      out.models.emplace(l, fit_model(samples[l]));
    } catch (const FitError& e) {
      out.failures.emplace(l, e.what());
    }
  }
  return out;
}

}  // namespace geoloc
