#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "geoloc/geodesy.hpp"
#include "geoloc/topology.hpp"

namespace geoloc {

/// Default processing delay attributed to each traversed hop, in ms.
inline constexpr double kDefaultPerHopMs = 0.1;

/// Repeated RTT probes from a landmark to a target. Only the smallest sample
/// is used downstream.
struct Measurement {
  NodeId landmark_id;
  NodeId target_id;
  std::vector<double> rtt_samples_ms;
  int hop_count = 0;
};

/// Throws ValidationError when there are no samples, a sample is negative or
/// not finite, or the hop count is negative.
void validate(const Measurement& m);

double min_rtt_ms(const Measurement& m);

struct EffectiveLatency {
  double latency_ms = 0.0;
  bool degraded = false;  // raw value was negative and got clamped to 0
};

/// min(RTT)/2 - per_hop_ms * hops, clamped below at zero.
EffectiveLatency effective_latency(const Measurement& m, double per_hop_ms = kDefaultPerHopMs);

/// distance_km = p * ln(q * latency_ms + n) + m
struct LatencyModel {
  double p = 0.0;  // km
  double q = 0.0;  // 1/ms
  double n = 0.0;
  double m = 0.0;  // km
  double fit_rss = 0.0;  // km^2
  std::size_t sample_count = 0;
};

/// Predicted distance in km, clamped below at 0. Throws DomainError naming the
/// latency when q * latency + n <= 0.
double predict_distance_km(const LatencyModel& model, double latency_ms);

struct CalibrationSample {
  double latency_ms = 0.0;
  double distance_km = 0.0;
};

/// Sum of squared distance residuals of a model over samples.
double residual_sum_of_squares(const LatencyModel& model, std::span<const CalibrationSample> samples);

/// Least-squares fit of the logarithmic latency/distance curve.
///
/// The curve is fitted as a * ln(1 + k x) / k + b (n = 1). For a fixed k the
/// best (a, b) is an ordinary linear least-squares problem, so k is searched
/// over [1e-12, 1e6] by a log-spaced scan refined by golden section. The
/// linear fit is the k -> 0 end of the range. Throws InsufficientData for
/// fewer than four samples or fewer than four distinct latencies, FitError
/// when no increasing curve exists.
LatencyModel fit_model(std::span<const CalibrationSample> samples);

/// Fits one model per landmark from its measurements to the other landmarks.
/// Directed measurements are separate samples. Throws InsufficientData
/// naming every landmark with fewer than four usable peers.
std::map<NodeId, LatencyModel> calibrate_all(std::span<const NodeId> landmarks,
                                             std::span<const Measurement> measurements,
                                             const std::map<NodeId, GeoPoint>& positions,
                                             double per_hop_ms = kDefaultPerHopMs);

struct CalibrationOutcome {
  std::map<NodeId, LatencyModel> models;
  std::map<NodeId, std::string> failures;  // landmark -> reason it has no model
};

/// Like calibrate_all, but a landmark whose fit fails is reported in
/// failures instead of aborting the whole calibration.
CalibrationOutcome calibrate_each(std::span<const NodeId> landmarks, std::span<const Measurement> measurements,
                                  const std::map<NodeId, GeoPoint>& positions,
                                  double per_hop_ms = kDefaultPerHopMs);

}  // namespace geoloc
