#include "florasim/node.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "florasim/error.hpp"
#include "florasim/stimulus.hpp"

namespace florasim {

const char* node_role_name(NodeRole role) {
  switch (role) {
    case NodeRole::idle: return "idle";
    case NodeRole::attractor: return "attractor";
    case NodeRole::repeller: return "repeller";
  }
  return "?";
}

std::vector<double> default_filter_weights(int size) {
  std::vector<double> w(static_cast<size_t>(std::max(size, 1)));
  double v = 1.0;
  double total = 0.0;
  for (double& x : w) {
    x = v;
    total += v;
    v *= 0.7;
  }
  for (double& x : w) x /= total;
  return w;
}

IrSample sense_ir(const NodeParams& params, double tip_distance_mm, double own_far_red_duty,
                  Rng& rng) {
  const double d_cm = tip_distance_mm / 10.0;
  IrSample s;
  if (std::isfinite(d_cm)) {
    // Compare on distance, not its square, so a tip sitting exactly on the
    // floor reads the same as one inside it.
    const double d2 = d_cm <= kMinSourceDistanceCm ? kMinSourceDistanceCm2 : d_cm * d_cm;
    s.value = params.ir_gain / d2;
  }
  if (params.noise_sigma > 0.0) s.value += rng.gaussian(params.noise_sigma);
  // Own far-red floods the IR sensor at point-blank range.
  s.valid = !(own_far_red_duty > 0.0 && d_cm <= kMinSourceDistanceCm);
  return s;
}

void push_sample(RoboticNode& node, const IrSample& sample, const NodeParams& params) {
  node.buffer.insert(node.buffer.begin(), sample);
  if (static_cast<int>(node.buffer.size()) > params.buffer_size)
    node.buffer.resize(static_cast<size_t>(params.buffer_size));
}

bool has_valid_sample(const RoboticNode& node) {
  for (const IrSample& s : node.buffer)
    if (s.valid) return true;
  return false;
}

double filtered_value(const RoboticNode& node, const NodeParams& params) {
  std::vector<double> weights =
      params.filter_weights.empty() ? default_filter_weights(params.buffer_size)
                                    : params.filter_weights;
  double acc = 0.0;
  double wsum = 0.0;
  for (size_t k = 0; k < node.buffer.size() && k < weights.size(); ++k) {
    if (!node.buffer[k].valid) continue;
    acc += weights[k] * node.buffer[k].value;
    wsum += weights[k];
  }
  if (wsum <= 0.0)
    raise(ErrorCode::NoValidSamples, "node " + std::to_string(node.id) + " has no valid samples");
  return acc / wsum;
}

bool detect(double filtered, const NodeParams& params) {
  const double d = params.detect_distance_cm;
  return filtered >= params.ir_gain / (d * d);
}

double neighbor_reading(double duty, double distance_mm) {
  const double d_cm = distance_mm / 10.0;
  return duty / std::max(d_cm * d_cm, 1.0);
}

LedState policy_step(NodeRole role, bool detected, double best_neighbor_blue,
                     const NodeParams& params) {
  LedState led;
  switch (role) {
    case NodeRole::idle:
      break;
    case NodeRole::repeller:
      led.far_red = detected ? 1.0 : 0.0;
      break;
    case NodeRole::attractor:
      if (detected || best_neighbor_blue > params.relay_threshold)
        led.blue = 1.0;
      else if (best_neighbor_blue > params.relay_threshold / 5.0)
        led.blue = 0.2;
      break;
  }
  return led;
}

}  // namespace florasim
