#pragma once

#include <vector>

#include "florasim/rng.hpp"
#include "florasim/vec3.hpp"

namespace florasim {

enum class NodeRole { idle, attractor, repeller };

const char* node_role_name(NodeRole role);

struct NodeParams {
  double ir_gain = 4.0;            // proximity amplitude A
  double noise_sigma = 0.02;       // additive gaussian on each raw sample
  int buffer_size = 8;
  std::vector<double> filter_weights;  // newest first; empty = default decay
  double detect_distance_cm = 5.0;     // detection threshold is A / d^2
  double relay_threshold = 0.05;       // neighbour blue reading for full relay
};

// Geometric 0.7 decay over `size` taps, normalised to sum 1.
std::vector<double> default_filter_weights(int size);

struct IrSample {
  double value = 0.0;
  bool valid = true;
};

struct LedState {
  double blue = 0.0;     // duty 0..1
  double far_red = 0.0;
};

struct RoboticNode {
  int id = 0;
  Vec3 pos;
  NodeRole role = NodeRole::idle;
  std::vector<IrSample> buffer;  // newest first, bounded by buffer_size
  double filtered = 0.0;
  bool detected = false;
  LedState led;
};

// Raw proximity sample against the closest growing tip; `tip_distance_mm`
// is +infinity when no tip grows. The sample is marked invalid when the
// node's own far-red emission floods a sensor this close (<= 2 mm).
IrSample sense_ir(const NodeParams& params, double tip_distance_mm, double own_far_red_duty,
                  Rng& rng);

void push_sample(RoboticNode& node, const IrSample& sample, const NodeParams& params);

bool has_valid_sample(const RoboticNode& node);

// Weighted mean of the valid buffered samples, weights renormalised over the
// valid ones. Raises NoValidSamples when everything buffered is invalid.
double filtered_value(const RoboticNode& node, const NodeParams& params);

bool detect(double filtered, const NodeParams& params);

// Noise-free reading of a neighbour's LED duty at distance (floor 1 cm^2).
double neighbor_reading(double duty, double distance_mm);

// LED command for this tick. Attractors relay: full blue on own detection or
// a strong neighbour blue reading, a dim beacon on a faint one.
LedState policy_step(NodeRole role, bool detected, double best_neighbor_blue,
                     const NodeParams& params);

}  // namespace florasim
