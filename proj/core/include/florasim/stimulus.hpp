#pragma once

#include <string>
#include <vector>

#include "florasim/vec3.hpp"

namespace florasim {

enum class StimulusKind { blue = 0, far_red = 1, ambient_red = 2 };

constexpr int kStimulusKinds = 3;

const char* stimulus_kind_name(StimulusKind kind);

struct StimulusSource {
  Vec3 pos;
  StimulusKind kind = StimulusKind::blue;
  double intensity = 0.0;  // >= 0
};

struct StimulusField {
  std::vector<StimulusSource> sources;
  double ambient[kStimulusKinds] = {0.0, 0.0, 0.0};
};

// Point sources fall off with inverse-square distance in centimeters, clamped
// below 0.2 cm so a source cannot diverge; ambient adds per kind.
constexpr double kMinSourceDistanceCm = 0.2;
constexpr double kMinSourceDistanceCm2 = 0.04;

double sample_stimulus(const StimulusField& field, const Vec3& point, StimulusKind kind);

enum class RegionLabel { window, target, damage, occupied_space };

const char* region_label_name(RegionLabel label);

struct Region {
  std::string id;
  RegionLabel label = RegionLabel::target;
  Box box;
  // Fraction of the region already filled by the environment; only meaningful
  // for occupied_space regions, where it feeds the growth controller's leaf
  // scores as 1 - occupancy.
  double occupancy = 1.0;
};

}  // namespace florasim
