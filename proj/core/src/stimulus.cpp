#include "florasim/stimulus.hpp"

#include <algorithm>

namespace florasim {

const char* stimulus_kind_name(StimulusKind kind) {
  switch (kind) {
    case StimulusKind::blue: return "blue";
    case StimulusKind::far_red: return "far_red";
    case StimulusKind::ambient_red: return "ambient_red";
  }
  return "unknown";
}

const char* region_label_name(RegionLabel label) {
  switch (label) {
    case RegionLabel::window: return "window";
    case RegionLabel::target: return "target";
    case RegionLabel::damage: return "damage";
    case RegionLabel::occupied_space: return "occupied_space";
  }
  return "unknown";
}

double sample_stimulus(const StimulusField& field, const Vec3& point, StimulusKind kind) {
  double value = field.ambient[static_cast<int>(kind)];
  for (const auto& src : field.sources) {
    if (src.kind != kind) continue;
    double d_cm = distance(src.pos, point) / 10.0;
    double d2 = d_cm <= kMinSourceDistanceCm ? kMinSourceDistanceCm2 : d_cm * d_cm;
    value += src.intensity / d2;
  }
  return value;
}

}  // namespace florasim
