#pragma once

#include <map>
#include <utility>
#include <vector>

#include "florasim/rng.hpp"
#include "florasim/scaffold.hpp"
#include "florasim/stimulus.hpp"

namespace florasim {

struct PlantParams {
  double base_rate = 1.0;    // mm per tick at zero far-red
  double g_far_red = 0.5;    // elongation gain at saturated far-red
  double far_red_norm = 1.0; // far-red level treated as saturation
  double k_blue = 2.0;       // branch-choice attraction to blue
  double k_far_red = 2.0;    // branch-choice repulsion from far-red
  bool deterministic = true; // argmax branch choice instead of sampling
};

struct GrowthTip {
  int id = 0;
  SegmentId segment = 0;
  double frac = 0.0;  // position along the segment, 0..1
  bool stopped = false;
};

// Covered spans per segment as merged fraction intervals.
class Coverage {
 public:
  void add(SegmentId seg, double a, double b);
  // Remove cover where segments pass through the box.
  void clear_box(const ScaffoldGraph& graph, const Box& box);
  bool covered_at(SegmentId seg, double frac) const;
  double covered_length(const ScaffoldGraph& graph) const;
  const std::vector<std::pair<double, double>>& intervals(SegmentId seg) const;

 private:
  std::map<SegmentId, std::vector<std::pair<double, double>>> spans_;
};

struct PlantState {
  std::vector<GrowthTip> tips;
  Coverage coverage;
};

double elongation_rate(double far_red, const PlantParams& params);

// Picks among candidate child segments by stimulus at their midpoints.
// Deterministic mode takes the best weight (ties to the lowest segment id);
// otherwise samples proportionally from `rng`.
SegmentId choose_branch(const ScaffoldGraph& graph, const StimulusField& field,
                        const std::vector<SegmentId>& options, const PlantParams& params,
                        Rng* rng);

// Advances every tip (ascending id) by its elongation budget, laying down
// coverage and crossing junctions with overshoot. Tips at leaves stop; a
// stopped tip resumes if its node has since gained children.
void grow_step(PlantState& state, const ScaffoldGraph& graph, const StimulusField& field,
               const PlantParams& params, double dt, Rng* rng);

// Covered fraction of the total scaffold length inside the region's box,
// probed at millimetre-spaced midpoints. Zero when nothing lies inside.
double region_coverage(const ScaffoldGraph& graph, const Coverage& coverage, const Box& box);

}  // namespace florasim
