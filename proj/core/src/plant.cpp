#include "florasim/plant.hpp"

#include <algorithm>
#include <cmath>

#include "florasim/error.hpp"

namespace florasim {

namespace {

const std::vector<std::pair<double, double>> kNoSpans;

double clamp01(double v) { return std::min(1.0, std::max(0.0, v)); }

}  // namespace

void Coverage::add(SegmentId seg, double a, double b) {
  a = clamp01(a);
  b = clamp01(b);
  if (b < a) std::swap(a, b);
  if (b <= a) return;
  auto& spans = spans_[seg];
  spans.emplace_back(a, b);
  std::sort(spans.begin(), spans.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& sp : spans) {
    if (!merged.empty() && sp.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, sp.second);
    else
      merged.push_back(sp);
  }
  spans = std::move(merged);
}

void Coverage::clear_box(const ScaffoldGraph& graph, const Box& box) {
  for (auto& [seg_id, spans] : spans_) {
    const ScaffoldSegment& seg = graph.segment(seg_id);
    auto cut = clip_segment(box, graph.node(seg.from).pos, graph.node(seg.to).pos);
    if (!cut) continue;
    std::vector<std::pair<double, double>> kept;
    for (const auto& sp : spans) {
      if (sp.first < cut->first) kept.emplace_back(sp.first, std::min(sp.second, cut->first));
      if (sp.second > cut->second) kept.emplace_back(std::max(sp.first, cut->second), sp.second);
    }
    kept.erase(std::remove_if(kept.begin(), kept.end(),
                              [](const auto& sp) { return sp.second <= sp.first; }),
               kept.end());
    spans = std::move(kept);
  }
}

bool Coverage::covered_at(SegmentId seg, double frac) const {
  auto it = spans_.find(seg);
  if (it == spans_.end()) return false;
  for (const auto& sp : it->second)
    if (frac >= sp.first && frac <= sp.second) return true;
  return false;
}

double Coverage::covered_length(const ScaffoldGraph& graph) const {
  double total = 0.0;
  for (const auto& [seg_id, spans] : spans_) {
    const double len = graph.segment(seg_id).length;
    for (const auto& sp : spans) total += (sp.second - sp.first) * len;
  }
  return total;
}

const std::vector<std::pair<double, double>>& Coverage::intervals(SegmentId seg) const {
  auto it = spans_.find(seg);
  return it == spans_.end() ? kNoSpans : it->second;
}

double elongation_rate(double far_red, const PlantParams& params) {
  double ratio;
  if (params.far_red_norm > 0.0)
    ratio = std::min(far_red / params.far_red_norm, 1.0);
  else
    ratio = far_red > 0.0 ? 1.0 : 0.0;
  return params.base_rate * (1.0 + params.g_far_red * ratio);
}

SegmentId choose_branch(const ScaffoldGraph& graph, const StimulusField& field,
                        const std::vector<SegmentId>& options, const PlantParams& params,
                        Rng* rng) {
  if (options.empty()) raise(ErrorCode::NoOptions, "no candidate segments to grow into");

  std::vector<double> expo(options.size());
  for (size_t i = 0; i < options.size(); ++i) {
    Vec3 mid = graph.point_on(options[i], 0.5);
    double blue = sample_stimulus(field, mid, StimulusKind::blue);
    double far_red = sample_stimulus(field, mid, StimulusKind::far_red);
    expo[i] = params.k_blue * blue - params.k_far_red * far_red;
  }
  double peak = *std::max_element(expo.begin(), expo.end());

  if (params.deterministic) {
    size_t best = 0;
    for (size_t i = 1; i < options.size(); ++i)
      if (expo[i] > expo[best]) best = i;
    return options[best];
  }

  if (rng == nullptr) raise(ErrorCode::RuntimeFault, "stochastic branch choice needs an rng");
  std::vector<double> weight(options.size());
  double total = 0.0;
  for (size_t i = 0; i < options.size(); ++i) {
    weight[i] = std::exp(expo[i] - peak);
    total += weight[i];
  }
  double mark = rng->uniform() * total;
  double accum = 0.0;
  for (size_t i = 0; i < options.size(); ++i) {
    accum += weight[i];
    if (mark < accum) return options[i];
  }
  return options.back();
}

void grow_step(PlantState& state, const ScaffoldGraph& graph, const StimulusField& field,
               const PlantParams& params, double dt, Rng* rng) {
  std::vector<size_t> order(state.tips.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](size_t l, size_t r) {
    return state.tips[l].id < state.tips[r].id;
  });

  for (size_t idx : order) {
    GrowthTip& tip = state.tips[idx];
    if (tip.stopped) {
      // A leaf that has since branched lets the tip continue.
      if (graph.children(graph.segment(tip.segment).to).empty()) continue;
      tip.stopped = false;
    }
    double rate = elongation_rate(
        sample_stimulus(field, graph.point_on(tip.segment, tip.frac), StimulusKind::far_red),
        params);
    double budget = rate * dt;
    while (budget > 0.0) {
      const ScaffoldSegment& seg = graph.segment(tip.segment);
      double remaining = (1.0 - tip.frac) * seg.length;
      if (budget < remaining) {
        double nf = tip.frac + budget / seg.length;
        state.coverage.add(seg.id, tip.frac, nf);
        tip.frac = nf;
        break;
      }
      state.coverage.add(seg.id, tip.frac, 1.0);
      budget -= remaining;
      tip.frac = 1.0;
      const std::vector<SegmentId>& children = graph.children(seg.to);
      if (children.empty()) {
        tip.stopped = true;
        break;
      }
      tip.segment = choose_branch(graph, field, children, params, rng);
      tip.frac = 0.0;
    }
  }
}

double region_coverage(const ScaffoldGraph& graph, const Coverage& coverage, const Box& box) {
  double inside = 0.0;
  double covered = 0.0;
  for (const auto& [seg_id, seg] : graph.segments()) {
    auto cut = clip_segment(box, graph.node(seg.from).pos, graph.node(seg.to).pos);
    if (!cut) continue;
    double len = (cut->second - cut->first) * seg.length;
    if (len <= 0.0) continue;
    inside += len;
    int samples = std::max(1, static_cast<int>(std::ceil(len)));
    int hit = 0;
    for (int k = 0; k < samples; ++k) {
      double frac = cut->first + (k + 0.5) / samples * (cut->second - cut->first);
      if (coverage.covered_at(seg_id, frac)) ++hit;
    }
    covered += len * hit / samples;
  }
  return inside > 0.0 ? covered / inside : 0.0;
}

}  // namespace florasim
