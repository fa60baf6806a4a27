#include "florasim/svg.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace florasim {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  // Avoid the two spellings of zero.
  if (std::string(buf) == "-0.000") return "0.000";
  return buf;
}

const char* region_stroke(RegionLabel label) {
  switch (label) {
    case RegionLabel::window: return "#1f6feb";
    case RegionLabel::damage: return "#d73a49";
    case RegionLabel::target: return "#8250df";
    case RegionLabel::occupied_space: return "#bf8700";
  }
  return "#000000";
}

const char* node_fill(NodeRole role) {
  switch (role) {
    case NodeRole::idle: return "#6e7781";
    case NodeRole::attractor: return "#0969da";
    case NodeRole::repeller: return "#cf222e";
  }
  return "#000000";
}

}  // namespace

std::string render_svg(const WorldState& world, const ScenarioConfig& config) {
  double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
  bool any = false;
  auto grow = [&](double x, double y) {
    if (!any) {
      min_x = max_x = x;
      min_y = max_y = y;
      any = true;
      return;
    }
    min_x = std::min(min_x, x);
    max_x = std::max(max_x, x);
    min_y = std::min(min_y, y);
    max_y = std::max(max_y, y);
  };
  for (const auto& [id, n] : world.graph.nodes()) grow(n.pos.x, n.pos.y);
  for (const Region& r : config.regions) {
    grow(r.box.min.x, r.box.min.y);
    grow(r.box.max.x, r.box.max.y);
  }
  for (const RoboticNode& n : world.nodes) grow(n.pos.x, n.pos.y);
  if (!any) grow(0.0, 0.0);

  const double margin = 20.0;
  const double width = (max_x - min_x) + 2.0 * margin;
  const double height = (max_y - min_y) + 2.0 * margin;
  auto sx = [&](double x) { return x - min_x + margin; };
  auto sy = [&](double y) { return (max_y - y) + margin; };  // y up in world space

  std::ostringstream out;
  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << fmt(width)
      << "\" height=\"" << fmt(height) << "\" viewBox=\"0 0 " << fmt(width) << " " << fmt(height)
      << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << fmt(width) << "\" height=\"" << fmt(height)
      << "\" fill=\"#ffffff\"/>\n";

  for (const Region& r : config.regions) {
    out << "<rect class=\"region " << region_label_name(r.label) << "\" x=\"" << fmt(sx(r.box.min.x))
        << "\" y=\"" << fmt(sy(r.box.max.y)) << "\" width=\"" << fmt(r.box.max.x - r.box.min.x)
        << "\" height=\"" << fmt(r.box.max.y - r.box.min.y) << "\" fill=\"none\" stroke=\""
        << region_stroke(r.label) << "\" stroke-width=\"1.5\"/>\n";
  }

  for (const auto& [id, seg] : world.graph.segments()) {
    const Vec3 a = world.graph.node(seg.from).pos;
    const Vec3 b = world.graph.node(seg.to).pos;
    out << "<line class=\"segment\" x1=\"" << fmt(sx(a.x)) << "\" y1=\"" << fmt(sy(a.y))
        << "\" x2=\"" << fmt(sx(b.x)) << "\" y2=\"" << fmt(sy(b.y))
        << "\" stroke=\"#9a9a9a\" stroke-width=\"1\"";
    if (seg.fusion) out << " stroke-dasharray=\"4 3\"";
    out << "/>\n";
    for (const auto& span : world.plant.coverage.intervals(id)) {
      const Vec3 p = lerp(a, b, span.first);
      const Vec3 q = lerp(a, b, span.second);
      out << "<line class=\"covered\" x1=\"" << fmt(sx(p.x)) << "\" y1=\"" << fmt(sy(p.y))
          << "\" x2=\"" << fmt(sx(q.x)) << "\" y2=\"" << fmt(sy(q.y))
          << "\" stroke=\"#2da44e\" stroke-width=\"2.5\"/>\n";
    }
  }

  for (const RoboticNode& n : world.nodes) {
    out << "<circle class=\"node " << node_role_name(n.role) << "\" cx=\"" << fmt(sx(n.pos.x))
        << "\" cy=\"" << fmt(sy(n.pos.y)) << "\" r=\"3\" fill=\"" << node_fill(n.role) << "\"";
    if (n.led.blue > 0.0 || n.led.far_red > 0.0)
      out << " stroke=\"#ffd33d\" stroke-width=\"1.5\"";
    out << "/>\n";
  }

  for (const GrowthTip& tip : world.plant.tips) {
    const Vec3 p = world.graph.point_on(tip.segment, tip.frac);
    out << "<circle class=\"tip\" cx=\"" << fmt(sx(p.x)) << "\" cy=\"" << fmt(sy(p.y))
        << "\" r=\"2\" fill=\"" << (tip.stopped ? "#57606a" : "#1a7f37") << "\"/>\n";
  }

  out << "</svg>\n";
  return out.str();
}

}  // namespace florasim
