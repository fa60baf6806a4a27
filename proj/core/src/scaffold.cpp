#include "florasim/scaffold.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <sstream>

namespace florasim {

namespace {

std::string join_ids(const std::vector<int>& ids) {
  std::ostringstream out;
  for (size_t i = 0; i < ids.size(); ++i) {
    if (i) out << ", ";
    out << ids[i];
  }
  return out.str();
}

}  // namespace

ScaffoldGraph ScaffoldGraph::build(const ScaffoldSpec& spec) {
  ScaffoldGraph g;
  g.root_ = spec.root;

  for (const auto& n : spec.nodes) {
    if (!g.nodes_.emplace(n.id, n).second)
      raise(ErrorCode::OverlappingModules, "duplicate node id " + std::to_string(n.id));
  }
  if (g.nodes_.empty()) raise(ErrorCode::EmptyGraph, "scaffold spec has no nodes");
  if (!g.has_node(spec.root))
    raise(ErrorCode::MissingRoot, "root node " + std::to_string(spec.root) + " is not defined");

  for (const auto& s : spec.segments) {
    if (g.segments_.count(s.id))
      raise(ErrorCode::OverlappingModules, "duplicate segment id " + std::to_string(s.id));
    if (!g.has_node(s.from))
      raise(ErrorCode::DisconnectedGraph,
            "segment " + std::to_string(s.id) + " references missing node " + std::to_string(s.from));
    if (!g.has_node(s.to))
      raise(ErrorCode::DisconnectedGraph,
            "segment " + std::to_string(s.id) + " references missing node " + std::to_string(s.to));
    if (s.filaments < 1)
      raise(ErrorCode::BadFilamentCount, "segment " + std::to_string(s.id) + " has filament count " +
                                             std::to_string(s.filaments));
    ScaffoldSegment seg;
    seg.id = s.id;
    seg.from = s.from;
    seg.to = s.to;
    seg.filaments = s.filaments;
    seg.fusion = s.fusion;
    seg.length = distance(g.node(s.from).pos, g.node(s.to).pos);
    if (seg.length <= 0.0)
      raise(ErrorCode::SchemaError, "segment " + std::to_string(s.id) + " has zero length");
    g.segments_.emplace(seg.id, seg);
  }

  // Orient tree segments away from the root with a BFS over non-fusion edges.
  std::map<NodeId, std::vector<SegmentId>> incident;
  for (const auto& [sid, seg] : g.segments_) {
    if (seg.fusion) continue;
    incident[seg.from].push_back(sid);
    incident[seg.to].push_back(sid);
  }
  std::set<NodeId> visited{g.root_};
  std::set<SegmentId> used;
  std::deque<NodeId> queue{g.root_};
  while (!queue.empty()) {
    NodeId at = queue.front();
    queue.pop_front();
    for (SegmentId sid : incident[at]) {
      if (used.count(sid)) continue;
      auto& seg = g.segments_.at(sid);
      NodeId other = seg.from == at ? seg.to : seg.from;
      if (visited.count(other))
        raise(ErrorCode::CycleWithoutFusionMark,
              "segment " + std::to_string(sid) + " closes a cycle but is not marked fusion");
      used.insert(sid);
      visited.insert(other);
      if (seg.from != at) std::swap(seg.from, seg.to);
      g.children_[at].push_back(sid);
      g.parent_segment_[other] = sid;
      queue.push_back(other);
    }
  }
  if (visited.size() != g.nodes_.size()) {
    std::vector<NodeId> missing;
    for (const auto& [nid, n] : g.nodes_)
      if (!visited.count(nid)) missing.push_back(nid);
    raise(ErrorCode::DisconnectedGraph, "nodes unreachable from root: " + join_ids(missing));
  }
  for (auto& [nid, kids] : g.children_) std::sort(kids.begin(), kids.end());
  return g;
}

const ScaffoldNode& ScaffoldGraph::node(NodeId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) raise(ErrorCode::ReferenceError, "unknown node id " + std::to_string(id));
  return it->second;
}

const ScaffoldSegment& ScaffoldGraph::segment(SegmentId id) const {
  auto it = segments_.find(id);
  if (it == segments_.end())
    raise(ErrorCode::ReferenceError, "unknown segment id " + std::to_string(id));
  return it->second;
}

const std::vector<SegmentId>& ScaffoldGraph::children(NodeId id) const {
  static const std::vector<SegmentId> kNone;
  auto it = children_.find(id);
  return it == children_.end() ? kNone : it->second;
}

std::optional<SegmentId> ScaffoldGraph::parent_segment(NodeId id) const {
  auto it = parent_segment_.find(id);
  if (it == parent_segment_.end()) return std::nullopt;
  return it->second;
}

std::vector<NodeId> ScaffoldGraph::leaves() const {
  std::vector<NodeId> out;
  for (const auto& [nid, n] : nodes_)
    if (children(nid).empty()) out.push_back(nid);
  return out;
}

Vec3 ScaffoldGraph::point_on(SegmentId id, double fraction) const {
  const auto& seg = segment(id);
  return lerp(node(seg.from).pos, node(seg.to).pos, fraction);
}

void ScaffoldGraph::add_node(const ScaffoldNode& n) {
  if (!nodes_.emplace(n.id, n).second)
    raise(ErrorCode::OverlappingModules, "duplicate node id " + std::to_string(n.id));
}

void ScaffoldGraph::add_segment(SegmentId id, NodeId from, NodeId to, int filaments) {
  if (segments_.count(id))
    raise(ErrorCode::OverlappingModules, "duplicate segment id " + std::to_string(id));
  if (filaments < 1)
    raise(ErrorCode::BadFilamentCount,
          "segment " + std::to_string(id) + " has filament count " + std::to_string(filaments));
  if (parent_segment_.count(to) || to == root_)
    raise(ErrorCode::CycleWithoutFusionMark,
          "segment " + std::to_string(id) + " would close a cycle at node " + std::to_string(to));
  ScaffoldSegment seg;
  seg.id = id;
  seg.from = from;
  seg.to = to;
  seg.filaments = filaments;
  seg.length = distance(node(from).pos, node(to).pos);
  if (seg.length <= 0.0)
    raise(ErrorCode::SchemaError, "segment " + std::to_string(id) + " has zero length");
  segments_.emplace(id, seg);
  auto& kids = children_[from];
  kids.insert(std::lower_bound(kids.begin(), kids.end(), id), id);
  parent_segment_[to] = id;
}

void ScaffoldGraph::set_filaments(SegmentId id, int filaments) {
  if (filaments < 1)
    raise(ErrorCode::BadFilamentCount,
          "segment " + std::to_string(id) + " has filament count " + std::to_string(filaments));
  auto it = segments_.find(id);
  if (it == segments_.end())
    raise(ErrorCode::ReferenceError, "unknown segment id " + std::to_string(id));
  it->second.filaments = filaments;
}

NodeId ScaffoldGraph::max_node_id() const { return nodes_.empty() ? -1 : nodes_.rbegin()->first; }

SegmentId ScaffoldGraph::max_segment_id() const {
  return segments_.empty() ? -1 : segments_.rbegin()->first;
}

NearestSegment nearest_segment(const ScaffoldGraph& graph, const Vec3& point) {
  if (graph.segments().empty())
    raise(ErrorCode::EmptyGraph, "graph has no segments to project onto");
  NearestSegment best;
  bool first = true;
  for (const auto& [sid, seg] : graph.segments()) {
    Vec3 a = graph.node(seg.from).pos;
    Vec3 b = graph.node(seg.to).pos;
    Vec3 ab = b - a;
    double t = dot(point - a, ab) / dot(ab, ab);
    t = std::clamp(t, 0.0, 1.0);
    double d = distance(point, lerp(a, b, t));
    if (first || d < best.distance) {
      best = {sid, t, d};
      first = false;
    }
  }
  return best;
}

}  // namespace florasim
