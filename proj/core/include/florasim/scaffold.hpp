#pragma once

#include <map>
#include <optional>
#include <vector>

#include "florasim/error.hpp"
#include "florasim/vec3.hpp"

namespace florasim {

using NodeId = int;
using SegmentId = int;

struct ScaffoldNode {
  NodeId id = 0;
  Vec3 pos;
};

// Canonical orientation after build: `from` is the parent side, `to` the child
// side. Fusion edges keep their declared orientation and carry no tree role.
struct ScaffoldSegment {
  SegmentId id = 0;
  NodeId from = 0;
  NodeId to = 0;
  int filaments = 1;
  double length = 0.0;
  bool fusion = false;
};

struct ScaffoldSpec {
  struct Segment {
    SegmentId id = 0;
    NodeId from = 0;
    NodeId to = 0;
    int filaments = 1;
    bool fusion = false;
  };
  std::vector<ScaffoldNode> nodes;
  std::vector<Segment> segments;
  NodeId root = 0;
};

class ScaffoldGraph {
 public:
  // Validates the spec: the root exists, segment endpoints exist, filament
  // counts are >= 1, non-fusion segments form a tree spanning every node.
  static ScaffoldGraph build(const ScaffoldSpec& spec);

  NodeId root() const { return root_; }
  bool has_node(NodeId id) const { return nodes_.count(id) > 0; }
  bool has_segment(SegmentId id) const { return segments_.count(id) > 0; }
  const ScaffoldNode& node(NodeId id) const;
  const ScaffoldSegment& segment(SegmentId id) const;
  const std::map<NodeId, ScaffoldNode>& nodes() const { return nodes_; }
  const std::map<SegmentId, ScaffoldSegment>& segments() const { return segments_; }

  // Child segments (canonical parent -> child), ascending segment id.
  const std::vector<SegmentId>& children(NodeId id) const;
  // Tree segment entering the node, nullopt for the root.
  std::optional<SegmentId> parent_segment(NodeId id) const;
  // Nodes without child segments, ascending id.
  std::vector<NodeId> leaves() const;

  Vec3 point_on(SegmentId id, double fraction) const;

  // Mutation used when structure proposals are applied; `to` must be a fresh
  // node id, so tree shape is preserved by construction.
  void add_node(const ScaffoldNode& n);
  void add_segment(SegmentId id, NodeId from, NodeId to, int filaments);
  void set_filaments(SegmentId id, int filaments);

  NodeId max_node_id() const;
  SegmentId max_segment_id() const;

 private:
  NodeId root_ = 0;
  std::map<NodeId, ScaffoldNode> nodes_;
  std::map<SegmentId, ScaffoldSegment> segments_;
  std::map<NodeId, std::vector<SegmentId>> children_;
  std::map<NodeId, SegmentId> parent_segment_;
};

struct NearestSegment {
  SegmentId segment = 0;
  double fraction = 0.0;
  double distance = 0.0;
};

// Closest point over all segments, clamped to segment ends; exact distance
// ties go to the lowest segment id. Throws EmptyGraph when the graph has no
// segments.
NearestSegment nearest_segment(const ScaffoldGraph& graph, const Vec3& point);

}  // namespace florasim
