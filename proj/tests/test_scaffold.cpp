#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <florasim/scaffold.hpp>

using namespace florasim;

namespace {

ScaffoldSpec y_spec() {
  ScaffoldSpec spec;
  spec.nodes = {{0, {0, 0, 0}}, {1, {0, 50, 0}}, {2, {-30, 90, 0}}, {3, {30, 90, 0}}};
  spec.segments = {{0, 0, 1, 16, false}, {1, 1, 2, 8, false}, {2, 1, 3, 8, false}};
  spec.root = 0;
  return spec;
}

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::RuntimeFault;
}

}  // namespace

TEST_CASE("build orients segments away from the root") {
  ScaffoldSpec spec = y_spec();
  // Declare the trunk reversed; build must flip it.
  spec.segments[0].from = 1;
  spec.segments[0].to = 0;
  ScaffoldGraph g = ScaffoldGraph::build(spec);

  CHECK(g.root() == 0);
  CHECK(g.segment(0).from == 0);
  CHECK(g.segment(0).to == 1);
  CHECK(g.children(0) == std::vector<SegmentId>{0});
  CHECK(g.children(1) == std::vector<SegmentId>{1, 2});
  CHECK(g.children(2).empty());
  CHECK(!g.parent_segment(0).has_value());
  CHECK(g.parent_segment(1) == 0);
  CHECK(g.parent_segment(3) == 2);
  CHECK(g.leaves() == std::vector<NodeId>{2, 3});
  CHECK(g.segment(0).length == doctest::Approx(50.0));
  CHECK(g.segment(1).length == doctest::Approx(50.0));  // 30-40-50 triangle
}

TEST_CASE("point_on interpolates along a segment") {
  ScaffoldGraph g = ScaffoldGraph::build(y_spec());
  Vec3 mid = g.point_on(0, 0.5);
  CHECK(mid == Vec3{0, 25, 0});
  CHECK(g.point_on(2, 1.0) == Vec3{30, 90, 0});
  CHECK(g.point_on(2, 0.0) == Vec3{0, 50, 0});
}

TEST_CASE("fusion edges are kept out of the tree") {
  ScaffoldSpec spec = y_spec();
  spec.segments.push_back({3, 2, 3, 4, true});
  ScaffoldGraph g = ScaffoldGraph::build(spec);
  CHECK(g.segment(3).fusion);
  CHECK(g.children(2).empty());
  CHECK(g.children(3).empty());
  CHECK(g.leaves() == std::vector<NodeId>{2, 3});

  // The same edge without the mark closes a cycle.
  spec.segments[3].fusion = false;
  CHECK(code_of([&] { ScaffoldGraph::build(spec); }) == ErrorCode::CycleWithoutFusionMark);
}

TEST_CASE("build rejects malformed specs") {
  CHECK(code_of([] { ScaffoldGraph::build(ScaffoldSpec{}); }) == ErrorCode::EmptyGraph);

  ScaffoldSpec spec = y_spec();
  spec.root = 9;
  CHECK(code_of([&] { ScaffoldGraph::build(spec); }) == ErrorCode::MissingRoot);

  spec = y_spec();
  spec.segments[1].to = 42;
  CHECK(code_of([&] { ScaffoldGraph::build(spec); }) == ErrorCode::DisconnectedGraph);

  spec = y_spec();
  spec.segments[2].filaments = 0;
  CHECK(code_of([&] { ScaffoldGraph::build(spec); }) == ErrorCode::BadFilamentCount);

  spec = y_spec();
  spec.nodes.push_back({2, {5, 5, 5}});
  CHECK(code_of([&] { ScaffoldGraph::build(spec); }) == ErrorCode::OverlappingModules);

  spec = y_spec();
  spec.nodes.push_back({4, {99, 99, 0}});  // no segment reaches it
  CHECK(code_of([&] { ScaffoldGraph::build(spec); }) == ErrorCode::DisconnectedGraph);

  spec = y_spec();
  spec.nodes[1].pos = spec.nodes[0].pos;  // zero-length trunk
  CHECK(code_of([&] { ScaffoldGraph::build(spec); }) == ErrorCode::SchemaError);
}

TEST_CASE("nearest_segment projects and clamps") {
  ScaffoldGraph g = ScaffoldGraph::build(y_spec());

  NearestSegment hit = nearest_segment(g, {0, 25, 5});
  CHECK(hit.segment == 0);
  CHECK(hit.fraction == doctest::Approx(0.5));
  CHECK(hit.distance == doctest::Approx(5.0));

  // Beyond the trunk base the projection clamps to the end point.
  hit = nearest_segment(g, {0, -10, 0});
  CHECK(hit.segment == 0);
  CHECK(hit.fraction == doctest::Approx(0.0));
  CHECK(hit.distance == doctest::Approx(10.0));

  // The junction node touches three segments; ties go to the lowest id.
  hit = nearest_segment(g, {0, 50, 0});
  CHECK(hit.segment == 0);
  CHECK(hit.distance == doctest::Approx(0.0));

  ScaffoldGraph empty;
  CHECK(code_of([&] { nearest_segment(empty, {0, 0, 0}); }) == ErrorCode::EmptyGraph);
}

TEST_CASE("mutation keeps the tree consistent") {
  ScaffoldGraph g = ScaffoldGraph::build(y_spec());
  CHECK(g.max_node_id() == 3);
  CHECK(g.max_segment_id() == 2);

  g.add_node({4, {-60, 130, 0}});
  g.add_segment(3, 2, 4, 4);
  CHECK(g.children(2) == std::vector<SegmentId>{3});
  CHECK(g.parent_segment(4) == 3);
  CHECK(g.leaves() == std::vector<NodeId>{3, 4});
  CHECK(g.segment(3).length == doctest::Approx(50.0));

  g.set_filaments(3, 7);
  CHECK(g.segment(3).filaments == 7);
  CHECK(code_of([&] { g.set_filaments(3, 0); }) == ErrorCode::BadFilamentCount);
  CHECK(code_of([&] { g.set_filaments(99, 1); }) == ErrorCode::ReferenceError);

  // Wiring a segment into an attached node would close a cycle.
  CHECK(code_of([&] { g.add_segment(4, 3, 1, 2); }) == ErrorCode::CycleWithoutFusionMark);
  CHECK(code_of([&] { g.add_node({4, {0, 0, 1}}); }) == ErrorCode::OverlappingModules);
  CHECK(code_of([&] { g.add_segment(3, 2, 4, 2); }) == ErrorCode::OverlappingModules);

  // Children lists stay sorted by segment id.
  g.add_node({5, {60, 130, 0}});
  g.add_segment(4, 3, 5, 2);
  g.add_node({6, {90, 130, 0}});
  g.add_segment(5, 3, 6, 2);
  CHECK(g.children(3) == std::vector<SegmentId>{4, 5});
}
