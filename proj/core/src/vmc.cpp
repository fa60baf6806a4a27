#include "florasim/vmc.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

namespace florasim {

namespace {

VmcRecord& record(VmcState& state, NodeId id) { return state[id]; }

}  // namespace

VmcState init_state(const ScaffoldGraph& graph, const VmcParams& params) {
  VmcState state;
  for (const auto& [nid, n] : graph.nodes()) state[nid] = {params.v_init, 0.0, 0.0};
  return state;
}

VmcState distribute_resource(const ScaffoldGraph& graph, VmcState state, const VmcParams& params) {
  record(state, graph.root()).resource = params.r_total;
  std::deque<NodeId> queue{graph.root()};
  while (!queue.empty()) {
    NodeId at = queue.front();
    queue.pop_front();
    const auto& kids = graph.children(at);
    if (kids.empty()) continue;
    double total_vessel = 0.0;
    for (SegmentId sid : kids) total_vessel += record(state, graph.segment(sid).to).vessel;
    double parent_resource = record(state, at).resource;
    for (SegmentId sid : kids) {
      NodeId child = graph.segment(sid).to;
      double share = total_vessel > 0.0 ? record(state, child).vessel / total_vessel
                                        : 1.0 / static_cast<double>(kids.size());
      record(state, child).resource = parent_resource * share;
      queue.push_back(child);
    }
  }
  return state;
}

VmcState propagate_success(const ScaffoldGraph& graph, VmcState state, const LeafScores& scores) {
  // Iterative post-order over the tree.
  std::vector<NodeId> order;
  std::deque<NodeId> queue{graph.root()};
  while (!queue.empty()) {
    NodeId at = queue.front();
    queue.pop_front();
    order.push_back(at);
    for (SegmentId sid : graph.children(at)) queue.push_back(graph.segment(sid).to);
  }
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    NodeId at = *it;
    const auto& kids = graph.children(at);
    if (kids.empty()) {
      auto score = scores.find(at);
      if (score == scores.end())
        raise(ErrorCode::MissingLeafScore, "leaf " + std::to_string(at) + " has no score");
      record(state, at).success = score->second;
    } else {
      double sum = 0.0;
      for (SegmentId sid : kids) sum += record(state, graph.segment(sid).to).success;
      record(state, at).success = sum;
    }
  }
  return state;
}

VmcState update_vessels(VmcState state, const VmcParams& params) {
  for (auto& [nid, rec] : state) {
    double v = rec.vessel + params.alpha * rec.success * rec.resource - params.beta * rec.vessel;
    rec.vessel = std::max(0.0, v);
  }
  return state;
}

std::vector<int> allocate_filaments(int f_parent, const std::vector<double>& vessels,
                                    const VmcParams& params) {
  const int n = static_cast<int>(vessels.size());
  if (n == 0) {
    if (f_parent != 0)
      raise(ErrorCode::InsufficientFilaments, "no branches to hold " + std::to_string(f_parent) +
                                                  " filaments");
    return {};
  }
  if (f_parent < params.f_min * n)
    raise(ErrorCode::InsufficientFilaments,
          std::to_string(f_parent) + " filaments cannot give " + std::to_string(n) +
              " branches at least " + std::to_string(params.f_min) + " each");

  double total = std::accumulate(vessels.begin(), vessels.end(), 0.0);
  std::vector<int> alloc(n, 0);
  std::vector<std::pair<double, int>> remainders(n);
  int assigned = 0;
  for (int i = 0; i < n; ++i) {
    double share = total > 0.0 ? vessels[i] / total : 1.0 / n;
    double quota = f_parent * share;
    alloc[i] = static_cast<int>(std::floor(quota));
    assigned += alloc[i];
    remainders[i] = {quota - alloc[i], i};
  }
  std::stable_sort(remainders.begin(), remainders.end(), [](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return a.second < b.second;
  });
  for (int k = 0; k < f_parent - assigned; ++k) alloc[remainders[k % n].second] += 1;

  // Raise deficits to f_min, taking from the currently largest entry.
  for (;;) {
    int deficit = -1;
    for (int i = 0; i < n; ++i)
      if (alloc[i] < params.f_min) {
        deficit = i;
        break;
      }
    if (deficit < 0) break;
    int donor = 0;
    for (int i = 1; i < n; ++i)
      if (alloc[i] > alloc[donor]) donor = i;
    alloc[donor] -= 1;
    alloc[deficit] += 1;
  }
  return alloc;
}

std::vector<StructureProposal> propose_structure(const ScaffoldGraph& graph, const VmcState& state,
                                                 const VmcParams& params) {
  std::vector<StructureProposal> out;
  for (const auto& [nid, n] : graph.nodes()) {
    auto it = state.find(nid);
    VmcRecord rec = it == state.end() ? VmcRecord{} : it->second;
    bool is_leaf = graph.children(nid).empty();
    if (is_leaf && rec.resource > params.theta_branch)
      out.push_back({ProposalKind::branch_at, nid, 2});
    if (nid != graph.root() && rec.vessel < params.theta_prune) {
      auto parent_seg = graph.parent_segment(nid);
      if (parent_seg && graph.children(graph.segment(*parent_seg).from).size() >= 2)
        out.push_back({ProposalKind::prune, nid, 0});
    }
  }
  return out;
}

VmcStepResult vmc_step(const ScaffoldGraph& graph, const VmcState& state, const LeafScores& scores,
                       const VmcParams& params) {
  VmcState next = distribute_resource(graph, state, params);
  next = propagate_success(graph, std::move(next), scores);
  next = update_vessels(std::move(next), params);
  return {next, propose_structure(graph, next, params)};
}

}  // namespace florasim
