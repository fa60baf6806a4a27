#pragma once

#include <map>
#include <vector>

#include "florasim/scaffold.hpp"

namespace florasim {

struct VmcParams {
  double r_total = 1.0;
  double alpha = 0.1;
  double beta = 0.05;
  double theta_branch = 0.4;
  double theta_prune = 0.02;
  double v_init = 1.0;
  int f_min = 1;
};

struct VmcRecord {
  double vessel = 0.0;
  double resource = 0.0;
  double success = 0.0;
};

// Missing node entries read as zeroed records.
using VmcState = std::map<NodeId, VmcRecord>;
using LeafScores = std::map<NodeId, double>;

VmcState init_state(const ScaffoldGraph& graph, const VmcParams& params);

// Root gets r_total; every child receives the parent's resource weighted by
// its vessel share among siblings (equal split when all sibling vessels are
// zero). Fusion edges carry nothing.
VmcState distribute_resource(const ScaffoldGraph& graph, VmcState state, const VmcParams& params);

// Leaf success from scores, internal success = sum of child successes.
VmcState propagate_success(const ScaffoldGraph& graph, VmcState state, const LeafScores& scores);

// v' = v + alpha * success * resource - beta * v, clamped at zero.
VmcState update_vessels(VmcState state, const VmcParams& params);

// Largest-remainder apportionment of f_parent over vessel proportions; each
// entry is raised to at least f_min afterwards (taking from the largest
// entries). Throws InsufficientFilaments when f_parent < f_min * n.
std::vector<int> allocate_filaments(int f_parent, const std::vector<double>& vessels,
                                    const VmcParams& params);

enum class ProposalKind { branch_at, prune, fuse };

struct StructureProposal {
  ProposalKind kind = ProposalKind::branch_at;
  NodeId node = 0;
  int children = 2;
};

// Branch at leaves whose resource exceeds theta_branch; prune non-root nodes
// whose vessel fell below theta_prune provided a sibling exists. Never the
// root; ordered by node id.
std::vector<StructureProposal> propose_structure(const ScaffoldGraph& graph, const VmcState& state,
                                                 const VmcParams& params);

struct VmcStepResult {
  VmcState state;
  std::vector<StructureProposal> proposals;
};

VmcStepResult vmc_step(const ScaffoldGraph& graph, const VmcState& state, const LeafScores& scores,
                       const VmcParams& params);

}  // namespace florasim
