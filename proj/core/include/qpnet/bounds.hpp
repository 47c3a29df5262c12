#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qpnet/bayes_net.hpp"
#include "qpnet/types.hpp"

namespace qpnet {

// Grouping of a variable's ordered states into contiguous superstates.
struct StatePartition {
  NodeId node = 0;
  // Inclusive [first, last] index ranges, ascending and gap-free, covering
  // every state of the variable exactly once.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> ranges;

  static StatePartition coarsest(NodeId node, std::uint32_t card);
  static StatePartition singletons(NodeId node, std::uint32_t card);
  bool fully_refined() const;
};

// How a child CPT is rewritten over an aggregated parent. STRENGTHEN keeps,
// per context, the stochastically largest response found inside each
// superstate (pointwise CDF minimum over the merged states); WEAKEN keeps
// the smallest (pointwise maximum).
enum class Directive : std::uint8_t { Strengthen, Weaken };

const char* directive_name(Directive d);

// A node whose state space may be abstracted for a (decision, target) query,
// with the direction of influence each rewritten child CPT carries toward
// the target. The target itself counts as a positive carrier when it is the
// direct child.
struct AbstractionCandidate {
  NodeId node = 0;
  std::map<NodeId, Sign> child_toward_target;
  std::map<NodeId, Directive> lower_directive;
  std::map<NodeId, Directive> upper_directive;
};

struct Eligibility {
  std::vector<AbstractionCandidate> candidates;  // ascending node id

  bool eligible() const { return !candidates.empty(); }
};

// Structural screen deciding which nodes may be abstracted while keeping the
// envelope guarantee. Two patterns qualify: a node whose every child is a
// decisively-signed mediator feeding only the target (at most two such
// mediators, the node itself parented only by the decision), and a node
// whose single child is the target itself. The target must not be an
// ancestor of the decision, and the decision's own CPT is never rewritten.
// An empty candidate list means the query is ineligible for bounding.
Eligibility check_eligibility(const BayesNet& net, NodeId decision, NodeId target,
                              double tol = kProbTol);

// Instructions for one envelope computation: which nodes get aggregated,
// how their state spaces are partitioned, and which directive rewrites each
// child CPT. The lower entries configure the network whose target CDFs sit
// below the truth; the upper entries mirror them.
struct AbstractionPlan {
  struct Entry {
    StatePartition partition;
    std::map<NodeId, Directive> child_directive;
  };

  std::vector<Entry> lower;
  std::vector<Entry> upper;
};

// Derives the two-sided plan from an eligibility report, one partition per
// candidate node.
AbstractionPlan make_plan(const Eligibility& eligibility,
                          const std::map<NodeId, StatePartition>& partitions);

struct AggregationResult {
  BayesNet net;
  // Children whose CPTs were zero-filled and must be rewritten (see
  // transform_child_cpt) before the network is usable.
  std::vector<NodeId> pending_children;
};

// Replaces the node's state space by the partition's superstates, summing
// its CPT rows per block. Child CPTs are left pending.
AggregationResult aggregate_node(const BayesNet& net, const StatePartition& partition);

// Rewrites a CPT over the aggregated parent named by the partition: per
// context, each superstate's row becomes the pointwise CDF minimum
// (STRENGTHEN) or maximum (WEAKEN) of the merged states' rows, converted
// back to probabilities.
Cpt transform_child_cpt(const Cpt& cpt, const StatePartition& partition,
                        Directive directive);

// Applies one side of a plan: aggregates every listed node and rewrites its
// children under the entry's directives.
BayesNet build_abstract_net(const BayesNet& net,
                            const std::vector<AbstractionPlan::Entry>& entries);

// Per decision state, envelope CDFs over the target's states. A missing
// entry marks a decision state with no probability mass.
struct CdfBounds {
  std::vector<std::optional<CdfVector>> lower;
  std::vector<std::optional<CdfVector>> upper;
};

// Evaluates the two configured networks exactly and assembles the envelopes.
CdfBounds bound_target_cdfs(const BayesNet& net, NodeId decision, NodeId target,
                            const AbstractionPlan& plan,
                            double cell_cap = kDefaultEnumerationCap);

// Verdict from envelope dominance over every pair of reachable decision
// states: a definite sign when one envelope clears the other for all pairs,
// Zero when both directions clear, Ambiguous only when strict violations of
// both directions are witnessed, and nullopt when the envelopes are too
// loose to certify anything.
std::optional<Sign> sign_from_bounds(const CdfBounds& bounds, double tol = kProbTol);

struct IssaResult {
  Sign sign = Sign::Ambiguous;
  std::size_t refinement_steps = 0;
  CdfBounds bounds;                             // envelopes at termination
  std::map<NodeId, StatePartition> partitions;  // partitions at termination
};

// Bound-based sign resolution: starts every eligible node at the coarsest
// partition and tightens until the envelope verdict is decisive, a crossing
// is witnessed, or the partitions reach full refinement, where the envelopes
// coincide with the exact CDFs and the verdict matches exact_sign. Each
// refinement binary-splits the widest superstate of the node whose previous
// split moved the envelopes most (ties to the lowest node id, then the
// lowest range index). Throws INELIGIBLE when check_eligibility finds no
// candidate.
IssaResult issa_resolve(const BayesNet& net, NodeId decision, NodeId target,
                        double tol = kProbTol,
                        double cell_cap = kDefaultEnumerationCap);

}  // namespace qpnet
