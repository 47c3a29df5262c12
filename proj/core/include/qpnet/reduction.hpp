#pragma once

#include <cstdint>
#include <optional>
#include <utility>

#include "qpnet/bayes_net.hpp"
#include "qpnet/qpn.hpp"
#include "qpnet/rng.hpp"
#include "qpnet/types.hpp"

namespace qpnet {

enum class StrategyKind : std::uint8_t {
  ReduceXFirst,  // reduce the frontier node before its message source
  ReduceYFirst,  // reduce the message source before the frontier node
};

struct Strategy {
  StrategyKind kind = StrategyKind::ReduceXFirst;
  std::uint64_t seed = 0;  // drives only the adjacent-node fallback choice
};

enum class Resolver : std::uint8_t {
  Marginalize,  // reduce nodes by arc reversal and barren-node removal
  Issa,         // try bound-based resolution first, fall back to marginalize
};

enum class ResolvedAt : std::uint8_t {
  Qualitative,     // sign propagation alone settled the query
  AfterReduction,  // settled after numeric work (reductions or bounds)
  Exhausted,       // nothing reducible remained; the query stays ambiguous
};

const char* resolved_at_name(ResolvedAt r);

struct ResolutionStats {
  std::size_t nodes_reduced = 0;
  std::size_t arc_reversals = 0;
  std::size_t qualitative_passes = 0;
  std::size_t refinement_steps = 0;
  // Reversals a fixed ancestral-order completion of the residual network
  // would still need; the denominator baseline for reversal ratios.
  std::size_t residual_completion_reversals = 0;
  ResolvedAt resolved_at = ResolvedAt::Qualitative;
};

struct ReversalInfo {
  // Rows where the new child marginal had zero mass and the reversed
  // conditional was filled in as uniform.
  std::size_t degenerate_rows = 0;
};

// Shachter arc reversal: requires the arc x->y with no other directed x-to-y
// path. x and y inherit each other's parents and the joint distribution is
// preserved exactly. Zero-probability contexts for the reversed conditional
// get a uniform row (counted in `info`).
BayesNet reverse_arc(const BayesNet& net, NodeId x, NodeId y, ReversalInfo* info = nullptr);

// Removes a node by reversing its outgoing arcs (each time picking its
// earliest child in ancestral order, which never has another path from the
// node) until it is barren, then dropping it. Returns the new network and the
// number of reversals performed.
std::pair<BayesNet, std::size_t> marginalize_node(const BayesNet& net, NodeId x);

// Reduction step chosen from an ambiguous propagation trace. Returns the
// frontier node or its message source according to the strategy, skipping
// the query nodes; when both are query nodes, a seeded-random node adjacent
// to the decision or target. Empty when nothing is reducible.
std::optional<NodeId> select_node(const PropagationTrace& trace, const BayesNet& net,
                                  NodeId decision, NodeId target, const Strategy& strategy,
                                  Rng& rng);

struct ResolutionResult {
  Sign sign = Sign::Ambiguous;
  ResolutionStats stats;
  BayesNet residual;  // working network at termination
};

// Incremental tradeoff resolution: prune to the query, propagate qualitative
// signs, and while the target stays ambiguous reduce one node at a time
// (or, with the Issa resolver, first try bound-based resolution of the
// frontier relationship). An ambiguous bound verdict for a non-target
// frontier node never terminates the loop; the query only returns ambiguous
// once it is confirmed for the target or nothing reducible remains.
ResolutionResult itor(const BayesNet& net, NodeId decision, NodeId target,
                      const Strategy& strategy, Resolver resolver);

// Exact numerical evaluation baseline: marginalizes every node except the
// query pair (always the earliest in ancestral order first) and reads the
// sign off the final direct CPT.
ResolutionResult full_numeric_reduce(const BayesNet& net, NodeId decision, NodeId target);

// Replaces the ancestry of `x` with a direct decision->x arc carrying the
// exact conditional of x given the decision, provided that ancestry
// influences the rest of the network only through x. Returns the reduced
// network and the number of nodes removed, or empty when the structural
// condition fails.
std::optional<std::pair<BayesNet, std::size_t>> condense_ancestry(const BayesNet& net,
                                                                  NodeId decision, NodeId x);

}  // namespace qpnet
