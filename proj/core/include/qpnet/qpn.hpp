#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpnet/bayes_net.hpp"
#include "qpnet/types.hpp"

namespace qpnet {

// First-order stochastic dominance: f dominates g when f(x) <= g(x) at every
// state, ties within `tol` counting as equality. Throws LENGTH_MISMATCH for
// CDFs over different state spaces.
bool fsd(const CdfVector& f, const CdfVector& g, double tol = kProbTol);

// Influence sign carried by one arc: Positive when, in every context over the
// child's other parents, a higher parent state yields a stochastically larger
// child; Negative symmetric; Zero when both hold (all row CDFs equal within
// `tol`); Ambiguous otherwise.
Sign arc_sign(const BayesNet& net, NodeId parent, NodeId child, double tol = kProbTol);

// Qualitative probabilistic network: the DAG of a Bayesian network with each
// arc annotated by its influence sign.
struct Qpn {
  struct Node {
    NodeId id;
    std::string name;
  };

  std::vector<Node> nodes;                // ascending id
  std::map<Arc, Sign> arc_signs;

  bool has_node(NodeId id) const;
  std::vector<NodeId> node_ids() const;
  std::vector<NodeId> parents(NodeId id) const;   // ascending
  std::vector<NodeId> children(NodeId id) const;  // ascending
};

// Signs every arc of the network via arc_sign.
Qpn abstract_to_qpn(const BayesNet& net, double tol = kProbTol);

struct PropagationTrace {
  struct Message {
    NodeId source;
    Sign carried;
  };

  std::vector<NodeId> visit_order;      // ancestral order, ties by node id
  std::map<NodeId, Sign> resolved;
  // For nodes resolved Ambiguous: the incoming message that first turned the
  // accumulated sign ambiguous.
  std::map<NodeId, Message> ambiguity_message;

  Sign sign_of(NodeId id) const { return resolved.at(id); }
};

// Propagates influence signs from the decision along directed arcs. The
// decision resolves Positive; nodes that are not descendants of the decision
// resolve Zero (with no observed nodes, no other trail is active for a root
// decision); every other node combines sign_multiply(resolved parent, arc
// sign) over its incoming arcs with sign_add, parents processed in ancestral
// order.
PropagationTrace propagate_signs(const Qpn& qpn, NodeId decision);

// The first node in visit order whose resolved sign is Ambiguous, paired with
// the source of the message that made it so. Empty when the target resolved
// decisively.
std::optional<std::pair<NodeId, NodeId>> ambiguity_frontier(const PropagationTrace& trace,
                                                            NodeId decision, NodeId target);

}  // namespace qpnet
