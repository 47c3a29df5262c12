#include "qpnet/qpn.hpp"

#include <algorithm>
#include <deque>
#include <set>

namespace qpnet {

bool fsd(const CdfVector& f, const CdfVector& g, double tol) {
  if (f.size() != g.size()) {
    throw Error(ErrorCode::LengthMismatch, "CDF lengths differ");
  }
  for (std::size_t k = 0; k < f.size(); ++k) {
    if (f[k] > g[k] + tol) return false;
  }
  return true;
}

Sign arc_sign(const BayesNet& net, NodeId parent, NodeId child, double tol) {
  if (!net.has_arc(parent, child)) {
    throw Error(ErrorCode::NoSuchArc, "no arc between the given nodes");
  }
  const Cpt& cpt = net.cpt(child);
  const int ppos = cpt.parent_pos(parent);
  if (ppos < 0) {
    throw Error(ErrorCode::NoSuchArc, "arc is not reflected in the child CPT");
  }
  const std::uint32_t pcard = cpt.parent_cards()[ppos];

  // Iterate contexts over the other parents; within each, compare adjacent
  // parent states (dominance is transitive, so adjacent checks cover all
  // ordered pairs).
  bool pos = true;
  bool neg = true;
  std::vector<std::uint32_t> cfg(cpt.parents().size(), 0);
  const std::size_t rows = cpt.row_count();
  for (std::size_t r = 0; r < rows; ++r) {
    cfg = cpt.config_states(r);
    if (cfg[ppos] + 1 >= pcard) continue;
    const CdfVector lo = cpt.row_cdf(r);
    cfg[ppos] += 1;
    const CdfVector hi = cpt.row_cdf(cpt.config_index(cfg));
    for (std::size_t x = 0; x < lo.size(); ++x) {
      if (hi[x] > lo[x] + tol) pos = false;
      if (lo[x] > hi[x] + tol) neg = false;
    }
    if (!pos && !neg) return Sign::Ambiguous;
  }
  if (pos && neg) return Sign::Zero;
  return pos ? Sign::Positive : Sign::Negative;
}

bool Qpn::has_node(NodeId id) const {
  for (const Node& n : nodes) {
    if (n.id == id) return true;
  }
  return false;
}

std::vector<NodeId> Qpn::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(nodes.size());
  for (const Node& n : nodes) ids.push_back(n.id);
  return ids;
}

std::vector<NodeId> Qpn::parents(NodeId id) const {
  std::vector<NodeId> out;
  for (const auto& [arc, sign] : arc_signs) {
    if (arc.second == id) out.push_back(arc.first);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<NodeId> Qpn::children(NodeId id) const {
  std::vector<NodeId> out;
  for (const auto& [arc, sign] : arc_signs) {
    if (arc.first == id) out.push_back(arc.second);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Qpn abstract_to_qpn(const BayesNet& net, double tol) {
  Qpn qpn;
  for (NodeId id : net.node_ids()) {
    qpn.nodes.push_back({id, net.variable(id).name});
  }
  for (const Arc& arc : net.arcs()) {
    qpn.arc_signs.emplace(arc, arc_sign(net, arc.first, arc.second, tol));
  }
  return qpn;
}

namespace {

std::vector<NodeId> qpn_ancestral_order(const Qpn& qpn) {
  std::map<NodeId, std::size_t> indegree;
  for (NodeId id : qpn.node_ids()) indegree[id] = 0;
  for (const auto& [arc, sign] : qpn.arc_signs) ++indegree[arc.second];

  std::set<NodeId> ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) ready.insert(id);
  }
  std::vector<NodeId> order;
  order.reserve(indegree.size());
  while (!ready.empty()) {
    const NodeId id = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(id);
    for (NodeId child : qpn.children(id)) {
      if (--indegree[child] == 0) ready.insert(child);
    }
  }
  if (order.size() != indegree.size()) {
    throw Error(ErrorCode::InvalidArgument, "qualitative network contains a cycle");
  }
  return order;
}

std::set<NodeId> qpn_descendants(const Qpn& qpn, NodeId id) {
  std::set<NodeId> seen;
  std::deque<NodeId> frontier{id};
  while (!frontier.empty()) {
    const NodeId cur = frontier.front();
    frontier.pop_front();
    for (NodeId child : qpn.children(cur)) {
      if (seen.insert(child).second) frontier.push_back(child);
    }
  }
  seen.erase(id);
  return seen;
}

}  // namespace

PropagationTrace propagate_signs(const Qpn& qpn, NodeId decision) {
  if (!qpn.has_node(decision)) {
    throw Error(ErrorCode::UnknownNode, "decision node is not in the network");
  }
  PropagationTrace trace;
  trace.visit_order = qpn_ancestral_order(qpn);
  const std::set<NodeId> reachable = qpn_descendants(qpn, decision);

  // Position in visit order, for processing a node's parents in ancestral
  // order deterministically.
  std::map<NodeId, std::size_t> pos;
  for (std::size_t k = 0; k < trace.visit_order.size(); ++k) {
    pos[trace.visit_order[k]] = k;
  }

  for (NodeId id : trace.visit_order) {
    if (id == decision) {
      trace.resolved[id] = Sign::Positive;
      continue;
    }
    if (!reachable.count(id)) {
      trace.resolved[id] = Sign::Zero;
      continue;
    }
    std::vector<NodeId> parents = qpn.parents(id);
    std::sort(parents.begin(), parents.end(),
              [&pos](NodeId a, NodeId b) { return pos.at(a) < pos.at(b); });
    Sign acc = Sign::Zero;
    for (NodeId p : parents) {
      const Sign carried = sign_multiply(trace.resolved.at(p), qpn.arc_signs.at({p, id}));
      const Sign next = sign_add(acc, carried);
      if (next == Sign::Ambiguous && acc != Sign::Ambiguous) {
        trace.ambiguity_message[id] = {p, carried};
      }
      acc = next;
    }
    trace.resolved[id] = acc;
  }
  return trace;
}

std::optional<std::pair<NodeId, NodeId>> ambiguity_frontier(const PropagationTrace& trace,
                                                            NodeId decision, NodeId target) {
  (void)decision;
  if (trace.resolved.at(target) != Sign::Ambiguous) return std::nullopt;
  for (NodeId id : trace.visit_order) {
    if (trace.resolved.at(id) == Sign::Ambiguous) {
      return std::make_pair(id, trace.ambiguity_message.at(id).source);
    }
  }
  return std::nullopt;
}

}  // namespace qpnet
