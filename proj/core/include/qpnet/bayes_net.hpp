#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qpnet/types.hpp"

namespace qpnet {

struct Variable {
  NodeId id = 0;
  std::string name;
  std::vector<std::string> states;  // ordered lowest to highest

  std::uint32_t card() const { return static_cast<std::uint32_t>(states.size()); }
};

// Conditional probability table for one child variable. Rows are indexed by
// parent configuration; the first parent is the most significant digit, the
// last parent varies fastest.
class Cpt {
 public:
  Cpt() = default;
  Cpt(std::vector<NodeId> parents, std::vector<std::uint32_t> parent_cards,
      std::uint32_t child_card);

  const std::vector<NodeId>& parents() const { return parents_; }
  const std::vector<std::uint32_t>& parent_cards() const { return parent_cards_; }
  std::uint32_t child_card() const { return child_card_; }

  std::size_t row_count() const;
  std::span<const double> row(std::size_t config) const;
  void set_row(std::size_t config, std::span<const double> dist);
  double prob(std::size_t config, std::uint32_t state) const;

  // Probabilities accumulated over child states for one row.
  CdfVector row_cdf(std::size_t config) const;

  // Encode/decode a parent configuration (one state index per parent, in
  // parent-list order).
  std::size_t config_index(std::span<const std::uint32_t> states) const;
  std::vector<std::uint32_t> config_states(std::size_t config) const;

  // Position of a node in the parent list, or -1.
  int parent_pos(NodeId id) const;

  const std::vector<double>& flat() const { return probs_; }
  std::vector<double>& flat() { return probs_; }

 private:
  std::vector<NodeId> parents_;
  std::vector<std::uint32_t> parent_cards_;
  std::uint32_t child_card_ = 0;
  std::vector<double> probs_;
};

using Arc = std::pair<NodeId, NodeId>;  // (parent, child)

// Discrete Bayesian network. Node ids are stable handles: transformations
// remove or rewire nodes without renumbering the survivors. The arc set is
// stored separately from the CPT parent lists so that validation can report
// disagreements between the two.
class BayesNet {
 public:
  NodeId add_variable(std::string name, std::vector<std::string> states);

  // Appends `parent` to `child`'s CPT parent list and records the arc.
  // Invalidates previously set rows for `child`.
  void add_arc(NodeId parent, NodeId child);

  // Replaces the distributions of `child`'s CPT; size must equal
  // row_count * child_card, rows in configuration order.
  void set_rows(NodeId child, std::vector<double> probs);

  // Rewrites `child`'s CPT (parents and rows) and syncs its incoming arcs.
  void set_family(NodeId child, std::vector<NodeId> parents,
                  std::vector<double> probs);

  // Removes a node together with its incident arcs. The caller is
  // responsible for only removing nodes no CPT depends on (barren nodes).
  void remove_node(NodeId id);

  // Replaces a variable's state space. Invalidates the node's CPT and every
  // child CPT until the caller rewrites them (see set_family).
  void set_states(NodeId id, std::vector<std::string> states);

  // Assembles a network without reconciling arcs against CPT parent lists;
  // used by parsers so that validation can flag the mismatch.
  static BayesNet from_parts(std::vector<Variable> vars, std::set<Arc> arcs,
                             std::map<NodeId, Cpt> cpts);

  bool has_node(NodeId id) const { return vars_.count(id) != 0; }
  const Variable& variable(NodeId id) const;
  std::optional<NodeId> find(std::string_view name) const;
  std::vector<NodeId> node_ids() const;  // ascending
  std::size_t node_count() const { return vars_.size(); }

  const std::set<Arc>& arcs() const { return arcs_; }
  bool has_arc(NodeId parent, NodeId child) const;
  std::size_t arc_count() const { return arcs_.size(); }

  const Cpt& cpt(NodeId id) const;
  std::vector<NodeId> parents(NodeId id) const;   // CPT parent list
  std::vector<NodeId> children(NodeId id) const;  // ascending
  std::uint32_t card(NodeId id) const;

 private:
  std::map<NodeId, Variable> vars_;
  std::map<NodeId, Cpt> cpts_;
  std::set<Arc> arcs_;
  NodeId next_id_ = 0;
};

enum class Violation {
  Cycle,
  NonNormalizedRow,
  MissingRow,
  ParentMismatch,
  BadStateSpace,
  OutOfRangeProbability,
};

const char* violation_name(Violation v);

struct ValidationIssue {
  Violation kind;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool ok() const { return issues.empty(); }
};

// Checks acyclicity, CPT row counts, row normalization, probability ranges,
// state spaces, and agreement between arcs and CPT parent lists.
ValidationReport validate_network(const BayesNet& net);

// Topological order with ties broken by ascending node id. Throws on cycles.
std::vector<NodeId> ancestral_order(const BayesNet& net);

// Nodes with a directed path to `id` (excluding `id` itself).
std::set<NodeId> ancestors(const BayesNet& net, NodeId id);

// Nodes reachable from `id` by directed paths (excluding `id` itself).
std::set<NodeId> descendants(const BayesNet& net, NodeId id);

// True if a directed path from `from` to `to` exists (length >= 1).
bool has_path(const BayesNet& net, NodeId from, NodeId to);

// Restricts the network to the nodes relevant for the influence of
// `decision` on `target` under no evidence: the ancestors of both query
// nodes (inclusive). Every other node is iteratively barren for this query,
// so the conditional distribution of the target given the decision is
// unchanged. If the decision is not an ancestor of the target, the result
// has no directed decision-to-target path.
BayesNet prune_irrelevant(const BayesNet& net, NodeId decision, NodeId target);

}  // namespace qpnet
