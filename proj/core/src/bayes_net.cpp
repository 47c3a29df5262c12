#include "qpnet/bayes_net.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <numeric>
#include <queue>

namespace qpnet {

Sign sign_from_char(char c) {
  switch (c) {
    case '+': return Sign::Positive;
    case '-': return Sign::Negative;
    case '0': return Sign::Zero;
    case '?': return Sign::Ambiguous;
  }
  throw Error(ErrorCode::ParseError, std::string("unknown sign character '") + c + "'");
}

const char* sign_name(Sign s) {
  switch (s) {
    case Sign::Positive: return "POSITIVE";
    case Sign::Negative: return "NEGATIVE";
    case Sign::Zero: return "ZERO";
    case Sign::Ambiguous: return "AMBIGUOUS";
  }
  return "AMBIGUOUS";
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownNode: return "UNKNOWN_NODE";
    case ErrorCode::NoSuchArc: return "NO_SUCH_ARC";
    case ErrorCode::PathExists: return "PATH_EXISTS";
    case ErrorCode::LengthMismatch: return "LENGTH_MISMATCH";
    case ErrorCode::TooLarge: return "TOO_LARGE";
    case ErrorCode::InvalidPartition: return "INVALID_PARTITION";
    case ErrorCode::Ineligible: return "INELIGIBLE";
    case ErrorCode::GenerationFailure: return "GENERATION_FAILURE";
    case ErrorCode::UndefinedCondition: return "UNDEFINED_CONDITION";
    case ErrorCode::ParseError: return "PARSE_ERROR";
    case ErrorCode::InvalidArgument: return "INVALID_ARGUMENT";
  }
  return "INVALID_ARGUMENT";
}

const char* violation_name(Violation v) {
  switch (v) {
    case Violation::Cycle: return "CYCLE";
    case Violation::NonNormalizedRow: return "NON_NORMALIZED_ROW";
    case Violation::MissingRow: return "MISSING_ROW";
    case Violation::ParentMismatch: return "PARENT_MISMATCH";
    case Violation::BadStateSpace: return "BAD_STATE_SPACE";
    case Violation::OutOfRangeProbability: return "OUT_OF_RANGE_PROBABILITY";
  }
  return "PARENT_MISMATCH";
}

Cpt::Cpt(std::vector<NodeId> parents, std::vector<std::uint32_t> parent_cards,
         std::uint32_t child_card)
    : parents_(std::move(parents)),
      parent_cards_(std::move(parent_cards)),
      child_card_(child_card) {
  if (parents_.size() != parent_cards_.size()) {
    throw Error(ErrorCode::LengthMismatch, "parent list and cardinality list differ");
  }
  probs_.assign(row_count() * child_card_, 0.0);
}

std::size_t Cpt::row_count() const {
  std::size_t n = 1;
  for (std::uint32_t c : parent_cards_) n *= c;
  return n;
}

std::span<const double> Cpt::row(std::size_t config) const {
  return {probs_.data() + config * child_card_, child_card_};
}

void Cpt::set_row(std::size_t config, std::span<const double> dist) {
  if (dist.size() != child_card_) {
    throw Error(ErrorCode::LengthMismatch, "row length does not match child cardinality");
  }
  std::copy(dist.begin(), dist.end(), probs_.begin() + config * child_card_);
}

double Cpt::prob(std::size_t config, std::uint32_t state) const {
  return probs_[config * child_card_ + state];
}

CdfVector Cpt::row_cdf(std::size_t config) const {
  CdfVector cdf(child_card_);
  double acc = 0.0;
  for (std::uint32_t k = 0; k < child_card_; ++k) {
    acc += prob(config, k);
    cdf[k] = acc;
  }
  return cdf;
}

std::size_t Cpt::config_index(std::span<const std::uint32_t> states) const {
  if (states.size() != parents_.size()) {
    throw Error(ErrorCode::LengthMismatch, "configuration arity does not match parent list");
  }
  std::size_t idx = 0;
  for (std::size_t k = 0; k < states.size(); ++k) {
    idx = idx * parent_cards_[k] + states[k];
  }
  return idx;
}

std::vector<std::uint32_t> Cpt::config_states(std::size_t config) const {
  std::vector<std::uint32_t> states(parents_.size());
  for (std::size_t k = parents_.size(); k-- > 0;) {
    states[k] = static_cast<std::uint32_t>(config % parent_cards_[k]);
    config /= parent_cards_[k];
  }
  return states;
}

int Cpt::parent_pos(NodeId id) const {
  for (std::size_t k = 0; k < parents_.size(); ++k) {
    if (parents_[k] == id) return static_cast<int>(k);
  }
  return -1;
}

NodeId BayesNet::add_variable(std::string name, std::vector<std::string> states) {
  const NodeId id = next_id_++;
  Variable var;
  var.id = id;
  var.name = std::move(name);
  var.states = std::move(states);
  const std::uint32_t card = var.card();
  vars_.emplace(id, std::move(var));
  cpts_.emplace(id, Cpt({}, {}, card));
  return id;
}

void BayesNet::add_arc(NodeId parent, NodeId child) {
  if (!has_node(parent) || !has_node(child)) {
    throw Error(ErrorCode::UnknownNode, "arc endpoint does not exist");
  }
  arcs_.insert({parent, child});
  const Cpt& old = cpts_.at(child);
  std::vector<NodeId> parents = old.parents();
  std::vector<std::uint32_t> cards = old.parent_cards();
  parents.push_back(parent);
  cards.push_back(card(parent));
  cpts_[child] = Cpt(std::move(parents), std::move(cards), old.child_card());
}

void BayesNet::set_rows(NodeId child, std::vector<double> probs) {
  Cpt& cpt = cpts_.at(child);
  if (probs.size() != cpt.row_count() * cpt.child_card()) {
    throw Error(ErrorCode::LengthMismatch, "row block size mismatch for " + variable(child).name);
  }
  cpt.flat() = std::move(probs);
}

void BayesNet::set_family(NodeId child, std::vector<NodeId> parents,
                          std::vector<double> probs) {
  if (!has_node(child)) throw Error(ErrorCode::UnknownNode, "no such child node");
  for (auto it = arcs_.begin(); it != arcs_.end();) {
    if (it->second == child) {
      it = arcs_.erase(it);
    } else {
      ++it;
    }
  }
  std::vector<std::uint32_t> cards;
  cards.reserve(parents.size());
  for (NodeId p : parents) {
    if (!has_node(p)) throw Error(ErrorCode::UnknownNode, "no such parent node");
    arcs_.insert({p, child});
    cards.push_back(card(p));
  }
  Cpt cpt(std::move(parents), std::move(cards), card(child));
  if (probs.size() != cpt.row_count() * cpt.child_card()) {
    throw Error(ErrorCode::LengthMismatch, "row block size mismatch for " + variable(child).name);
  }
  cpt.flat() = std::move(probs);
  cpts_[child] = std::move(cpt);
}

void BayesNet::remove_node(NodeId id) {
  if (!has_node(id)) throw Error(ErrorCode::UnknownNode, "no such node");
  vars_.erase(id);
  cpts_.erase(id);
  for (auto it = arcs_.begin(); it != arcs_.end();) {
    if (it->first == id || it->second == id) {
      it = arcs_.erase(it);
    } else {
      ++it;
    }
  }
}

void BayesNet::set_states(NodeId id, std::vector<std::string> states) {
  if (!has_node(id)) throw Error(ErrorCode::UnknownNode, "no such node");
  if (states.empty()) {
    throw Error(ErrorCode::InvalidArgument, "a variable needs at least one state");
  }
  vars_.at(id).states = std::move(states);
}

BayesNet BayesNet::from_parts(std::vector<Variable> vars, std::set<Arc> arcs,
                              std::map<NodeId, Cpt> cpts) {
  BayesNet net;
  for (Variable& var : vars) {
    const NodeId id = var.id;
    net.vars_.emplace(id, std::move(var));
    net.next_id_ = std::max(net.next_id_, id + 1);
  }
  net.arcs_ = std::move(arcs);
  net.cpts_ = std::move(cpts);
  for (const auto& [id, var] : net.vars_) {
    if (!net.cpts_.count(id)) {
      net.cpts_.emplace(id, Cpt({}, {}, var.card()));
    }
  }
  return net;
}

const Variable& BayesNet::variable(NodeId id) const {
  auto it = vars_.find(id);
  if (it == vars_.end()) throw Error(ErrorCode::UnknownNode, "no such node");
  return it->second;
}

std::optional<NodeId> BayesNet::find(std::string_view name) const {
  for (const auto& [id, var] : vars_) {
    if (var.name == name) return id;
  }
  return std::nullopt;
}

std::vector<NodeId> BayesNet::node_ids() const {
  std::vector<NodeId> ids;
  ids.reserve(vars_.size());
  for (const auto& [id, var] : vars_) ids.push_back(id);
  return ids;
}

bool BayesNet::has_arc(NodeId parent, NodeId child) const {
  return arcs_.count({parent, child}) != 0;
}

const Cpt& BayesNet::cpt(NodeId id) const {
  auto it = cpts_.find(id);
  if (it == cpts_.end()) throw Error(ErrorCode::UnknownNode, "no such node");
  return it->second;
}

std::vector<NodeId> BayesNet::parents(NodeId id) const {
  return cpt(id).parents();
}

std::vector<NodeId> BayesNet::children(NodeId id) const {
  std::vector<NodeId> out;
  for (const Arc& arc : arcs_) {
    if (arc.first == id) out.push_back(arc.second);
  }
  return out;
}

std::uint32_t BayesNet::card(NodeId id) const { return variable(id).card(); }

namespace {

// Kahn's algorithm over the arc set; nodes with equal depth come out in
// ascending id order. Returns nullopt when a cycle blocks completion.
std::optional<std::vector<NodeId>> try_ancestral_order(const BayesNet& net) {
  std::map<NodeId, std::size_t> indegree;
  for (NodeId id : net.node_ids()) indegree[id] = 0;
  for (const Arc& arc : net.arcs()) ++indegree[arc.second];

  std::priority_queue<NodeId, std::vector<NodeId>, std::greater<NodeId>> ready;
  for (const auto& [id, deg] : indegree) {
    if (deg == 0) ready.push(id);
  }
  std::vector<NodeId> order;
  order.reserve(indegree.size());
  while (!ready.empty()) {
    const NodeId id = ready.top();
    ready.pop();
    order.push_back(id);
    for (NodeId child : net.children(id)) {
      if (--indegree[child] == 0) ready.push(child);
    }
  }
  if (order.size() != indegree.size()) return std::nullopt;
  return order;
}

}  // namespace

std::vector<NodeId> ancestral_order(const BayesNet& net) {
  auto order = try_ancestral_order(net);
  if (!order) throw Error(ErrorCode::InvalidArgument, "network contains a cycle");
  return *order;
}

std::set<NodeId> ancestors(const BayesNet& net, NodeId id) {
  std::set<NodeId> seen;
  std::deque<NodeId> frontier{id};
  while (!frontier.empty()) {
    const NodeId cur = frontier.front();
    frontier.pop_front();
    for (const Arc& arc : net.arcs()) {
      if (arc.second == cur && seen.insert(arc.first).second) {
        frontier.push_back(arc.first);
      }
    }
  }
  seen.erase(id);
  return seen;
}

std::set<NodeId> descendants(const BayesNet& net, NodeId id) {
  std::set<NodeId> seen;
  std::deque<NodeId> frontier{id};
  while (!frontier.empty()) {
    const NodeId cur = frontier.front();
    frontier.pop_front();
    for (const Arc& arc : net.arcs()) {
      if (arc.first == cur && seen.insert(arc.second).second) {
        frontier.push_back(arc.second);
      }
    }
  }
  seen.erase(id);
  return seen;
}

bool has_path(const BayesNet& net, NodeId from, NodeId to) {
  return descendants(net, from).count(to) != 0;
}

ValidationReport validate_network(const BayesNet& net) {
  ValidationReport report;
  auto add = [&report](Violation kind, std::string detail) {
    report.issues.push_back({kind, std::move(detail)});
  };

  std::set<std::string> names;
  for (NodeId id : net.node_ids()) {
    const Variable& var = net.variable(id);
    if (var.card() < 2) {
      add(Violation::BadStateSpace, "variable " + var.name + " has fewer than 2 states");
    }
    std::set<std::string> labels(var.states.begin(), var.states.end());
    if (labels.size() != var.states.size()) {
      add(Violation::BadStateSpace, "variable " + var.name + " has duplicate state labels");
    }
    if (!names.insert(var.name).second) {
      add(Violation::BadStateSpace, "duplicate variable name " + var.name);
    }
  }

  for (const Arc& arc : net.arcs()) {
    if (!net.has_node(arc.first) || !net.has_node(arc.second)) {
      add(Violation::ParentMismatch, "arc references a missing node");
      return report;
    }
  }

  if (!try_ancestral_order(net)) {
    add(Violation::Cycle, "arc set contains a directed cycle");
  }

  for (NodeId id : net.node_ids()) {
    const Variable& var = net.variable(id);
    const Cpt& cpt = net.cpt(id);

    std::set<NodeId> incoming;
    for (const Arc& arc : net.arcs()) {
      if (arc.second == id) incoming.insert(arc.first);
    }
    std::set<NodeId> listed(cpt.parents().begin(), cpt.parents().end());
    if (listed.size() != cpt.parents().size()) {
      add(Violation::ParentMismatch, "CPT of " + var.name + " lists a parent twice");
      continue;
    }
    if (listed != incoming) {
      add(Violation::ParentMismatch,
          "CPT parent list of " + var.name + " disagrees with the arc set");
      continue;
    }
    bool cards_ok = cpt.child_card() == var.card();
    for (std::size_t k = 0; k < cpt.parents().size(); ++k) {
      if (!net.has_node(cpt.parents()[k]) ||
          cpt.parent_cards()[k] != net.card(cpt.parents()[k])) {
        cards_ok = false;
      }
    }
    if (!cards_ok) {
      add(Violation::ParentMismatch,
          "CPT dimensions of " + var.name + " disagree with variable state spaces");
      continue;
    }
    if (cpt.flat().size() != cpt.row_count() * cpt.child_card()) {
      add(Violation::MissingRow,
          "CPT of " + var.name + " does not cover every parent configuration");
      continue;
    }
    for (std::size_t r = 0; r < cpt.row_count(); ++r) {
      double sum = 0.0;
      bool range_ok = true;
      for (std::uint32_t k = 0; k < cpt.child_card(); ++k) {
        const double p = cpt.prob(r, k);
        if (p < -kProbTol || p > 1.0 + kProbTol) range_ok = false;
        sum += p;
      }
      if (!range_ok) {
        add(Violation::OutOfRangeProbability,
            "CPT of " + var.name + " row " + std::to_string(r) + " has an entry outside [0, 1]");
      }
      if (std::abs(sum - 1.0) > kProbTol) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", sum);
        add(Violation::NonNormalizedRow,
            "CPT of " + var.name + " row " + std::to_string(r) + " sums to " + buf);
      }
    }
  }
  return report;
}

BayesNet prune_irrelevant(const BayesNet& net, NodeId decision, NodeId target) {
  if (!net.has_node(decision) || !net.has_node(target)) {
    throw Error(ErrorCode::UnknownNode, "query node does not exist");
  }
  std::set<NodeId> keep = ancestors(net, target);
  const std::set<NodeId> keep_d = ancestors(net, decision);
  keep.insert(keep_d.begin(), keep_d.end());
  keep.insert(decision);
  keep.insert(target);

  std::vector<Variable> vars;
  std::set<Arc> arcs;
  std::map<NodeId, Cpt> cpts;
  for (NodeId id : net.node_ids()) {
    if (!keep.count(id)) continue;
    vars.push_back(net.variable(id));
    cpts.emplace(id, net.cpt(id));
  }
  for (const Arc& arc : net.arcs()) {
    if (keep.count(arc.first) && keep.count(arc.second)) arcs.insert(arc);
  }
  return BayesNet::from_parts(std::move(vars), std::move(arcs), std::move(cpts));
}

}  // namespace qpnet
