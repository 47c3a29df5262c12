#include "qpnet/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qpnet/exact.hpp"
#include "qpnet/qpn.hpp"

namespace qpnet {

StatePartition StatePartition::coarsest(NodeId node, std::uint32_t card) {
  StatePartition partition;
  partition.node = node;
  partition.ranges.emplace_back(0, card - 1);
  return partition;
}

StatePartition StatePartition::singletons(NodeId node, std::uint32_t card) {
  StatePartition partition;
  partition.node = node;
  for (std::uint32_t s = 0; s < card; ++s) partition.ranges.emplace_back(s, s);
  return partition;
}

bool StatePartition::fully_refined() const {
  for (const auto& [first, last] : ranges) {
    if (first != last) return false;
  }
  return true;
}

const char* directive_name(Directive d) {
  return d == Directive::Strengthen ? "STRENGTHEN" : "WEAKEN";
}

namespace {

void validate_partition(const StatePartition& partition, std::uint32_t card) {
  std::uint32_t next = 0;
  for (const auto& [first, last] : partition.ranges) {
    if (first != next || last < first || last >= card) {
      throw Error(ErrorCode::InvalidPartition,
                  "superstates must cover the state space in order");
    }
    next = last + 1;
  }
  if (next != card) {
    throw Error(ErrorCode::InvalidPartition,
                "superstates must cover the state space in order");
  }
}

std::vector<std::string> merged_labels(const Variable& var, const StatePartition& partition) {
  std::vector<std::string> labels;
  labels.reserve(partition.ranges.size());
  for (const auto& [first, last] : partition.ranges) {
    std::string label = var.states[first];
    for (std::uint32_t s = first + 1; s <= last; ++s) {
      label += '|';
      label += var.states[s];
    }
    labels.push_back(std::move(label));
  }
  return labels;
}

// Mediated pattern: every child of `a` passes the influence straight to the
// target with a decisive sign, has no parents besides `a` and the decision,
// and there are at most two of them.
std::optional<std::map<NodeId, Sign>> mediated_children(const BayesNet& net, NodeId a,
                                                        NodeId decision, NodeId target,
                                                        double tol) {
  const std::vector<NodeId> kids = net.children(a);
  if (kids.empty() || kids.size() > 2) return std::nullopt;
  for (NodeId p : net.parents(a)) {
    if (p != decision) return std::nullopt;
  }
  std::map<NodeId, Sign> toward;
  for (NodeId y : kids) {
    if (y == decision || y == target) return std::nullopt;
    if (net.children(y) != std::vector<NodeId>{target}) return std::nullopt;
    for (NodeId p : net.parents(y)) {
      if (p != a && p != decision) return std::nullopt;
    }
    const Sign sign = arc_sign(net, y, target, tol);
    if (sign == Sign::Ambiguous) return std::nullopt;
    toward.emplace(y, sign);
  }
  return toward;
}

}  // namespace

Eligibility check_eligibility(const BayesNet& net, NodeId decision, NodeId target,
                              double tol) {
  if (!net.has_node(decision) || !net.has_node(target)) {
    throw Error(ErrorCode::UnknownNode, "query node does not exist");
  }
  if (decision == target) {
    throw Error(ErrorCode::InvalidArgument, "decision and target must differ");
  }

  Eligibility out;
  // Conditioning on the decision would reweight rewritten CPTs upstream of
  // it, voiding the envelope guarantee.
  if (has_path(net, target, decision)) return out;

  for (NodeId a : net.node_ids()) {
    if (a == decision || a == target) continue;

    AbstractionCandidate cand;
    cand.node = a;

    const std::vector<NodeId> kids = net.children(a);
    if (kids.size() == 1 && kids[0] == target) {
      cand.child_toward_target.emplace(target, Sign::Positive);
    } else if (auto toward = mediated_children(net, a, decision, target, tol)) {
      cand.child_toward_target = std::move(*toward);
    } else {
      continue;
    }

    for (const auto& [child, sign] : cand.child_toward_target) {
      const Directive lower =
          sign == Sign::Negative ? Directive::Weaken : Directive::Strengthen;
      const Directive upper =
          lower == Directive::Strengthen ? Directive::Weaken : Directive::Strengthen;
      cand.lower_directive.emplace(child, lower);
      cand.upper_directive.emplace(child, upper);
    }
    out.candidates.push_back(std::move(cand));
  }
  return out;
}

AbstractionPlan make_plan(const Eligibility& eligibility,
                          const std::map<NodeId, StatePartition>& partitions) {
  AbstractionPlan plan;
  for (const AbstractionCandidate& cand : eligibility.candidates) {
    const auto it = partitions.find(cand.node);
    if (it == partitions.end()) {
      throw Error(ErrorCode::InvalidPartition, "no partition for an abstracted node");
    }
    plan.lower.push_back({it->second, cand.lower_directive});
    plan.upper.push_back({it->second, cand.upper_directive});
  }
  return plan;
}

AggregationResult aggregate_node(const BayesNet& net, const StatePartition& partition) {
  const NodeId a = partition.node;
  if (!net.has_node(a)) throw Error(ErrorCode::UnknownNode, "no such node");
  validate_partition(partition, net.card(a));

  const Cpt& cpt = net.cpt(a);
  std::vector<double> probs;
  probs.reserve(cpt.row_count() * partition.ranges.size());
  for (std::size_t r = 0; r < cpt.row_count(); ++r) {
    const std::span<const double> row = cpt.row(r);
    for (const auto& [first, last] : partition.ranges) {
      double sum = 0.0;
      for (std::uint32_t s = first; s <= last; ++s) sum += row[s];
      probs.push_back(sum);
    }
  }

  AggregationResult result{net, net.children(a)};
  result.net.set_states(a, merged_labels(net.variable(a), partition));
  result.net.set_family(a, cpt.parents(), std::move(probs));
  for (NodeId c : result.pending_children) {
    const std::vector<NodeId> cparents = net.parents(c);
    std::size_t cells = net.card(c);
    for (NodeId p : cparents) cells *= result.net.card(p);
    result.net.set_family(c, cparents, std::vector<double>(cells, 0.0));
  }
  return result;
}

Cpt transform_child_cpt(const Cpt& cpt, const StatePartition& partition,
                        Directive directive) {
  const int pos = cpt.parent_pos(partition.node);
  if (pos < 0) {
    throw Error(ErrorCode::UnknownNode, "partitioned node is not a parent of this CPT");
  }
  const std::size_t slot = static_cast<std::size_t>(pos);
  validate_partition(partition, cpt.parent_cards()[slot]);

  std::vector<std::uint32_t> cards = cpt.parent_cards();
  cards[slot] = static_cast<std::uint32_t>(partition.ranges.size());
  Cpt out(cpt.parents(), std::move(cards), cpt.child_card());

  const bool strengthen = directive == Directive::Strengthen;
  std::vector<double> row(cpt.child_card());
  for (std::size_t r = 0; r < out.row_count(); ++r) {
    std::vector<std::uint32_t> config = out.config_states(r);
    const auto [first, last] = partition.ranges[config[slot]];
    CdfVector envelope;
    for (std::uint32_t s = first; s <= last; ++s) {
      config[slot] = s;
      const CdfVector cdf = cpt.row_cdf(cpt.config_index(config));
      if (envelope.empty()) {
        envelope = cdf;
      } else {
        for (std::size_t t = 0; t < envelope.size(); ++t) {
          envelope[t] = strengthen ? std::min(envelope[t], cdf[t])
                                   : std::max(envelope[t], cdf[t]);
        }
      }
    }
    double prev = 0.0;
    for (std::size_t t = 0; t < envelope.size(); ++t) {
      row[t] = std::max(0.0, envelope[t] - prev);
      prev = envelope[t];
    }
    out.set_row(r, row);
  }
  return out;
}

BayesNet build_abstract_net(const BayesNet& net,
                            const std::vector<AbstractionPlan::Entry>& entries) {
  BayesNet out = net;
  for (const AbstractionPlan::Entry& entry : entries) {
    const NodeId a = entry.partition.node;
    if (!out.has_node(a)) throw Error(ErrorCode::UnknownNode, "no such node");

    std::map<NodeId, Cpt> rewritten;
    for (NodeId c : out.children(a)) {
      const auto it = entry.child_directive.find(c);
      if (it == entry.child_directive.end()) {
        throw Error(ErrorCode::Ineligible, "plan lacks a directive for a rewritten child");
      }
      rewritten.emplace(c, transform_child_cpt(out.cpt(c), entry.partition, it->second));
    }

    AggregationResult agg = aggregate_node(out, entry.partition);
    out = std::move(agg.net);
    for (NodeId c : agg.pending_children) {
      Cpt& cpt = rewritten.at(c);
      out.set_family(c, cpt.parents(), std::move(cpt.flat()));
    }
  }
  return out;
}

CdfBounds bound_target_cdfs(const BayesNet& net, NodeId decision, NodeId target,
                            const AbstractionPlan& plan, double cell_cap) {
  const BayesNet lower_net = build_abstract_net(net, plan.lower);
  const BayesNet upper_net = build_abstract_net(net, plan.upper);
  CdfBounds bounds;
  bounds.lower =
      exact_conditional_cdfs(lower_net, target, decision, cell_cap).per_decision_state;
  bounds.upper =
      exact_conditional_cdfs(upper_net, target, decision, cell_cap).per_decision_state;
  return bounds;
}

std::optional<Sign> sign_from_bounds(const CdfBounds& bounds, double tol) {
  if (bounds.lower.size() != bounds.upper.size()) {
    throw Error(ErrorCode::LengthMismatch,
                "lower and upper envelopes cover different decision states");
  }
  std::vector<std::size_t> defined;
  for (std::size_t k = 0; k < bounds.lower.size(); ++k) {
    if (bounds.lower[k] && bounds.upper[k]) defined.push_back(k);
  }
  if (defined.size() < 2) return Sign::Zero;

  bool neg_all = true;     // every pair certifies F(.|d_i) <= F(.|d_j), i < j
  bool pos_all = true;
  bool neg_strict = false; // some pair certifies a strict violation of the
  bool pos_strict = false; // opposite direction
  for (std::size_t ii = 0; ii + 1 < defined.size(); ++ii) {
    for (std::size_t jj = ii + 1; jj < defined.size(); ++jj) {
      const CdfVector& lo_i = *bounds.lower[defined[ii]];
      const CdfVector& up_i = *bounds.upper[defined[ii]];
      const CdfVector& lo_j = *bounds.lower[defined[jj]];
      const CdfVector& up_j = *bounds.upper[defined[jj]];
      for (std::size_t s = 0; s < lo_i.size(); ++s) {
        if (up_i[s] > lo_j[s] + tol) neg_all = false;
        if (up_j[s] > lo_i[s] + tol) pos_all = false;
        if (up_i[s] < lo_j[s] - tol) neg_strict = true;
        if (up_j[s] < lo_i[s] - tol) pos_strict = true;
      }
    }
  }
  if (neg_all && pos_all) return Sign::Zero;
  if (neg_all) return Sign::Negative;
  if (pos_all) return Sign::Positive;
  if (neg_strict && pos_strict) return Sign::Ambiguous;
  return std::nullopt;
}

namespace {

double envelope_shift(const CdfBounds& before, const CdfBounds& after) {
  double shift = 0.0;
  const auto scan = [&shift](const std::vector<std::optional<CdfVector>>& b,
                             const std::vector<std::optional<CdfVector>>& a) {
    for (std::size_t k = 0; k < std::min(a.size(), b.size()); ++k) {
      if (!a[k] || !b[k]) continue;
      for (std::size_t s = 0; s < a[k]->size(); ++s) {
        shift = std::max(shift, std::abs((*a[k])[s] - (*b[k])[s]));
      }
    }
  };
  scan(before.lower, after.lower);
  scan(before.upper, after.upper);
  return shift;
}

std::optional<NodeId> pick_refinement(const std::map<NodeId, StatePartition>& partitions,
                                      const std::map<NodeId, double>& last_gain) {
  std::optional<NodeId> best;
  double best_gain = -1.0;
  for (const auto& [node, partition] : partitions) {
    if (partition.fully_refined()) continue;
    const double gain = last_gain.at(node);
    if (!best || gain > best_gain) {
      best = node;
      best_gain = gain;
    }
  }
  return best;
}

void split_widest(StatePartition& partition) {
  std::size_t widest = 0;
  std::uint32_t width = 0;
  for (std::size_t i = 0; i < partition.ranges.size(); ++i) {
    const std::uint32_t w = partition.ranges[i].second - partition.ranges[i].first + 1;
    if (w > width) {
      width = w;
      widest = i;
    }
  }
  const auto [first, last] = partition.ranges[widest];
  const std::uint32_t mid = first + (last - first) / 2;
  partition.ranges[widest] = {first, mid};
  partition.ranges.insert(
      partition.ranges.begin() + static_cast<std::ptrdiff_t>(widest) + 1, {mid + 1, last});
}

}  // namespace

IssaResult issa_resolve(const BayesNet& net, NodeId decision, NodeId target, double tol,
                        double cell_cap) {
  const BayesNet sub = prune_irrelevant(net, decision, target);
  const Eligibility elig = check_eligibility(sub, decision, target, tol);
  if (!elig.eligible()) {
    throw Error(ErrorCode::Ineligible, "no node qualifies for state abstraction");
  }

  IssaResult result;
  std::map<NodeId, double> last_gain;
  for (const AbstractionCandidate& cand : elig.candidates) {
    result.partitions.emplace(cand.node,
                              StatePartition::coarsest(cand.node, sub.card(cand.node)));
    last_gain.emplace(cand.node, std::numeric_limits<double>::infinity());
  }

  std::optional<NodeId> just_split;
  CdfBounds prev;
  while (true) {
    const AbstractionPlan plan = make_plan(elig, result.partitions);
    CdfBounds bounds = bound_target_cdfs(sub, decision, target, plan, cell_cap);
    if (just_split) last_gain[*just_split] = envelope_shift(prev, bounds);

    if (const std::optional<Sign> verdict = sign_from_bounds(bounds, tol)) {
      result.sign = *verdict;
      result.bounds = std::move(bounds);
      return result;
    }

    const std::optional<NodeId> pick = pick_refinement(result.partitions, last_gain);
    if (!pick) {
      // Unreachable: at full refinement the envelopes coincide with the
      // exact CDFs, for which the verdict is always defined.
      throw Error(ErrorCode::UndefinedCondition, "refinement exhausted without a verdict");
    }
    split_widest(result.partitions.at(*pick));
    ++result.refinement_steps;
    just_split = *pick;
    prev = std::move(bounds);
  }
}

}  // namespace qpnet
