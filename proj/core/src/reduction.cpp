#include "qpnet/reduction.hpp"

#include <algorithm>

#include "qpnet/bounds.hpp"
#include "qpnet/exact.hpp"

namespace qpnet {

const char* resolved_at_name(ResolvedAt r) {
  switch (r) {
    case ResolvedAt::Qualitative: return "QUALITATIVE";
    case ResolvedAt::AfterReduction: return "AFTER_REDUCTION";
    case ResolvedAt::Exhausted: return "EXHAUSTED";
  }
  return "EXHAUSTED";
}

BayesNet reverse_arc(const BayesNet& net, NodeId x, NodeId y, ReversalInfo* info) {
  if (!net.has_arc(x, y)) {
    throw Error(ErrorCode::NoSuchArc, "no arc to reverse between the given nodes");
  }
  // Another directed x-to-y path would make the reversal introduce a cycle.
  for (NodeId c : net.children(x)) {
    if (c != y && has_path(net, c, y)) {
      throw Error(ErrorCode::PathExists, "another directed path connects the arc endpoints");
    }
  }

  const Cpt& xcpt = net.cpt(x);
  const Cpt& ycpt = net.cpt(y);
  const std::uint32_t xcard = net.card(x);
  const std::uint32_t ycard = net.card(y);

  // Shared context: the union of both parent sets, x excluded. Both new
  // parent lists are kept sorted by node id.
  std::set<NodeId> context(xcpt.parents().begin(), xcpt.parents().end());
  for (NodeId p : ycpt.parents()) {
    if (p != x) context.insert(p);
  }
  const std::vector<NodeId> new_py(context.begin(), context.end());
  std::vector<NodeId> new_px = new_py;
  new_px.insert(std::lower_bound(new_px.begin(), new_px.end(), y), y);

  std::vector<std::uint32_t> cards_py;
  for (NodeId p : new_py) cards_py.push_back(net.card(p));
  std::vector<std::uint32_t> cards_px;
  for (NodeId p : new_px) cards_px.push_back(net.card(p));

  Cpt ny(new_py, cards_py, ycard);
  Cpt nx(new_px, cards_px, xcard);
  std::vector<double> y_probs(ny.row_count() * ycard, 0.0);
  std::vector<double> x_probs(nx.row_count() * xcard, 0.0);

  // Positions of the old parent lists inside the shared context.
  std::map<NodeId, std::size_t> ctx_pos;
  for (std::size_t k = 0; k < new_py.size(); ++k) ctx_pos[new_py[k]] = k;
  std::vector<std::size_t> x_from_ctx;
  for (NodeId p : xcpt.parents()) x_from_ctx.push_back(ctx_pos.at(p));
  std::vector<int> y_from_ctx;  // -1 marks the x slot
  for (NodeId p : ycpt.parents()) {
    y_from_ctx.push_back(p == x ? -1 : static_cast<int>(ctx_pos.at(p)));
  }
  const std::size_t y_slot_in_px = static_cast<std::size_t>(
      std::lower_bound(new_px.begin(), new_px.end(), y) - new_px.begin());

  std::vector<std::uint32_t> xc(xcpt.parents().size());
  std::vector<std::uint32_t> yc(ycpt.parents().size());
  std::vector<std::uint32_t> pxc(new_px.size());
  std::vector<double> joint(static_cast<std::size_t>(xcard) * ycard);

  for (std::size_t r = 0; r < ny.row_count(); ++r) {
    const std::vector<std::uint32_t> ctx = ny.config_states(r);
    for (std::size_t k = 0; k < x_from_ctx.size(); ++k) xc[k] = ctx[x_from_ctx[k]];
    const std::size_t xrow = xcpt.config_index(xc);

    for (std::uint32_t xs = 0; xs < xcard; ++xs) {
      const double px = xcpt.prob(xrow, xs);
      for (std::size_t k = 0; k < y_from_ctx.size(); ++k) {
        yc[k] = y_from_ctx[k] < 0 ? xs : ctx[static_cast<std::size_t>(y_from_ctx[k])];
      }
      const std::size_t yrow = ycpt.config_index(yc);
      for (std::uint32_t ys = 0; ys < ycard; ++ys) {
        joint[static_cast<std::size_t>(xs) * ycard + ys] = px * ycpt.prob(yrow, ys);
      }
    }

    for (std::uint32_t ys = 0; ys < ycard; ++ys) {
      double marg = 0.0;
      for (std::uint32_t xs = 0; xs < xcard; ++xs) {
        marg += joint[static_cast<std::size_t>(xs) * ycard + ys];
      }
      y_probs[r * ycard + ys] = marg;

      // Row of the reversed conditional for this (context, y) pair.
      std::size_t ci = 0;
      for (std::size_t k = 0, ck = 0; k < new_px.size(); ++k) {
        pxc[k] = (k == y_slot_in_px) ? ys : ctx[ck++];
      }
      ci = nx.config_index(pxc);
      if (marg == 0.0) {
        if (info) ++info->degenerate_rows;
        for (std::uint32_t xs = 0; xs < xcard; ++xs) {
          x_probs[ci * xcard + xs] = 1.0 / xcard;
        }
      } else {
        for (std::uint32_t xs = 0; xs < xcard; ++xs) {
          x_probs[ci * xcard + xs] = joint[static_cast<std::size_t>(xs) * ycard + ys] / marg;
        }
      }
    }
  }

  BayesNet out = net;
  out.set_family(y, new_py, std::move(y_probs));
  out.set_family(x, new_px, std::move(x_probs));
  return out;
}

std::pair<BayesNet, std::size_t> marginalize_node(const BayesNet& net, NodeId x) {
  if (!net.has_node(x)) throw Error(ErrorCode::UnknownNode, "no such node");
  BayesNet cur = net;
  std::size_t reversals = 0;
  while (true) {
    const std::vector<NodeId> kids = cur.children(x);
    if (kids.empty()) break;
    // The earliest child in ancestral order never has another incoming path
    // from x, so the reversal precondition holds.
    NodeId pick = kids.front();
    for (NodeId id : ancestral_order(cur)) {
      if (std::find(kids.begin(), kids.end(), id) != kids.end()) {
        pick = id;
        break;
      }
    }
    cur = reverse_arc(cur, x, pick);
    ++reversals;
  }
  cur.remove_node(x);
  return {std::move(cur), reversals};
}

std::optional<NodeId> select_node(const PropagationTrace& trace, const BayesNet& net,
                                  NodeId decision, NodeId target, const Strategy& strategy,
                                  Rng& rng) {
  const auto frontier = ambiguity_frontier(trace, decision, target);
  if (!frontier) {
    throw Error(ErrorCode::InvalidArgument, "target resolved decisively; nothing to select");
  }
  const NodeId x = frontier->first;
  const NodeId y = frontier->second;
  if (strategy.kind == StrategyKind::ReduceXFirst) {
    if (x != target) return x;
    if (y != decision) return y;
  } else {
    if (y != decision) return y;
    if (x != target) return x;
  }
  if (net.node_count() <= 2) return std::nullopt;
  std::set<NodeId> cand;
  for (const Arc& arc : net.arcs()) {
    if (arc.first == decision || arc.first == target) cand.insert(arc.second);
    if (arc.second == decision || arc.second == target) cand.insert(arc.first);
  }
  cand.erase(decision);
  cand.erase(target);
  if (cand.empty()) return std::nullopt;
  std::vector<NodeId> pool(cand.begin(), cand.end());
  return pool[uniform_int(rng, 0, pool.size() - 1)];
}

namespace {

ResolutionResult finish(BayesNet residual, Sign sign, ResolutionStats stats,
                        NodeId decision, NodeId target) {
  stats.residual_completion_reversals =
      full_numeric_reduce(residual, decision, target).stats.arc_reversals;
  return {sign, stats, std::move(residual)};
}

}  // namespace

ResolutionResult itor(const BayesNet& net, NodeId decision, NodeId target,
                      const Strategy& strategy, Resolver resolver) {
  if (!net.has_node(decision) || !net.has_node(target)) {
    throw Error(ErrorCode::UnknownNode, "query node does not exist");
  }
  if (decision == target) {
    throw Error(ErrorCode::InvalidArgument, "decision and target must differ");
  }

  BayesNet working = prune_irrelevant(net, decision, target);
  Rng rng(strategy.seed);
  ResolutionStats stats;

  std::map<Arc, Sign> signs;
  for (const Arc& arc : working.arcs()) {
    signs.emplace(arc, arc_sign(working, arc.first, arc.second));
  }
  // Only CPTs touched by a reduction get re-signed.
  auto resign = [&signs, &working](const std::vector<NodeId>& changed) {
    for (auto it = signs.begin(); it != signs.end();) {
      if (!working.has_arc(it->first.first, it->first.second)) {
        it = signs.erase(it);
      } else {
        ++it;
      }
    }
    for (NodeId c : changed) {
      if (!working.has_node(c)) continue;
      for (NodeId p : working.parents(c)) {
        signs[{p, c}] = arc_sign(working, p, c);
      }
    }
  };

  while (true) {
    ++stats.qualitative_passes;
    Qpn qpn;
    for (NodeId id : working.node_ids()) {
      qpn.nodes.push_back({id, working.variable(id).name});
    }
    qpn.arc_signs = signs;
    const PropagationTrace trace = propagate_signs(qpn, decision);

    const Sign target_sign = trace.sign_of(target);
    if (target_sign != Sign::Ambiguous) {
      stats.resolved_at = (stats.nodes_reduced == 0 && stats.refinement_steps == 0)
                              ? ResolvedAt::Qualitative
                              : ResolvedAt::AfterReduction;
      return finish(std::move(working), target_sign, stats, decision, target);
    }

    const auto frontier = ambiguity_frontier(trace, decision, target);
    const NodeId fx = frontier->first;

    if (resolver == Resolver::Issa) {
      const BayesNet sub = prune_irrelevant(working, decision, fx);
      if (check_eligibility(sub, decision, fx).eligible()) {
        std::optional<IssaResult> bound;
        try {
          bound = issa_resolve(working, decision, fx);
        } catch (const Error& err) {
          // An oversized abstract net cannot be evaluated; treat the query
          // as ineligible and reduce normally.
          if (err.code() != ErrorCode::TooLarge) throw;
        }
        if (bound) {
          stats.refinement_steps += bound->refinement_steps;
          if (bound->sign != Sign::Ambiguous) {
            if (fx == target) {
              stats.resolved_at = ResolvedAt::AfterReduction;
              return finish(std::move(working), bound->sign, stats, decision, target);
            }
            if (auto condensed = condense_ancestry(working, decision, fx)) {
              stats.nodes_reduced += condensed->second;
              working = std::move(condensed->first);
              resign({fx});
              continue;
            }
          } else if (fx == target) {
            // A crossing was witnessed for the target itself; the ambiguity
            // is confirmed, not merely unresolved.
            stats.resolved_at = ResolvedAt::AfterReduction;
            return finish(std::move(working), Sign::Ambiguous, stats, decision, target);
          }
          // Ambiguous verdict for a non-target frontier node, or no usable
          // network reduction: continue with an ordinary reduction step.
        }
      }
    }

    const auto pick = select_node(trace, working, decision, target, strategy, rng);
    if (!pick) {
      stats.resolved_at = ResolvedAt::Exhausted;
      return finish(std::move(working), Sign::Ambiguous, stats, decision, target);
    }
    const std::vector<NodeId> changed = working.children(*pick);
    auto [reduced, reversals] = marginalize_node(working, *pick);
    working = std::move(reduced);
    stats.arc_reversals += reversals;
    ++stats.nodes_reduced;
    resign(changed);
  }
}

ResolutionResult full_numeric_reduce(const BayesNet& net, NodeId decision, NodeId target) {
  if (!net.has_node(decision) || !net.has_node(target)) {
    throw Error(ErrorCode::UnknownNode, "query node does not exist");
  }
  if (decision == target) {
    throw Error(ErrorCode::InvalidArgument, "decision and target must differ");
  }
  BayesNet working = net;
  ResolutionStats stats;
  stats.resolved_at = ResolvedAt::AfterReduction;
  while (true) {
    NodeId pick = 0;
    bool found = false;
    for (NodeId id : ancestral_order(working)) {
      if (id != decision && id != target) {
        pick = id;
        found = true;
        break;
      }
    }
    if (!found) break;
    auto [reduced, reversals] = marginalize_node(working, pick);
    working = std::move(reduced);
    stats.arc_reversals += reversals;
    ++stats.nodes_reduced;
  }

  Sign sign = Sign::Zero;
  if (working.has_arc(decision, target)) {
    sign = arc_sign(working, decision, target);
  } else if (working.has_arc(target, decision)) {
    working = reverse_arc(working, target, decision);
    ++stats.arc_reversals;
    sign = arc_sign(working, decision, target);
  }
  return {sign, stats, std::move(working)};
}

std::optional<std::pair<BayesNet, std::size_t>> condense_ancestry(const BayesNet& net,
                                                                  NodeId decision, NodeId x) {
  if (!net.has_node(decision) || !net.has_node(x) || decision == x) return std::nullopt;
  std::set<NodeId> mediators = ancestors(net, x);
  mediators.erase(decision);
  if (mediators.empty()) return std::nullopt;
  for (NodeId m : mediators) {
    for (NodeId c : net.children(m)) {
      if (c != x && !mediators.count(c)) return std::nullopt;
    }
  }

  // Evaluation subnetwork: the mediators plus the query pair, with the
  // decision cut loose from its own parents (a placeholder prior that
  // cancels out of the conditional).
  std::vector<Variable> vars;
  std::set<Arc> arcs;
  std::map<NodeId, Cpt> cpts;
  std::set<NodeId> keep = mediators;
  keep.insert(decision);
  keep.insert(x);
  for (NodeId id : keep) {
    vars.push_back(net.variable(id));
    if (id == decision) {
      Cpt prior({}, {}, net.card(decision));
      std::vector<double> row(net.card(decision), 1.0 / net.card(decision));
      prior.set_row(0, row);
      cpts.emplace(id, std::move(prior));
    } else {
      cpts.emplace(id, net.cpt(id));
    }
  }
  for (const Arc& arc : net.arcs()) {
    if (arc.second != decision && keep.count(arc.first) && keep.count(arc.second)) {
      arcs.insert(arc);
    }
  }
  BayesNet sub = BayesNet::from_parts(std::move(vars), std::move(arcs), std::move(cpts));

  ExactCdfs cdfs;
  try {
    cdfs = exact_conditional_cdfs(sub, x, decision);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::TooLarge) return std::nullopt;
    throw;
  }
  if (!cdfs.all_defined()) return std::nullopt;

  const std::uint32_t dcard = net.card(decision);
  const std::uint32_t xcard = net.card(x);
  std::vector<double> rows(static_cast<std::size_t>(dcard) * xcard, 0.0);
  for (std::uint32_t d = 0; d < dcard; ++d) {
    const CdfVector& cdf = *cdfs.per_decision_state[d];
    double prev = 0.0;
    double sum = 0.0;
    for (std::uint32_t s = 0; s < xcard; ++s) {
      const double p = std::max(0.0, cdf[s] - prev);
      rows[static_cast<std::size_t>(d) * xcard + s] = p;
      prev = cdf[s];
      sum += p;
    }
    for (std::uint32_t s = 0; s < xcard; ++s) {
      rows[static_cast<std::size_t>(d) * xcard + s] /= sum;
    }
  }

  BayesNet out = net;
  out.set_family(x, {decision}, std::move(rows));
  for (NodeId m : mediators) out.remove_node(m);
  return std::make_pair(std::move(out), mediators.size());
}

}  // namespace qpnet
