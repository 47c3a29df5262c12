#include "qpnet/exact.hpp"

#include <algorithm>
#include <cmath>

namespace qpnet {

ExactCdfs exact_conditional_cdfs(const BayesNet& net, NodeId target, NodeId decision,
                                 double cell_cap) {
  if (!net.has_node(target) || !net.has_node(decision)) {
    throw Error(ErrorCode::UnknownNode, "query node does not exist");
  }
  if (target == decision) {
    throw Error(ErrorCode::InvalidArgument, "target and decision must differ");
  }

  const std::vector<NodeId> order = ancestral_order(net);
  double cells = 1.0;
  for (NodeId id : order) {
    cells *= net.card(id);
    if (cells > cell_cap) {
      throw Error(ErrorCode::TooLarge, "joint state space exceeds the enumeration cap");
    }
  }

  std::map<NodeId, std::size_t> pos;
  for (std::size_t k = 0; k < order.size(); ++k) pos[order[k]] = k;

  // Per node: parent positions in the enumeration order, resolved once.
  std::vector<const Cpt*> cpts(order.size());
  std::vector<std::vector<std::size_t>> parent_pos(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    cpts[k] = &net.cpt(order[k]);
    for (NodeId p : cpts[k]->parents()) parent_pos[k].push_back(pos.at(p));
  }

  const std::size_t d_pos = pos.at(decision);
  const std::size_t t_pos = pos.at(target);
  const std::uint32_t d_card = net.card(decision);
  const std::uint32_t t_card = net.card(target);

  std::vector<std::vector<double>> mass(d_card, std::vector<double>(t_card, 0.0));
  std::vector<std::uint32_t> assignment(order.size(), 0);
  std::vector<std::uint32_t> cfg;

  auto recurse = [&](auto&& self, std::size_t depth, double weight) -> void {
    if (weight == 0.0) return;
    if (depth == order.size()) {
      mass[assignment[d_pos]][assignment[t_pos]] += weight;
      return;
    }
    const Cpt& cpt = *cpts[depth];
    cfg.resize(parent_pos[depth].size());
    for (std::size_t k = 0; k < parent_pos[depth].size(); ++k) {
      cfg[k] = assignment[parent_pos[depth][k]];
    }
    const std::size_t row = cpt.config_index(cfg);
    for (std::uint32_t s = 0; s < cpt.child_card(); ++s) {
      assignment[depth] = s;
      self(self, depth + 1, weight * cpt.prob(row, s));
    }
  };
  recurse(recurse, 0, 1.0);

  ExactCdfs out;
  out.per_decision_state.resize(d_card);
  for (std::uint32_t d = 0; d < d_card; ++d) {
    double pd = 0.0;
    for (std::uint32_t t = 0; t < t_card; ++t) pd += mass[d][t];
    if (pd <= kProbTol) continue;  // zero-probability decision state
    CdfVector cdf(t_card);
    double acc = 0.0;
    for (std::uint32_t t = 0; t < t_card; ++t) {
      acc += mass[d][t] / pd;
      cdf[t] = acc;
    }
    out.per_decision_state[d] = std::move(cdf);
  }
  return out;
}

Sign sign_of_cdf_family(const std::vector<std::optional<CdfVector>>& cdfs, double tol) {
  std::vector<const CdfVector*> defined;
  for (const auto& cdf : cdfs) {
    if (cdf) defined.push_back(&*cdf);
  }
  if (defined.size() < 2) return Sign::Zero;

  // Adjacent comparisons suffice: pointwise dominance is transitive.
  bool pos = true;
  bool neg = true;
  for (std::size_t k = 0; k + 1 < defined.size(); ++k) {
    const CdfVector& lo = *defined[k];
    const CdfVector& hi = *defined[k + 1];
    if (lo.size() != hi.size()) {
      throw Error(ErrorCode::LengthMismatch, "CDF lengths differ");
    }
    for (std::size_t x = 0; x < lo.size(); ++x) {
      if (hi[x] > lo[x] + tol) pos = false;  // higher condition must dominate
      if (lo[x] > hi[x] + tol) neg = false;
    }
  }
  if (pos && neg) return Sign::Zero;
  if (pos) return Sign::Positive;
  if (neg) return Sign::Negative;
  return Sign::Ambiguous;
}

Sign exact_sign(const BayesNet& net, NodeId decision, NodeId target,
                double cell_cap, double tol) {
  const ExactCdfs cdfs = exact_conditional_cdfs(net, target, decision, cell_cap);
  return sign_of_cdf_family(cdfs.per_decision_state, tol);
}

}  // namespace qpnet
