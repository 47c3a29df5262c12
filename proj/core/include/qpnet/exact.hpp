#pragma once

#include <optional>
#include <vector>

#include "qpnet/bayes_net.hpp"
#include "qpnet/types.hpp"

namespace qpnet {

struct ExactCdfs {
  // Indexed by decision state. A missing entry means the decision state has
  // zero probability, so conditioning on it is undefined.
  std::vector<std::optional<CdfVector>> per_decision_state;

  bool all_defined() const {
    for (const auto& cdf : per_decision_state) {
      if (!cdf) return false;
    }
    return true;
  }
};

// Conditional CDFs of the target given each decision state, computed by
// summing the full joint distribution. Throws TOO_LARGE when the joint state
// space exceeds `cell_cap` cells.
ExactCdfs exact_conditional_cdfs(const BayesNet& net, NodeId target, NodeId decision,
                                 double cell_cap = kDefaultEnumerationCap);

// Query-level influence sign of the decision on the target, lifted to
// multi-state decisions by first-order dominance over every pair of decision
// states. Decisive signs require at least one strict pointwise inequality;
// dominance that holds everywhere within `tol` in both directions is Zero.
// Zero-probability decision states are excluded from the comparison.
Sign exact_sign(const BayesNet& net, NodeId decision, NodeId target,
                double cell_cap = kDefaultEnumerationCap, double tol = kProbTol);

// Sign relation between two CDF families indexed by an ordered condition
// (adjacent pairs compared; undefined entries skipped). Shared by exact_sign
// and the bound-based resolver's exactness checks.
Sign sign_of_cdf_family(const std::vector<std::optional<CdfVector>>& cdfs, double tol = kProbTol);

}  // namespace qpnet
