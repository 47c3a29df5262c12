#pragma once

#include <cstdint>

#include "qpnet/bayes_net.hpp"
#include "qpnet/qpn.hpp"

namespace testsupport {

// x -> y with Pr(x)=0.4, Pr(y|x)=0.9, Pr(y|~x)=0.2; the hand-checked arc
// reversal instance (new marginal 0.48, conditionals 0.75 and 1/13).
qpnet::BayesNet two_node_net();

// d -> t with Pr(t|d)=0.8, Pr(t|~d)=0.3; conditional CDFs (0.2,1) and
// (0.7,1), a positive influence.
qpnet::BayesNet dominance_pair_net();

// Chain d -> x -> t with Pr(d)=0.3, Pr(x|d)=0.8, Pr(x|~d)=0.4, Pr(t|x)=0.7,
// Pr(t|~x)=0.2; F(t|d)=(0.4,1), F(t|~d)=(0.6,1).
qpnet::BayesNet chain_net();

// w -> x -> z plus direct w -> z, positive path against a negative direct
// arc. Marginalizing x leaves w -> z with rows (0.455,0.545) / (0.145,0.855),
// so the combined influence is negative.
qpnet::BayesNet competing_paths_net();

// d -> t where the two conditional CDFs (0.2,0.9,1) and (0.4,0.5,1) cross;
// the influence is ambiguous and no reduction can help.
qpnet::BayesNet crossing_net();

// Immunization pattern: shots lower flu (-), raise soreness (+), and both
// flu and soreness lower wellbeing (-), so wellbeing resolves ambiguous.
qpnet::Qpn immunization_qpn();

// d -> m -> t decisive chain plus a direct d -> t arc whose rows cross, so
// the frontier lands on the target with the decision as message source and
// node selection must fall back to the seeded adjacent pick (m).
qpnet::BayesNet direct_conflict_net();

// d -> y -> x plus d -> x with a strong direct effect and a weak mediator,
// so envelope bounds certify the direction with no refinement.
qpnet::BayesNet separated_net();

// y -> x noise mediator plus d -> x rows that cross; exact evaluation is
// ambiguous and envelope refinement must confirm it.
qpnet::BayesNet crossing_mediator_net();

// Aggregation-shaped networks with randomized signs and distributions:
// decision -> hub -> mediator(s) -> target, optionally a direct
// decision -> target arc. Realized through the sign-consistent generator.
qpnet::BayesNet mediated_net(std::uint64_t seed, bool two_mediators, bool direct_arc,
                             std::uint32_t mc = 4);

// decision -> mediator -> target (optional direct arc), the single-mediator
// variant.
qpnet::BayesNet single_mediator_net(std::uint64_t seed, bool direct_arc,
                                    std::uint32_t mc = 4);

}  // namespace testsupport
