#pragma once

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qpnet/bayes_net.hpp"
#include "qpnet/qpn.hpp"
#include "qpnet/rng.hpp"
#include "qpnet/types.hpp"

namespace qpnet {

struct GenConfig {
  std::uint32_t n = 2;   // node count
  std::size_t l = 1;     // arc count, within [n-1, n(n-1)/2]
  std::uint32_t mc = 2;  // maximum state-space cardinality
  std::uint64_t seed = 0;
};

// Throws INVALID_ARGUMENT when the counts are out of range.
void validate_config(const GenConfig& config);

struct Dag {
  std::uint32_t nodes = 0;  // ids 0..nodes-1, arcs oriented low -> high
  std::set<Arc> arcs;
};

// Starts from the complete DAG and removes arcs in a random order, skipping
// any arc whose removal would disconnect the underlying undirected graph,
// until exactly l arcs remain.
Dag random_connected_dag(std::uint32_t n, std::size_t l, Rng& rng);
Dag random_connected_dag(const GenConfig& config);

// Each arc gets POSITIVE or NEGATIVE with equal probability. Nodes are
// named node1..nodeN.
Qpn assign_random_signs(const Dag& dag, Rng& rng);
Qpn assign_random_signs(const Dag& dag, std::uint64_t seed);

// Whether CPT row p must stochastically dominate row q under the per-parent
// signs: componentwise >= on the parent states, with the comparison
// reversed for NEGATIVE parents.
bool config_dominates(const std::vector<Sign>& signs, std::span<const std::uint32_t> p,
                      std::span<const std::uint32_t> q);

struct DominanceOrder {
  // The configuration whose distribution must dominate every other row.
  std::vector<std::uint32_t> maximal;
  // Row indices, most dominant first: a linear extension of the dominance
  // order (descending count of dominated rows, ties by ascending index), so
  // every row is sampled after all rows that constrain it.
  std::vector<std::size_t> assignment_order;
};

DominanceOrder dominance_order(const std::vector<Sign>& signs,
                               const std::vector<std::uint32_t>& cards);

// Builds a network honoring the QPN's structure and arc signs: state counts
// uniform in [2, mc], priors sampled uniform then normalized, and each CPT
// assigned most-dominant-row first with every later row sampled in CDF
// space above the pointwise floor of its already-assigned dominators.
// Verifies every arc sign via arc_sign, retrying with fresh randomness and
// throwing GENERATION_FAILURE after 100 failed attempts.
BayesNet realize_bayes_net(const Qpn& qpn, std::uint32_t mc, Rng& rng);
BayesNet realize_bayes_net(const Qpn& qpn, std::uint32_t mc, std::uint64_t seed);

// One-call pipeline: DAG, signs, realization, all drawn from config.seed.
BayesNet generate_network(const GenConfig& config);

struct BatchEntry {
  std::uint64_t seed = 0;  // the seed the instance was realized with
  GenConfig config;
  std::string path;  // file name relative to the batch directory
};

// Writes `count` networks into `dir` (created if absent) as net_<index>.json
// plus a manifest.json listing seed, config, and path per instance.
// Per-instance seeds derive as config.seed + index; a GENERATION_FAILURE
// reseeds deterministically and the manifest records the seed that
// succeeded. Returns the manifest entries in index order.
std::vector<BatchEntry> generate_batch(const GenConfig& config, std::size_t count,
                                       const std::string& dir);

}  // namespace qpnet
