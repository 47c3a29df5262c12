#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qpnet/bayes_net.hpp"
#include "qpnet/netgen.hpp"
#include "qpnet/reduction.hpp"
#include "qpnet/types.hpp"

namespace qpnet {

struct ExperimentRecord {
  std::uint64_t seed = 0;
  GenConfig config;
  std::size_t pruned_nodes = 0;
  std::size_t pruned_links = 0;
  Sign exact = Sign::Ambiguous;
  Sign resolved = Sign::Ambiguous;
  double r_nodes = 1.0;
  double r_reversals = 1.0;
  double wall_ms = 0.0;  // not serialized; reruns must stay byte-identical
  StrategyKind strategy = StrategyKind::ReduceXFirst;
  Resolver resolver = Resolver::Marginalize;
  ResolvedAt resolved_at = ResolvedAt::AfterReduction;
};

// R_nodes = nodes reduced incrementally / nodes reduced by the full numeric
// baseline; R_reversals = reversals done incrementally / reversals after
// also completing the residual network. Zero denominators (2-node pruned
// nets) define the ratio as 1.
std::pair<double, double> compute_ratios(const ResolutionStats& incremental,
                                         const ResolutionStats& baseline);

// Generates one instance, queries node1 -> nodeN on the pruned network, and
// resolves it incrementally. Returns nullopt when the exact sign is
// ambiguous (such instances are discarded from the experiment tables).
// Propagates GENERATION_FAILURE.
std::optional<ExperimentRecord> run_instance(const GenConfig& config, StrategyKind strategy,
                                             Resolver resolver);

struct Table1Config {
  std::uint32_t n = 10;
  std::vector<std::size_t> l_list;
  std::vector<std::uint32_t> mc_list;
  std::size_t instances = 1000;
  StrategyKind strategy = StrategyKind::ReduceXFirst;
  Resolver resolver = Resolver::Marginalize;
  std::uint64_t seed = 0;
};

struct Table1Row {
  std::size_t l = 0;
  std::uint32_t mc = 2;
  double nodes_avg = 0.0;
  double links_avg = 0.0;
  double r_nodes = 0.0;
  double r_reversals = 0.0;
  std::size_t kept = 0;
  std::size_t discarded = 0;
};

// One row per (l, mc) pair: per-instance seeds derive as seed + index, a
// failed generation reseeds deterministically, ambiguous-exact instances
// count as discarded, and the averages cover kept instances only.
std::vector<Table1Row> run_table1(const Table1Config& config);

// CSV with the pinned column set; byte-identical across reruns.
std::string render_table1_csv(const std::vector<Table1Row>& rows);

}  // namespace qpnet
