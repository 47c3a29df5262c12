#include "qpnet/harness.hpp"

#include <chrono>
#include <cstdio>

#include "qpnet/exact.hpp"

namespace qpnet {

std::pair<double, double> compute_ratios(const ResolutionStats& incremental,
                                         const ResolutionStats& baseline) {
  const double nodes_den = static_cast<double>(baseline.nodes_reduced);
  const double r_nodes =
      nodes_den == 0.0 ? 1.0 : static_cast<double>(incremental.nodes_reduced) / nodes_den;

  const double reversals_den = static_cast<double>(incremental.arc_reversals +
                                                   incremental.residual_completion_reversals);
  const double r_reversals =
      reversals_den == 0.0 ? 1.0
                           : static_cast<double>(incremental.arc_reversals) / reversals_den;
  return {r_nodes, r_reversals};
}

std::optional<ExperimentRecord> run_instance(const GenConfig& config, StrategyKind strategy,
                                             Resolver resolver) {
  const BayesNet net = generate_network(config);
  const NodeId decision = *net.find("node1");
  const NodeId target = *net.find("node" + std::to_string(config.n));

  const BayesNet pruned = prune_irrelevant(net, decision, target);
  const Sign exact = exact_sign(pruned, decision, target);
  if (exact == Sign::Ambiguous) return std::nullopt;

  ExperimentRecord record;
  record.seed = config.seed;
  record.config = config;
  record.pruned_nodes = pruned.node_count();
  record.pruned_links = pruned.arc_count();
  record.exact = exact;
  record.strategy = strategy;
  record.resolver = resolver;

  const auto start = std::chrono::steady_clock::now();
  const ResolutionResult result =
      itor(pruned, decision, target, Strategy{strategy, config.seed}, resolver);
  record.wall_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
          .count();

  const ResolutionResult baseline = full_numeric_reduce(pruned, decision, target);
  const auto [r_nodes, r_reversals] = compute_ratios(result.stats, baseline.stats);
  record.resolved = result.sign;
  record.r_nodes = r_nodes;
  record.r_reversals = r_reversals;
  record.resolved_at = result.stats.resolved_at;
  return record;
}

std::vector<Table1Row> run_table1(const Table1Config& config) {
  // Odd step so repeated reseeding walks the whole 2^64 space.
  constexpr std::uint64_t kReseedStep = 0x9e3779b97f4a7c15ULL;

  std::vector<Table1Row> rows;
  for (const std::size_t l : config.l_list) {
    for (const std::uint32_t mc : config.mc_list) {
      Table1Row row;
      row.l = l;
      row.mc = mc;
      double nodes_sum = 0.0;
      double links_sum = 0.0;
      double r_nodes_sum = 0.0;
      double r_reversals_sum = 0.0;
      for (std::size_t i = 0; i < config.instances; ++i) {
        GenConfig gen{config.n, l, mc, config.seed + i};
        std::optional<ExperimentRecord> record;
        while (true) {
          try {
            record = run_instance(gen, config.strategy, config.resolver);
            break;
          } catch (const Error& err) {
            if (err.code() != ErrorCode::GenerationFailure) throw;
            gen.seed += kReseedStep;
          }
        }
        if (!record) {
          ++row.discarded;
          continue;
        }
        ++row.kept;
        nodes_sum += static_cast<double>(record->pruned_nodes);
        links_sum += static_cast<double>(record->pruned_links);
        r_nodes_sum += record->r_nodes;
        r_reversals_sum += record->r_reversals;
      }
      if (row.kept > 0) {
        const double kept = static_cast<double>(row.kept);
        row.nodes_avg = nodes_sum / kept;
        row.links_avg = links_sum / kept;
        row.r_nodes = r_nodes_sum / kept;
        row.r_reversals = r_reversals_sum / kept;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::string render_table1_csv(const std::vector<Table1Row>& rows) {
  std::string csv =
      "nodes_avg,links_avg,mc,r_nodes,r_reversals,instances_kept,instances_discarded\n";
  char line[160];
  for (const Table1Row& row : rows) {
    std::snprintf(line, sizeof(line), "%.1f,%.1f,%u,%.3f,%.3f,%zu,%zu\n", row.nodes_avg,
                  row.links_avg, row.mc, row.r_nodes, row.r_reversals, row.kept,
                  row.discarded);
    csv += line;
  }
  return csv;
}

}  // namespace qpnet
