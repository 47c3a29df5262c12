#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qpnet/bayes_net.hpp"
#include "qpnet/bounds.hpp"
#include "qpnet/harness.hpp"
#include "qpnet/io.hpp"
#include "qpnet/netgen.hpp"
#include "qpnet/reduction.hpp"
#include "qpnet/types.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitAmbiguous = 2;

qpnet::NodeId find_node(const qpnet::BayesNet& net, const std::string& name) {
  if (auto id = net.find(name)) return *id;
  throw qpnet::Error(qpnet::ErrorCode::UnknownNode, "no variable named '" + name + "'");
}

qpnet::StrategyKind parse_strategy(const std::string& text) {
  if (text == "x-first") return qpnet::StrategyKind::ReduceXFirst;
  if (text == "y-first") return qpnet::StrategyKind::ReduceYFirst;
  throw qpnet::Error(qpnet::ErrorCode::InvalidArgument, "unknown strategy '" + text + "'");
}

qpnet::Resolver parse_resolver(const std::string& text) {
  if (text == "marginalize") return qpnet::Resolver::Marginalize;
  if (text == "issa") return qpnet::Resolver::Issa;
  throw qpnet::Error(qpnet::ErrorCode::InvalidArgument, "unknown resolver '" + text + "'");
}

int cmd_validate(const std::string& file) {
  qpnet::BayesNet net = qpnet::load_net(file);
  std::printf("OK: %zu variables, %zu arcs\n", net.node_count(), net.arc_count());
  return kExitOk;
}

int cmd_query(const std::string& file, const std::string& decision, const std::string& target,
              const std::string& strategy, const std::string& resolver, std::uint64_t seed) {
  qpnet::BayesNet net = qpnet::load_net(file);
  qpnet::Strategy strat{parse_strategy(strategy), seed};
  qpnet::ResolutionResult result =
      qpnet::itor(net, find_node(net, decision), find_node(net, target), strat,
                  parse_resolver(resolver));
  std::printf("sign: %c\n", qpnet::sign_to_char(result.sign));
  std::printf("resolved_at: %s\n", qpnet::resolved_at_name(result.stats.resolved_at));
  std::printf("qualitative_passes: %zu\n", result.stats.qualitative_passes);
  std::printf("nodes_reduced: %zu\n", result.stats.nodes_reduced);
  std::printf("arc_reversals: %zu\n", result.stats.arc_reversals);
  std::printf("refinement_steps: %zu\n", result.stats.refinement_steps);
  return qpnet::is_decisive(result.sign) ? kExitOk : kExitAmbiguous;
}

int cmd_generate(std::uint32_t n, std::size_t l, std::uint32_t mc, std::uint64_t seed,
                 const std::string& out, std::size_t count) {
  qpnet::GenConfig config;
  config.n = n;
  config.l = l;
  config.mc = mc;
  config.seed = seed;
  if (count == 0) {
    qpnet::save_net(qpnet::generate_network(config), out);
    return kExitOk;
  }
  const auto entries = qpnet::generate_batch(config, count, out);
  std::printf("wrote %zu networks and manifest.json to %s\n", entries.size(), out.c_str());
  return kExitOk;
}

qpnet::Table1Config read_table1_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw qpnet::Error(qpnet::ErrorCode::ParseError, "cannot open '" + path + "'");
  }
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, true, true);
  qpnet::Table1Config config;
  config.n = doc.value("n", config.n);
  config.instances = doc.value("instances", config.instances);
  config.seed = doc.value("seed", config.seed);
  config.strategy = parse_strategy(doc.value("strategy", std::string("x-first")));
  config.resolver = parse_resolver(doc.value("resolver", std::string("marginalize")));
  if (!doc.contains("l_list") || !doc.contains("mc_list")) {
    throw qpnet::Error(qpnet::ErrorCode::ParseError,
                       "table1 config needs 'l_list' and 'mc_list' arrays");
  }
  config.l_list = doc.at("l_list").get<std::vector<std::size_t>>();
  config.mc_list = doc.at("mc_list").get<std::vector<std::uint32_t>>();
  return config;
}

int cmd_table1(const std::string& config_path, const std::string& out) {
  qpnet::Table1Config config = read_table1_config(config_path);
  std::string csv = qpnet::render_table1_csv(qpnet::run_table1(config));
  std::ofstream sink(out, std::ios::binary);
  if (!sink) {
    throw qpnet::Error(qpnet::ErrorCode::ParseError, "cannot open '" + out + "'");
  }
  sink << csv;
  return kExitOk;
}

int cmd_issa(const std::string& file, const std::string& decision, const std::string& target) {
  qpnet::BayesNet net = qpnet::load_net(file);
  qpnet::NodeId d = find_node(net, decision);
  qpnet::NodeId t = find_node(net, target);
  qpnet::IssaResult result = qpnet::issa_resolve(net, d, t);
  std::printf("sign: %c\n", qpnet::sign_to_char(result.sign));
  std::printf("refinement_steps: %zu\n", result.refinement_steps);
  const auto& states = net.variable(d).states;
  for (std::size_t k = 0; k < result.bounds.lower.size(); ++k) {
    const char* label = k < states.size() ? states[k].c_str() : "?";
    if (!result.bounds.lower[k] || !result.bounds.upper[k]) {
      std::printf("state %s: unreachable\n", label);
      continue;
    }
    std::printf("state %s: lower", label);
    for (double v : *result.bounds.lower[k]) std::printf(" %.10g", v);
    std::printf(" upper");
    for (double v : *result.bounds.upper[k]) std::printf(" %.10g", v);
    std::printf("\n");
  }
  return qpnet::is_decisive(result.sign) ? kExitOk : kExitAmbiguous;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qualitative influence queries over discrete Bayesian networks"};
  app.require_subcommand(1);

  std::string validate_file;
  auto* validate = app.add_subcommand("validate", "check a network file against the format");
  validate->add_option("file", validate_file, "network file")->required();

  std::string query_file, query_decision, query_target;
  std::string query_strategy = "x-first";
  std::string query_resolver = "marginalize";
  std::uint64_t query_seed = 0;
  auto* query = app.add_subcommand("query", "resolve the influence of one variable on another");
  query->add_option("file", query_file, "network file")->required();
  query->add_option("--decision", query_decision, "decision variable name")->required();
  query->add_option("--target", query_target, "target variable name")->required();
  query->add_option("--strategy", query_strategy, "node selection strategy")
      ->check(CLI::IsMember({"x-first", "y-first"}));
  query->add_option("--resolver", query_resolver, "ambiguity resolver")
      ->check(CLI::IsMember({"marginalize", "issa"}));
  query->add_option("--seed", query_seed, "seed for the adjacent-node fallback");

  std::uint32_t gen_n = 10;
  std::size_t gen_l = 15;
  std::uint32_t gen_mc = 2;
  std::uint64_t gen_seed = 0;
  std::size_t gen_count = 0;
  std::string gen_out;
  auto* generate = app.add_subcommand("generate", "write a random sign-consistent network");
  generate->add_option("--n", gen_n, "node count");
  generate->add_option("--l", gen_l, "arc count");
  generate->add_option("--mc", gen_mc, "maximum states per variable");
  generate->add_option("--seed", gen_seed, "generator seed");
  generate->add_option("--count", gen_count,
                       "emit this many networks into --out as a directory with a manifest");
  generate->add_option("--out", gen_out, "output file, or directory when --count is given")
      ->required();

  std::string table1_config, table1_out;
  auto* table1 = app.add_subcommand("table1", "run the batch experiment and write a CSV");
  table1->add_option("--config", table1_config, "experiment config file")->required();
  table1->add_option("--out", table1_out, "output CSV path")->required();

  std::string issa_file, issa_decision, issa_target;
  auto* issa = app.add_subcommand("issa", "resolve a query by iterative state aggregation");
  issa->add_option("file", issa_file, "network file")->required();
  issa->add_option("--decision", issa_decision, "decision variable name")->required();
  issa->add_option("--target", issa_target, "target variable name")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (validate->parsed()) return cmd_validate(validate_file);
    if (query->parsed()) {
      return cmd_query(query_file, query_decision, query_target, query_strategy, query_resolver,
                       query_seed);
    }
    if (generate->parsed()) {
      return cmd_generate(gen_n, gen_l, gen_mc, gen_seed, gen_out, gen_count);
    }
    if (table1->parsed()) return cmd_table1(table1_config, table1_out);
    if (issa->parsed()) return cmd_issa(issa_file, issa_decision, issa_target);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
