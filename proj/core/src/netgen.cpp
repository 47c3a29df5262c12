#include "qpnet/netgen.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <string>
#include <utility>

#include "json.hpp"

#include "qpnet/io.hpp"

namespace qpnet {

void validate_config(const GenConfig& config) {
  if (config.n < 2) {
    throw Error(ErrorCode::InvalidArgument, "need at least two nodes");
  }
  const std::size_t max_arcs = static_cast<std::size_t>(config.n) * (config.n - 1) / 2;
  if (config.l + 1 < config.n || config.l > max_arcs) {
    throw Error(ErrorCode::InvalidArgument, "arc count outside [n-1, n(n-1)/2]");
  }
  if (config.mc < 2) {
    throw Error(ErrorCode::InvalidArgument, "maximum cardinality must be at least 2");
  }
}

namespace {

bool still_connected(const std::set<Arc>& arcs, std::uint32_t n, const Arc& removed) {
  std::vector<std::vector<std::uint32_t>> adj(n);
  for (const Arc& arc : arcs) {
    if (arc == removed) continue;
    adj[arc.first].push_back(arc.second);
    adj[arc.second].push_back(arc.first);
  }
  std::vector<char> seen(n, 0);
  std::vector<std::uint32_t> stack{removed.first};
  seen[removed.first] = 1;
  while (!stack.empty()) {
    const std::uint32_t u = stack.back();
    stack.pop_back();
    if (u == removed.second) return true;
    for (std::uint32_t v : adj[u]) {
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return false;
}

}  // namespace

Dag random_connected_dag(std::uint32_t n, std::size_t l, Rng& rng) {
  Dag dag;
  dag.nodes = n;
  std::vector<Arc> order;
  for (std::uint32_t i = 0; i < n; ++i) {
    for (std::uint32_t j = i + 1; j < n; ++j) {
      dag.arcs.insert({i, j});
      order.push_back({i, j});
    }
  }
  // A uniform shuffle stands in for distinct random arc numbers; traversal
  // order is then the descending-number removal order.
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = uniform_int(rng, 0, i - 1);
    std::swap(order[i - 1], order[j]);
  }
  for (const Arc& arc : order) {
    if (dag.arcs.size() == l) break;
    if (still_connected(dag.arcs, n, arc)) dag.arcs.erase(arc);
  }
  return dag;
}

Dag random_connected_dag(const GenConfig& config) {
  validate_config(config);
  Rng rng(config.seed);
  return random_connected_dag(config.n, config.l, rng);
}

Qpn assign_random_signs(const Dag& dag, Rng& rng) {
  Qpn qpn;
  for (std::uint32_t i = 0; i < dag.nodes; ++i) {
    qpn.nodes.push_back({i, "node" + std::to_string(i + 1)});
  }
  for (const Arc& arc : dag.arcs) {
    qpn.arc_signs.emplace(arc, uniform01(rng) < 0.5 ? Sign::Positive : Sign::Negative);
  }
  return qpn;
}

Qpn assign_random_signs(const Dag& dag, std::uint64_t seed) {
  Rng rng(seed);
  return assign_random_signs(dag, rng);
}

bool config_dominates(const std::vector<Sign>& signs, std::span<const std::uint32_t> p,
                      std::span<const std::uint32_t> q) {
  for (std::size_t k = 0; k < signs.size(); ++k) {
    const bool ge = signs[k] == Sign::Negative ? p[k] <= q[k] : p[k] >= q[k];
    if (!ge) return false;
  }
  return true;
}

DominanceOrder dominance_order(const std::vector<Sign>& signs,
                               const std::vector<std::uint32_t>& cards) {
  DominanceOrder order;
  order.maximal.reserve(signs.size());
  for (std::size_t k = 0; k < signs.size(); ++k) {
    order.maximal.push_back(signs[k] == Sign::Negative ? 0 : cards[k] - 1);
  }

  std::size_t rows = 1;
  for (std::uint32_t c : cards) rows *= c;

  // Rows this configuration dominates: the product, over parents, of the
  // states each coordinate dominates or equals, minus the row itself.
  std::vector<std::size_t> dominated(rows);
  std::vector<std::uint32_t> config(signs.size(), 0);
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t rest = r;
    for (std::size_t k = signs.size(); k-- > 0;) {
      config[k] = static_cast<std::uint32_t>(rest % cards[k]);
      rest /= cards[k];
    }
    std::size_t count = 1;
    for (std::size_t k = 0; k < signs.size(); ++k) {
      count *= signs[k] == Sign::Negative ? cards[k] - config[k] : config[k] + 1;
    }
    dominated[r] = count - 1;
  }

  order.assignment_order.resize(rows);
  std::iota(order.assignment_order.begin(), order.assignment_order.end(), std::size_t{0});
  std::sort(order.assignment_order.begin(), order.assignment_order.end(),
            [&dominated](std::size_t a, std::size_t b) {
              if (dominated[a] != dominated[b]) return dominated[a] > dominated[b];
              return a < b;
            });
  return order;
}

namespace {

constexpr double kStrictGap = 1e-6;

std::vector<double> sample_uniform_normalized(std::uint32_t card, Rng& rng) {
  std::vector<double> probs(card);
  double sum = 0.0;
  while (sum <= 0.0) {
    sum = 0.0;
    for (double& p : probs) {
      p = uniform01(rng);
      sum += p;
    }
  }
  for (double& p : probs) p /= sum;
  return probs;
}

// CDF-space sampling above the pointwise floor of the dominating rows,
// nudged kStrictGap over the floor where the interval allows, final
// coordinate pinned to 1.
CdfVector sample_dominated_cdf(const CdfVector& floor_cdf, Rng& rng) {
  CdfVector cdf(floor_cdf.size());
  double prev = 0.0;
  for (std::size_t t = 0; t + 1 < cdf.size(); ++t) {
    double want = floor_cdf[t] + kStrictGap;
    if (want > 1.0) want = floor_cdf[t];
    cdf[t] = uniform_real(rng, std::max(prev, want), 1.0);
    prev = cdf[t];
  }
  cdf.back() = 1.0;
  return cdf;
}

CdfVector to_cdf(const std::vector<double>& probs) {
  CdfVector cdf(probs.size());
  double run = 0.0;
  for (std::size_t t = 0; t < probs.size(); ++t) {
    run += probs[t];
    cdf[t] = run;
  }
  cdf.back() = 1.0;
  return cdf;
}

std::vector<double> to_probs(const CdfVector& cdf) {
  std::vector<double> probs(cdf.size());
  double prev = 0.0;
  for (std::size_t t = 0; t < cdf.size(); ++t) {
    probs[t] = cdf[t] - prev;
    prev = cdf[t];
  }
  return probs;
}

BayesNet realize_once(const Qpn& qpn, std::uint32_t mc, Rng& rng) {
  std::vector<Variable> vars;
  vars.reserve(qpn.nodes.size());
  for (const Qpn::Node& node : qpn.nodes) {
    const std::uint32_t card = static_cast<std::uint32_t>(uniform_int(rng, 2, mc));
    Variable var;
    var.id = node.id;
    var.name = node.name;
    for (std::uint32_t s = 0; s < card; ++s) var.states.push_back("s" + std::to_string(s));
    vars.push_back(std::move(var));
  }
  std::map<NodeId, std::uint32_t> cards;
  for (const Variable& var : vars) cards.emplace(var.id, var.card());

  std::set<Arc> arcs;
  for (const auto& [arc, sign] : qpn.arc_signs) arcs.insert(arc);

  std::map<NodeId, Cpt> cpts;
  for (const Variable& var : vars) {
    const std::vector<NodeId> parents = qpn.parents(var.id);
    if (parents.empty()) {
      Cpt cpt({}, {}, var.card());
      cpt.set_row(0, sample_uniform_normalized(var.card(), rng));
      cpts.emplace(var.id, std::move(cpt));
      continue;
    }

    std::vector<Sign> signs;
    std::vector<std::uint32_t> parent_cards;
    for (NodeId p : parents) {
      signs.push_back(qpn.arc_signs.at({p, var.id}));
      parent_cards.push_back(cards.at(p));
    }

    Cpt cpt(parents, parent_cards, var.card());
    const DominanceOrder order = dominance_order(signs, parent_cards);
    std::vector<CdfVector> cdfs(cpt.row_count());
    for (std::size_t pos = 0; pos < order.assignment_order.size(); ++pos) {
      const std::size_t r = order.assignment_order[pos];
      if (pos == 0) {
        const std::vector<double> probs = sample_uniform_normalized(var.card(), rng);
        cdfs[r] = to_cdf(probs);
        cpt.set_row(r, probs);
        continue;
      }
      std::vector<std::uint32_t> config = cpt.config_states(r);
      CdfVector floor_cdf(var.card(), 0.0);
      for (std::size_t k = 0; k < parents.size(); ++k) {
        std::vector<std::uint32_t> up = config;
        if (signs[k] == Sign::Negative) {
          if (config[k] == 0) continue;
          up[k] = config[k] - 1;
        } else {
          if (config[k] + 1 == parent_cards[k]) continue;
          up[k] = config[k] + 1;
        }
        const CdfVector& dom = cdfs[cpt.config_index(up)];
        for (std::size_t t = 0; t < floor_cdf.size(); ++t) {
          floor_cdf[t] = std::max(floor_cdf[t], dom[t]);
        }
      }
      cdfs[r] = sample_dominated_cdf(floor_cdf, rng);
      cpt.set_row(r, to_probs(cdfs[r]));
    }
    cpts.emplace(var.id, std::move(cpt));
  }

  return BayesNet::from_parts(std::move(vars), std::move(arcs), std::move(cpts));
}

}  // namespace

BayesNet realize_bayes_net(const Qpn& qpn, std::uint32_t mc, Rng& rng) {
  if (mc < 2) {
    throw Error(ErrorCode::InvalidArgument, "maximum cardinality must be at least 2");
  }
  for (const auto& [arc, sign] : qpn.arc_signs) {
    if (sign != Sign::Positive && sign != Sign::Negative) {
      throw Error(ErrorCode::InvalidArgument, "realization requires decisive arc signs");
    }
  }

  for (int attempt = 0; attempt < 100; ++attempt) {
    BayesNet net = realize_once(qpn, mc, rng);
    bool consistent = true;
    for (const auto& [arc, sign] : qpn.arc_signs) {
      if (arc_sign(net, arc.first, arc.second) != sign) {
        consistent = false;
        break;
      }
    }
    if (consistent) return net;
  }
  throw Error(ErrorCode::GenerationFailure, "could not realize a sign-consistent network");
}

BayesNet realize_bayes_net(const Qpn& qpn, std::uint32_t mc, std::uint64_t seed) {
  Rng rng(seed);
  return realize_bayes_net(qpn, mc, rng);
}

BayesNet generate_network(const GenConfig& config) {
  validate_config(config);
  Rng rng(config.seed);
  const Dag dag = random_connected_dag(config.n, config.l, rng);
  const Qpn qpn = assign_random_signs(dag, rng);
  return realize_bayes_net(qpn, config.mc, rng);
}

std::vector<BatchEntry> generate_batch(const GenConfig& config, std::size_t count,
                                       const std::string& dir) {
  // Odd step so repeated reseeding walks the whole 2^64 space.
  constexpr std::uint64_t kReseedStep = 0x9e3779b97f4a7c15ULL;

  validate_config(config);
  std::filesystem::create_directories(dir);

  std::vector<BatchEntry> entries;
  nlohmann::ordered_json manifest = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < count; ++i) {
    GenConfig instance = config;
    instance.seed = config.seed + i;
    BayesNet net;
    while (true) {
      try {
        net = generate_network(instance);
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::GenerationFailure) throw;
        instance.seed += kReseedStep;
      }
    }

    char name[32];
    std::snprintf(name, sizeof(name), "net_%04zu.json", i);
    save_net(net, (std::filesystem::path(dir) / name).string());

    BatchEntry entry;
    entry.seed = instance.seed;
    entry.config = instance;
    entry.path = name;
    entries.push_back(entry);
    manifest.push_back({{"seed", instance.seed},
                        {"config", {{"n", instance.n}, {"l", instance.l}, {"mc", instance.mc}}},
                        {"path", name}});
  }

  std::ofstream out(std::filesystem::path(dir) / "manifest.json",
                    std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::ParseError, "cannot open " + dir + "/manifest.json for writing");
  }
  out << manifest.dump(2) << "\n";
  return entries;
}

}  // namespace qpnet
