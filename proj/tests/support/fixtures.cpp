#include "support/fixtures.hpp"

#include "qpnet/netgen.hpp"
#include "qpnet/rng.hpp"

namespace testsupport {

using qpnet::BayesNet;
using qpnet::NodeId;
using qpnet::Qpn;
using qpnet::Sign;

BayesNet two_node_net() {
  BayesNet net;
  NodeId x = net.add_variable("x", {"false", "true"});
  NodeId y = net.add_variable("y", {"false", "true"});
  net.set_family(x, {}, {0.6, 0.4});
  net.set_family(y, {x}, {0.8, 0.2, 0.1, 0.9});
  return net;
}

BayesNet dominance_pair_net() {
  BayesNet net;
  NodeId d = net.add_variable("d", {"false", "true"});
  NodeId t = net.add_variable("t", {"false", "true"});
  net.set_family(d, {}, {0.5, 0.5});
  net.set_family(t, {d}, {0.7, 0.3, 0.2, 0.8});
  return net;
}

BayesNet chain_net() {
  BayesNet net;
  NodeId d = net.add_variable("d", {"false", "true"});
  NodeId x = net.add_variable("x", {"false", "true"});
  NodeId t = net.add_variable("t", {"false", "true"});
  net.set_family(d, {}, {0.7, 0.3});
  net.set_family(x, {d}, {0.6, 0.4, 0.2, 0.8});
  net.set_family(t, {x}, {0.8, 0.2, 0.3, 0.7});
  return net;
}

BayesNet competing_paths_net() {
  BayesNet net;
  NodeId w = net.add_variable("w", {"false", "true"});
  NodeId x = net.add_variable("x", {"false", "true"});
  NodeId z = net.add_variable("z", {"false", "true"});
  net.set_family(w, {}, {0.5, 0.5});
  net.set_family(x, {w}, {0.9, 0.1, 0.1, 0.9});
  // Rows over (w, x): positive in x within each w, negative in w within
  // each x; the direct negative arc outweighs the positive path.
  net.set_family(z, {w, x},
                 {0.15, 0.85, 0.10, 0.90, 0.50, 0.50, 0.45, 0.55});
  return net;
}

BayesNet crossing_net() {
  BayesNet net;
  NodeId d = net.add_variable("d", {"false", "true"});
  NodeId t = net.add_variable("t", {"low", "mid", "high"});
  net.set_family(d, {}, {0.5, 0.5});
  net.set_family(t, {d}, {0.4, 0.1, 0.5, 0.2, 0.7, 0.1});
  return net;
}

Qpn immunization_qpn() {
  Qpn qpn;
  qpn.nodes = {{0, "shots"}, {1, "flu"}, {2, "soreness"}, {3, "wellbeing"}};
  qpn.arc_signs[{0, 1}] = Sign::Negative;
  qpn.arc_signs[{0, 2}] = Sign::Positive;
  qpn.arc_signs[{1, 3}] = Sign::Negative;
  qpn.arc_signs[{2, 3}] = Sign::Negative;
  return qpn;
}

BayesNet direct_conflict_net() {
  BayesNet net;
  NodeId d = net.add_variable("d", {"false", "true"});
  NodeId m = net.add_variable("m", {"false", "true"});
  NodeId t = net.add_variable("t", {"low", "mid", "high"});
  net.set_family(d, {}, {0.5, 0.5});
  net.set_family(m, {d}, {0.7, 0.3, 0.3, 0.7});
  net.set_family(t, {d, m},
                 {0.4, 0.1, 0.5,
                  0.3, 0.1, 0.6,
                  0.2, 0.7, 0.1,
                  0.1, 0.7, 0.2});
  return net;
}

BayesNet separated_net() {
  BayesNet net;
  NodeId d = net.add_variable("d", {"false", "true"});
  NodeId y = net.add_variable("y", {"false", "true"});
  NodeId x = net.add_variable("x", {"false", "true"});
  net.set_family(d, {}, {0.5, 0.5});
  net.set_family(y, {d}, {0.52, 0.48, 0.48, 0.52});
  net.set_family(x, {d, y},
                 {0.92, 0.08, 0.88, 0.12, 0.12, 0.88, 0.08, 0.92});
  return net;
}

BayesNet crossing_mediator_net() {
  BayesNet net;
  NodeId d = net.add_variable("d", {"false", "true"});
  NodeId y = net.add_variable("y", {"a", "b", "c"});
  NodeId x = net.add_variable("x", {"low", "mid", "high"});
  net.set_family(d, {}, {0.5, 0.5});
  net.set_family(y, {}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  net.set_family(x, {d, y},
                 {0.40, 0.10, 0.50,
                  0.42, 0.10, 0.48,
                  0.38, 0.12, 0.50,
                  0.20, 0.70, 0.10,
                  0.22, 0.68, 0.10,
                  0.18, 0.70, 0.12});
  return net;
}

namespace {

BayesNet realize_pattern(const qpnet::Dag& dag, std::uint64_t seed, std::uint32_t mc) {
  qpnet::Rng rng(seed);
  Qpn qpn = qpnet::assign_random_signs(dag, rng);
  return qpnet::realize_bayes_net(qpn, mc, rng);
}

}  // namespace

BayesNet mediated_net(std::uint64_t seed, bool two_mediators, bool direct_arc,
                      std::uint32_t mc) {
  qpnet::Dag dag;
  if (two_mediators) {
    dag.nodes = 5;
    dag.arcs = {{0, 1}, {1, 2}, {1, 3}, {2, 4}, {3, 4}};
    if (direct_arc) dag.arcs.insert({0, 4});
  } else {
    dag.nodes = 4;
    dag.arcs = {{0, 1}, {1, 2}, {2, 3}};
    if (direct_arc) dag.arcs.insert({0, 3});
  }
  return realize_pattern(dag, seed, mc);
}

BayesNet single_mediator_net(std::uint64_t seed, bool direct_arc, std::uint32_t mc) {
  qpnet::Dag dag;
  dag.nodes = 3;
  dag.arcs = {{0, 1}, {1, 2}};
  if (direct_arc) dag.arcs.insert({0, 2});
  return realize_pattern(dag, seed, mc);
}

}  // namespace testsupport
