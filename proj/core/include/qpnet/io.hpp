#pragma once

#include <string>

#include "qpnet/bayes_net.hpp"
#include "qpnet/qpn.hpp"

namespace qpnet {

// Network document: fields `variables` (list of {name, states}), `arcs`
// (list of [parent, child] name pairs), and `cpts` (map from child name to
// a list of {given: map parent name -> state label, dist: probabilities in
// child state order}). Parsing rejects malformed or invalid documents with
// PARSE_ERROR, naming the violated invariant.
std::string net_to_json(const BayesNet& net);
BayesNet net_from_json(const std::string& text);
void save_net(const BayesNet& net, const std::string& path);
BayesNet load_net(const std::string& path);

// Influence-graph document: the same structure with `cpts` replaced by
// `signs`, a map from "parent->child" to one of "+", "-", "0", "?".
std::string qpn_to_json(const Qpn& qpn);
Qpn qpn_from_json(const std::string& text);
void save_qpn(const Qpn& qpn, const std::string& path);
Qpn load_qpn(const std::string& path);

}  // namespace qpnet
