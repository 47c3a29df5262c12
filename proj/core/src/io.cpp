#include "qpnet/io.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <utility>
#include <vector>

#include "json.hpp"

namespace qpnet {

namespace {

using ordered_json = nlohmann::ordered_json;

std::map<NodeId, std::string> names_by_id(const BayesNet& net) {
  std::map<NodeId, std::string> names;
  for (NodeId id : net.node_ids()) names.emplace(id, net.variable(id).name);
  return names;
}

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorCode::ParseError, what);
}

const ordered_json& member(const ordered_json& doc, const char* key,
                           const char* container) {
  const auto it = doc.find(key);
  if (it == doc.end()) fail(std::string(container) + " document lacks '" + key + "'");
  return *it;
}

std::string text_of(const ordered_json& value, const std::string& what) {
  if (!value.is_string()) fail(what + " must be a string");
  return value.get<std::string>();
}

struct ParsedVariables {
  std::vector<Variable> vars;
  std::map<std::string, NodeId> ids;
};

ParsedVariables parse_variables(const ordered_json& list, bool with_states) {
  if (!list.is_array()) fail("'variables' must be a list");
  ParsedVariables out;
  NodeId next = 0;
  for (const ordered_json& entry : list) {
    if (!entry.is_object()) fail("variable entries must be objects");
    Variable var;
    var.id = next++;
    var.name = text_of(member(entry, "name", "variable"), "variable name");
    if (!out.ids.emplace(var.name, var.id).second) {
      fail("BAD_STATE_SPACE: duplicate variable name '" + var.name + "'");
    }
    if (with_states) {
      const ordered_json& states = member(entry, "states", "variable");
      if (!states.is_array()) fail("variable 'states' must be a list");
      std::set<std::string> seen;
      for (const ordered_json& state : states) {
        var.states.push_back(text_of(state, "state label"));
        if (!seen.insert(var.states.back()).second) {
          fail("BAD_STATE_SPACE: duplicate state label in '" + var.name + "'");
        }
      }
      if (var.states.size() < 2) {
        fail("BAD_STATE_SPACE: variable '" + var.name + "' needs at least two states");
      }
    }
    out.vars.push_back(std::move(var));
  }
  return out;
}

std::set<Arc> parse_arcs(const ordered_json& list, const std::map<std::string, NodeId>& ids) {
  if (!list.is_array()) fail("'arcs' must be a list");
  std::set<Arc> arcs;
  for (const ordered_json& entry : list) {
    if (!entry.is_array() || entry.size() != 2) {
      fail("arc entries must be [parent, child] pairs");
    }
    const std::string parent = text_of(entry[0], "arc parent");
    const std::string child = text_of(entry[1], "arc child");
    const auto pit = ids.find(parent);
    const auto cit = ids.find(child);
    if (pit == ids.end() || cit == ids.end()) {
      fail("PARENT_MISMATCH: arc references unknown variable '" +
           (pit == ids.end() ? parent : child) + "'");
    }
    if (pit->second == cit->second) fail("CYCLE: self arc on '" + parent + "'");
    arcs.insert({pit->second, cit->second});
  }
  return arcs;
}

}  // namespace

std::string net_to_json(const BayesNet& net) {
  const std::map<NodeId, std::string> names = names_by_id(net);

  ordered_json doc;
  doc["variables"] = ordered_json::array();
  for (NodeId id : net.node_ids()) {
    const Variable& var = net.variable(id);
    doc["variables"].push_back({{"name", var.name}, {"states", var.states}});
  }

  doc["arcs"] = ordered_json::array();
  for (const Arc& arc : net.arcs()) {
    doc["arcs"].push_back({names.at(arc.first), names.at(arc.second)});
  }

  doc["cpts"] = ordered_json::object();
  for (NodeId id : net.node_ids()) {
    const Cpt& cpt = net.cpt(id);
    ordered_json rows = ordered_json::array();
    for (std::size_t r = 0; r < cpt.row_count(); ++r) {
      ordered_json given = ordered_json::object();
      const std::vector<std::uint32_t> config = cpt.config_states(r);
      for (std::size_t k = 0; k < config.size(); ++k) {
        const Variable& parent = net.variable(cpt.parents()[k]);
        given[parent.name] = parent.states[config[k]];
      }
      const std::span<const double> row = cpt.row(r);
      rows.push_back({{"given", std::move(given)},
                      {"dist", std::vector<double>(row.begin(), row.end())}});
    }
    doc["cpts"][names.at(id)] = std::move(rows);
  }
  return doc.dump(2) + "\n";
}

BayesNet net_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(e.what());
  }
  if (!doc.is_object()) fail("network document must be an object");

  ParsedVariables parsed = parse_variables(member(doc, "variables", "network"), true);
  const std::set<Arc> arcs = parse_arcs(member(doc, "arcs", "network"), parsed.ids);

  std::map<NodeId, const Variable*> vars_by_id;
  for (const Variable& var : parsed.vars) vars_by_id.emplace(var.id, &var);
  std::map<NodeId, std::vector<NodeId>> parents_of;
  for (const Variable& var : parsed.vars) parents_of.emplace(var.id, std::vector<NodeId>{});
  for (const Arc& arc : arcs) parents_of.at(arc.second).push_back(arc.first);

  const ordered_json& cpts_doc = member(doc, "cpts", "network");
  if (!cpts_doc.is_object()) fail("'cpts' must be an object");
  for (const auto& [name, rows] : cpts_doc.items()) {
    if (parsed.ids.find(name) == parsed.ids.end()) {
      fail("PARENT_MISMATCH: cpts references unknown variable '" + name + "'");
    }
  }

  std::map<NodeId, Cpt> cpts;
  for (const Variable& var : parsed.vars) {
    const auto rows_it = cpts_doc.find(var.name);
    if (rows_it == cpts_doc.end()) {
      fail("MISSING_ROW: no cpt for variable '" + var.name + "'");
    }
    if (!rows_it->is_array()) fail("cpt rows must be a list");

    const std::vector<NodeId>& parents = parents_of.at(var.id);
    std::vector<std::uint32_t> parent_cards;
    for (NodeId p : parents) parent_cards.push_back(vars_by_id.at(p)->card());
    Cpt cpt(parents, parent_cards, var.card());

    std::vector<char> filled(cpt.row_count(), 0);
    for (const ordered_json& row : *rows_it) {
      if (!row.is_object()) fail("cpt rows must be objects");
      const ordered_json& given = member(row, "given", "cpt row");
      if (!given.is_object()) fail("'given' must be an object");
      if (given.size() != parents.size()) {
        fail("PARENT_MISMATCH: 'given' of '" + var.name + "' does not match its parents");
      }
      std::vector<std::uint32_t> config(parents.size());
      for (std::size_t k = 0; k < parents.size(); ++k) {
        const Variable& parent = *vars_by_id.at(parents[k]);
        const auto git = given.find(parent.name);
        if (git == given.end()) {
          fail("PARENT_MISMATCH: 'given' of '" + var.name + "' lacks parent '" +
               parent.name + "'");
        }
        const std::string state = text_of(*git, "state label");
        const auto sit = std::find(parent.states.begin(), parent.states.end(), state);
        if (sit == parent.states.end()) {
          fail("BAD_STATE_SPACE: unknown state '" + state + "' for '" + parent.name + "'");
        }
        config[k] = static_cast<std::uint32_t>(sit - parent.states.begin());
      }

      const ordered_json& dist = member(row, "dist", "cpt row");
      if (!dist.is_array() || dist.size() != var.card()) {
        fail("MISSING_ROW: dist of '" + var.name + "' must list one probability per state");
      }
      std::vector<double> probs;
      for (const ordered_json& p : dist) {
        if (!p.is_number()) fail("probabilities must be numbers");
        probs.push_back(p.get<double>());
      }

      const std::size_t idx = cpt.config_index(config);
      if (filled[idx]) {
        fail("MISSING_ROW: duplicate row for one configuration of '" + var.name + "'");
      }
      filled[idx] = 1;
      cpt.set_row(idx, probs);
    }
    for (char f : filled) {
      if (!f) fail("MISSING_ROW: '" + var.name + "' lacks a row for some configuration");
    }
    cpts.emplace(var.id, std::move(cpt));
  }

  BayesNet net = BayesNet::from_parts(std::move(parsed.vars), arcs, std::move(cpts));
  const ValidationReport report = validate_network(net);
  if (!report.ok()) {
    std::string all;
    for (const ValidationIssue& issue : report.issues) {
      if (!all.empty()) all += "; ";
      all += std::string(violation_name(issue.kind)) + ": " + issue.detail;
    }
    fail(all);
  }
  return net;
}

std::string qpn_to_json(const Qpn& qpn) {
  std::map<NodeId, std::string> names;
  for (const Qpn::Node& node : qpn.nodes) names.emplace(node.id, node.name);

  ordered_json doc;
  doc["variables"] = ordered_json::array();
  for (const Qpn::Node& node : qpn.nodes) {
    doc["variables"].push_back({{"name", node.name}});
  }
  doc["arcs"] = ordered_json::array();
  for (const auto& [arc, sign] : qpn.arc_signs) {
    doc["arcs"].push_back({names.at(arc.first), names.at(arc.second)});
  }
  doc["signs"] = ordered_json::object();
  for (const auto& [arc, sign] : qpn.arc_signs) {
    doc["signs"][names.at(arc.first) + "->" + names.at(arc.second)] =
        std::string(1, sign_to_char(sign));
  }
  return doc.dump(2) + "\n";
}

Qpn qpn_from_json(const std::string& text) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(e.what());
  }
  if (!doc.is_object()) fail("influence document must be an object");

  ParsedVariables parsed = parse_variables(member(doc, "variables", "influence"), false);
  const std::set<Arc> arcs = parse_arcs(member(doc, "arcs", "influence"), parsed.ids);

  std::map<NodeId, std::string> names;
  Qpn qpn;
  for (const Variable& var : parsed.vars) {
    qpn.nodes.push_back({var.id, var.name});
    names.emplace(var.id, var.name);
  }

  const ordered_json& signs = member(doc, "signs", "influence");
  if (!signs.is_object()) fail("'signs' must be an object");
  std::size_t matched = 0;
  for (const Arc& arc : arcs) {
    const std::string ascii = names.at(arc.first) + "->" + names.at(arc.second);
    const std::string arrow = names.at(arc.first) + "→" + names.at(arc.second);
    auto it = signs.find(ascii);
    if (it == signs.end()) it = signs.find(arrow);
    if (it == signs.end()) fail("no sign for arc '" + ascii + "'");
    const std::string mark = text_of(*it, "sign");
    if (mark.size() != 1) fail("signs must be one of +, -, 0, ?");
    qpn.arc_signs.emplace(arc, sign_from_char(mark[0]));
    ++matched;
  }
  if (matched != signs.size()) fail("'signs' names an arc that is not in 'arcs'");
  return qpn;
}

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::ParseError, "cannot open " + path + " for writing");
  out << text;
}

}  // namespace

void save_net(const BayesNet& net, const std::string& path) {
  write_file(path, net_to_json(net));
}

BayesNet load_net(const std::string& path) { return net_from_json(read_file(path)); }

void save_qpn(const Qpn& qpn, const std::string& path) {
  write_file(path, qpn_to_json(qpn));
}

Qpn load_qpn(const std::string& path) { return qpn_from_json(read_file(path)); }

}  // namespace qpnet
