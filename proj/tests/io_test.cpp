#include "doctest.h"

#include <filesystem>
#include <string>

#include "json.hpp"

#include "qpnet/io.hpp"
#include "qpnet/netgen.hpp"
#include "qpnet/qpn.hpp"

#include "support/fixtures.hpp"

using ordered_json = nlohmann::ordered_json;
using qpnet::BayesNet;
using qpnet::Qpn;
using qpnet::Sign;

namespace {

ordered_json base_doc() {
  ordered_json doc;
  doc["variables"] = ordered_json::array(
      {{{"name", "x"}, {"states", {"f", "t"}}}, {{"name", "y"}, {"states", {"f", "t"}}}});
  doc["arcs"] = ordered_json::array({{"x", "y"}});
  doc["cpts"]["x"] =
      ordered_json::array({{{"given", ordered_json::object()}, {"dist", {0.4, 0.6}}}});
  doc["cpts"]["y"] = ordered_json::array({
      {{"given", {{"x", "f"}}}, {"dist", {0.8, 0.2}}},
      {{"given", {{"x", "t"}}}, {"dist", {0.1, 0.9}}},
  });
  return doc;
}

void expect_net_rejection(const ordered_json& doc, const std::string& token) {
  try {
    qpnet::net_from_json(doc.dump());
    REQUIRE(false);
  } catch (const qpnet::Error& e) {
    CHECK(e.code() == qpnet::ErrorCode::ParseError);
    CHECK(std::string(e.what()).find(token) != std::string::npos);
  }
}

void expect_qpn_rejection(const ordered_json& doc, const std::string& token) {
  try {
    qpnet::qpn_from_json(doc.dump());
    REQUIRE(false);
  } catch (const qpnet::Error& e) {
    CHECK(e.code() == qpnet::ErrorCode::ParseError);
    CHECK(std::string(e.what()).find(token) != std::string::npos);
  }
}

ordered_json qpn_doc(const char* sign_key, const char* mark) {
  ordered_json doc;
  doc["variables"] = ordered_json::array({{{"name", "a"}}, {{"name", "b"}}});
  doc["arcs"] = ordered_json::array({{"a", "b"}});
  doc["signs"][sign_key] = mark;
  return doc;
}

}  // namespace

TEST_CASE("network documents round trip byte for byte") {
  const ordered_json doc = base_doc();
  BayesNet net = qpnet::net_from_json(doc.dump());
  const std::string dumped = qpnet::net_to_json(net);
  CHECK(qpnet::net_to_json(qpnet::net_from_json(dumped)) == dumped);

  BayesNet generated = qpnet::generate_network({7, 10, 3, 99});
  const std::string text = qpnet::net_to_json(generated);
  CHECK(qpnet::net_to_json(qpnet::net_from_json(text)) == text);
}

TEST_CASE("influence documents round trip byte for byte") {
  const std::string imm = qpnet::qpn_to_json(testsupport::immunization_qpn());
  CHECK(qpnet::qpn_to_json(qpnet::qpn_from_json(imm)) == imm);

  const std::string derived =
      qpnet::qpn_to_json(qpnet::abstract_to_qpn(testsupport::competing_paths_net()));
  CHECK(qpnet::qpn_to_json(qpnet::qpn_from_json(derived)) == derived);
}

TEST_CASE("files save and load through the filesystem") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path();
  const fs::path net_path = dir / "qpnet_io_test_net.json";
  const fs::path qpn_path = dir / "qpnet_io_test_qpn.json";

  BayesNet net = testsupport::competing_paths_net();
  qpnet::save_net(net, net_path.string());
  CHECK(qpnet::net_to_json(qpnet::load_net(net_path.string())) == qpnet::net_to_json(net));

  Qpn qpn = testsupport::immunization_qpn();
  qpnet::save_qpn(qpn, qpn_path.string());
  CHECK(qpnet::qpn_to_json(qpnet::load_qpn(qpn_path.string())) == qpnet::qpn_to_json(qpn));

  fs::remove(net_path);
  fs::remove(qpn_path);

  try {
    qpnet::load_net((dir / "qpnet_io_test_absent.json").string());
    REQUIRE(false);
  } catch (const qpnet::Error& e) {
    CHECK(e.code() == qpnet::ErrorCode::ParseError);
  }
}

TEST_CASE("malformed text is rejected up front") {
  try {
    qpnet::net_from_json("{ not json");
    REQUIRE(false);
  } catch (const qpnet::Error& e) {
    CHECK(e.code() == qpnet::ErrorCode::ParseError);
  }
  expect_net_rejection(ordered_json::array(), "must be an object");
}

TEST_CASE("network rejection vocabulary") {
  SUBCASE("self arcs") {
    ordered_json doc = base_doc();
    doc["arcs"].push_back({"y", "y"});
    expect_net_rejection(doc, "CYCLE");
  }

  SUBCASE("rows that do not sum to one") {
    ordered_json doc = base_doc();
    doc["cpts"]["x"][0]["dist"] = {0.5, 0.4};
    expect_net_rejection(doc, "NON_NORMALIZED_ROW");
  }

  SUBCASE("missing, short, duplicate, and unfilled rows") {
    ordered_json doc = base_doc();
    doc["cpts"].erase("y");
    expect_net_rejection(doc, "MISSING_ROW: no cpt");

    doc = base_doc();
    doc["cpts"]["x"][0]["dist"] = {1.0};
    expect_net_rejection(doc, "MISSING_ROW: dist");

    doc = base_doc();
    doc["cpts"]["y"][1]["given"]["x"] = "f";
    expect_net_rejection(doc, "duplicate row");

    doc = base_doc();
    doc["cpts"]["y"].erase(1);
    expect_net_rejection(doc, "lacks a row");
  }

  SUBCASE("references to unknown variables") {
    ordered_json doc = base_doc();
    doc["arcs"][0][1] = "zz";
    expect_net_rejection(doc, "PARENT_MISMATCH: arc references");

    doc = base_doc();
    doc["cpts"]["zz"] = ordered_json::array();
    expect_net_rejection(doc, "PARENT_MISMATCH: cpts references");
  }

  SUBCASE("conditioning contexts that do not match the parents") {
    ordered_json doc = base_doc();
    doc["cpts"]["y"][0]["given"] = ordered_json::object();
    expect_net_rejection(doc, "does not match its parents");

    doc = base_doc();
    doc["cpts"]["y"][0]["given"] = {{"q", "f"}};
    expect_net_rejection(doc, "lacks parent");
  }

  SUBCASE("bad state spaces") {
    ordered_json doc = base_doc();
    doc["variables"][1]["name"] = "x";
    expect_net_rejection(doc, "duplicate variable name");

    doc = base_doc();
    doc["variables"][0]["states"] = {"f", "f"};
    expect_net_rejection(doc, "duplicate state label");

    doc = base_doc();
    doc["variables"][0]["states"] = {"only"};
    expect_net_rejection(doc, "at least two states");

    doc = base_doc();
    doc["cpts"]["y"][0]["given"]["x"] = "q";
    expect_net_rejection(doc, "unknown state");
  }
}

TEST_CASE("influence sign spellings") {
  Qpn plain = qpnet::qpn_from_json(qpn_doc("a->b", "+").dump());
  CHECK(plain.arc_signs.at({0, 1}) == Sign::Positive);

  Qpn arrow = qpnet::qpn_from_json(qpn_doc("a→b", "-").dump());
  CHECK(arrow.arc_signs.at({0, 1}) == Sign::Negative);

  expect_qpn_rejection(qpn_doc("b->a", "+"), "no sign for arc");
  expect_qpn_rejection(qpn_doc("a->b", "++"), "one of");

  ordered_json extra = qpn_doc("a->b", "+");
  extra["signs"]["b->a"] = "-";
  expect_qpn_rejection(extra, "not in 'arcs'");
}
