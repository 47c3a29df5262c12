#include "doctest.h"

#include <algorithm>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "qpnet/bayes_net.hpp"
#include "qpnet/bounds.hpp"
#include "qpnet/exact.hpp"
#include "qpnet/types.hpp"

#include "support/fixtures.hpp"
#include "support/oracle.hpp"

using qpnet::AbstractionPlan;
using qpnet::BayesNet;
using qpnet::CdfBounds;
using qpnet::CdfVector;
using qpnet::Directive;
using qpnet::NodeId;
using qpnet::Sign;
using qpnet::StatePartition;

namespace {

StatePartition split_first_wide(const StatePartition& p) {
  StatePartition out = p;
  for (std::size_t i = 0; i < out.ranges.size(); ++i) {
    auto [first, last] = out.ranges[i];
    if (last > first) {
      const std::uint32_t mid = first + (last - first) / 2;
      out.ranges[i] = {first, mid};
      out.ranges.insert(out.ranges.begin() + static_cast<std::ptrdiff_t>(i) + 1,
                        {mid + 1, last});
      return out;
    }
  }
  return out;
}

void check_sandwich(const CdfBounds& bounds,
                    const std::vector<std::optional<CdfVector>>& truth) {
  REQUIRE(bounds.lower.size() == truth.size());
  REQUIRE(bounds.upper.size() == truth.size());
  for (std::size_t k = 0; k < truth.size(); ++k) {
    REQUIRE(bounds.lower[k].has_value() == truth[k].has_value());
    REQUIRE(bounds.upper[k].has_value() == truth[k].has_value());
    if (!truth[k]) continue;
    for (std::size_t t = 0; t < truth[k]->size(); ++t) {
      CHECK((*bounds.lower[k])[t] <= (*truth[k])[t] + 1e-9);
      CHECK((*bounds.upper[k])[t] >= (*truth[k])[t] - 1e-9);
    }
  }
}

}  // namespace

TEST_CASE("state partitions") {
  StatePartition whole = StatePartition::coarsest(7, 4);
  CHECK(whole.node == 7);
  REQUIRE(whole.ranges.size() == 1);
  CHECK(whole.ranges[0] == std::pair<std::uint32_t, std::uint32_t>{0, 3});
  CHECK_FALSE(whole.fully_refined());

  StatePartition fine = StatePartition::singletons(7, 4);
  REQUIRE(fine.ranges.size() == 4);
  for (std::uint32_t s = 0; s < 4; ++s) {
    CHECK(fine.ranges[s] == std::pair<std::uint32_t, std::uint32_t>{s, s});
  }
  CHECK(fine.fully_refined());
  CHECK(StatePartition::coarsest(0, 1).fully_refined());
}

TEST_CASE("child rewrites keep the extreme response per block") {
  qpnet::Cpt cpt({3}, {3}, 2);
  cpt.set_row(0, std::vector<double>{0.9, 0.1});
  cpt.set_row(1, std::vector<double>{0.6, 0.4});
  cpt.set_row(2, std::vector<double>{0.2, 0.8});
  StatePartition part{3, {{0, 1}, {2, 2}}};

  qpnet::Cpt strong = qpnet::transform_child_cpt(cpt, part, Directive::Strengthen);
  CHECK(strong.prob(0, 0) == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(strong.prob(1, 0) == doctest::Approx(0.2).epsilon(1e-12));

  qpnet::Cpt weak = qpnet::transform_child_cpt(cpt, part, Directive::Weaken);
  CHECK(weak.prob(0, 0) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(weak.prob(1, 0) == doctest::Approx(0.2).epsilon(1e-12));

  SUBCASE("the partitioned node must be a parent") {
    StatePartition other{9, {{0, 2}}};
    try {
      qpnet::transform_child_cpt(cpt, other, Directive::Strengthen);
      REQUIRE(false);
    } catch (const qpnet::Error& e) {
      CHECK(e.code() == qpnet::ErrorCode::UnknownNode);
    }
  }
}

TEST_CASE("aggregation sums the node's own rows and leaves children pending") {
  BayesNet net;
  NodeId x = net.add_variable("x", {"lo", "mid", "hi"});
  NodeId c = net.add_variable("c", {"f", "t"});
  net.set_family(x, {}, {0.2, 0.3, 0.5});
  net.set_family(c, {x}, {0.9, 0.1, 0.6, 0.4, 0.2, 0.8});
  StatePartition part{x, {{0, 1}, {2, 2}}};

  qpnet::AggregationResult agg = qpnet::aggregate_node(net, part);
  CHECK(agg.pending_children == std::vector<NodeId>{c});
  CHECK(agg.net.card(x) == 2);
  CHECK(agg.net.cpt(x).prob(0, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(agg.net.cpt(x).prob(0, 1) == doctest::Approx(0.5).epsilon(1e-12));

  qpnet::Cpt rewritten = qpnet::transform_child_cpt(net.cpt(c), part, Directive::Weaken);
  agg.net.set_family(c, rewritten.parents(), std::move(rewritten.flat()));
  CHECK(qpnet::validate_network(agg.net).ok());
  CHECK(agg.net.cpt(c).prob(0, 0) == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("envelope verdicts") {
  const auto some = [](std::initializer_list<double> v) {
    return std::optional<CdfVector>(CdfVector(v));
  };

  SUBCASE("clear separation certifies a sign") {
    CdfBounds b;
    b.lower = {some({0.6, 1.0}), some({0.1, 1.0})};
    b.upper = {some({0.7, 1.0}), some({0.2, 1.0})};
    CHECK(qpnet::sign_from_bounds(b) == Sign::Positive);
    std::swap(b.lower[0], b.lower[1]);
    std::swap(b.upper[0], b.upper[1]);
    CHECK(qpnet::sign_from_bounds(b) == Sign::Negative);
  }

  SUBCASE("coinciding envelopes certify zero") {
    CdfBounds b;
    b.lower = {some({0.5, 1.0}), some({0.5, 1.0})};
    b.upper = {some({0.5, 1.0}), some({0.5, 1.0})};
    CHECK(qpnet::sign_from_bounds(b) == Sign::Zero);
  }

  SUBCASE("a witnessed crossing certifies ambiguity") {
    CdfBounds b;
    b.lower = {some({0.4, 0.5, 1.0}), some({0.2, 0.9, 1.0})};
    b.upper = {some({0.4, 0.5, 1.0}), some({0.2, 0.9, 1.0})};
    CHECK(qpnet::sign_from_bounds(b) == Sign::Ambiguous);
  }

  SUBCASE("loose overlap stays undecided") {
    CdfBounds b;
    b.lower = {some({0.3, 1.0}), some({0.2, 1.0})};
    b.upper = {some({0.7, 1.0}), some({0.8, 1.0})};
    CHECK_FALSE(qpnet::sign_from_bounds(b).has_value());
  }

  SUBCASE("fewer than two reachable decision states") {
    CdfBounds b;
    b.lower = {std::nullopt, some({0.5, 1.0})};
    b.upper = {std::nullopt, some({0.5, 1.0})};
    CHECK(qpnet::sign_from_bounds(b) == Sign::Zero);
  }

  SUBCASE("mismatched envelope families are rejected") {
    CdfBounds b;
    b.lower = {some({0.5, 1.0}), some({0.5, 1.0})};
    b.upper = {some({0.5, 1.0})};
    try {
      qpnet::sign_from_bounds(b);
      REQUIRE(false);
    } catch (const qpnet::Error& e) {
      CHECK(e.code() == qpnet::ErrorCode::LengthMismatch);
    }
  }
}

TEST_CASE("eligibility screens") {
  SUBCASE("a single mediator feeding the target qualifies") {
    BayesNet net = testsupport::single_mediator_net(11, false);
    qpnet::Eligibility elig = qpnet::check_eligibility(net, 0, 2);
    REQUIRE(elig.candidates.size() == 1);
    const qpnet::AbstractionCandidate& cand = elig.candidates[0];
    CHECK(cand.node == 1);
    REQUIRE(cand.child_toward_target.size() == 1);
    CHECK(cand.child_toward_target.at(2) == Sign::Positive);
    CHECK(cand.lower_directive.at(2) == Directive::Strengthen);
    CHECK(cand.upper_directive.at(2) == Directive::Weaken);
  }

  SUBCASE("hub and mediators all qualify in the two path layout") {
    for (std::uint64_t seed : {3u, 4u, 9u}) {
      for (bool direct : {false, true}) {
        BayesNet net = testsupport::mediated_net(seed, true, direct);
        qpnet::Eligibility elig = qpnet::check_eligibility(net, 0, 4);
        std::vector<NodeId> ids;
        for (const auto& cand : elig.candidates) ids.push_back(cand.node);
        CHECK(ids == std::vector<NodeId>{1, 2, 3});
        for (const auto& cand : elig.candidates) {
          for (const auto& [child, sign] : cand.child_toward_target) {
            CHECK((sign == Sign::Positive || sign == Sign::Negative));
            const Directive lo = cand.lower_directive.at(child);
            const Directive up = cand.upper_directive.at(child);
            CHECK(lo == (sign == Sign::Positive ? Directive::Strengthen
                                                : Directive::Weaken));
            CHECK(up == (lo == Directive::Strengthen ? Directive::Weaken
                                                     : Directive::Strengthen));
          }
        }
      }
    }
  }

  SUBCASE("queries against the arrow of influence are ineligible") {
    BayesNet chain = testsupport::chain_net();
    CHECK_FALSE(qpnet::check_eligibility(chain, *chain.find("t"), *chain.find("d"))
                    .eligible());
    try {
      qpnet::issa_resolve(chain, *chain.find("t"), *chain.find("d"));
      REQUIRE(false);
    } catch (const qpnet::Error& e) {
      CHECK(e.code() == qpnet::ErrorCode::Ineligible);
    }
  }

  SUBCASE("a bare decision target pair has nothing to abstract") {
    BayesNet pair = testsupport::dominance_pair_net();
    try {
      qpnet::issa_resolve(pair, *pair.find("d"), *pair.find("t"));
      REQUIRE(false);
    } catch (const qpnet::Error& e) {
      CHECK(e.code() == qpnet::ErrorCode::Ineligible);
    }
  }
}

TEST_CASE("plans must cover every rewritten child") {
  BayesNet net = testsupport::single_mediator_net(5, false);
  AbstractionPlan::Entry entry;
  entry.partition = StatePartition::coarsest(1, net.card(1));
  try {
    qpnet::build_abstract_net(net, {entry});
    REQUIRE(false);
  } catch (const qpnet::Error& e) {
    CHECK(e.code() == qpnet::ErrorCode::Ineligible);
  }
}

TEST_CASE("envelopes sandwich the truth and tighten under refinement") {
  int exercised = 0;
  for (std::uint64_t seed = 1; seed <= 40 && exercised < 12; ++seed) {
    BayesNet net = testsupport::single_mediator_net(seed, seed % 2 == 1);
    if (net.card(1) < 3) continue;
    ++exercised;

    qpnet::Eligibility elig = qpnet::check_eligibility(net, 0, 2);
    REQUIRE(elig.eligible());
    const auto truth = testsupport::conditional_cdfs(net, 2, 0);

    StatePartition part = StatePartition::coarsest(1, net.card(1));
    std::optional<CdfBounds> prev;
    while (true) {
      std::map<NodeId, StatePartition> parts{{1, part}};
      const AbstractionPlan plan = qpnet::make_plan(elig, parts);
      CdfBounds bounds = qpnet::bound_target_cdfs(net, 0, 2, plan);
      check_sandwich(bounds, truth);
      if (prev) {
        for (std::size_t k = 0; k < truth.size(); ++k) {
          if (!truth[k]) continue;
          for (std::size_t t = 0; t < truth[k]->size(); ++t) {
            CHECK((*bounds.lower[k])[t] >= (*prev->lower[k])[t] - 1e-9);
            CHECK((*bounds.upper[k])[t] <= (*prev->upper[k])[t] + 1e-9);
          }
        }
      }
      if (part.fully_refined()) {
        for (std::size_t k = 0; k < truth.size(); ++k) {
          if (!truth[k]) continue;
          for (std::size_t t = 0; t < truth[k]->size(); ++t) {
            CHECK((*bounds.lower[k])[t] == doctest::Approx((*truth[k])[t]).epsilon(1e-9));
            CHECK((*bounds.upper[k])[t] == doctest::Approx((*truth[k])[t]).epsilon(1e-9));
          }
        }
        break;
      }
      prev = std::move(bounds);
      part = split_first_wide(part);
    }
  }
  REQUIRE(exercised >= 10);
}

TEST_CASE("bound based resolution on the fixed examples") {
  SUBCASE("a separated layout resolves with no refinement") {
    BayesNet net = testsupport::separated_net();
    qpnet::IssaResult res =
        qpnet::issa_resolve(net, *net.find("d"), *net.find("x"));
    CHECK(res.sign == Sign::Positive);
    CHECK(res.refinement_steps == 0);
  }

  SUBCASE("a genuine crossing is confirmed, not merely suspected") {
    BayesNet net = testsupport::crossing_mediator_net();
    NodeId d = *net.find("d");
    NodeId x = *net.find("x");
    qpnet::IssaResult res = qpnet::issa_resolve(net, d, x);
    CHECK(res.sign == Sign::Ambiguous);
    CHECK(testsupport::influence_sign(net, d, x) == Sign::Ambiguous);
    check_sandwich(res.bounds, testsupport::conditional_cdfs(net, x, d));
  }

  SUBCASE("resolution is deterministic") {
    BayesNet net = testsupport::mediated_net(17, true, true);
    qpnet::IssaResult a = qpnet::issa_resolve(net, 0, 4);
    qpnet::IssaResult b = qpnet::issa_resolve(net, 0, 4);
    CHECK(a.sign == b.sign);
    CHECK(a.refinement_steps == b.refinement_steps);
    REQUIRE(a.partitions.size() == b.partitions.size());
    for (const auto& [node, part] : a.partitions) {
      CHECK(b.partitions.at(node).ranges == part.ranges);
    }
  }

  SUBCASE("decisive verdicts agree with exhaustive evaluation") {
    int decisive = 0;
    for (std::uint64_t seed = 50; seed < 80; ++seed) {
      BayesNet net = testsupport::mediated_net(seed, seed % 2 == 0, seed % 3 == 0);
      const NodeId sink = net.node_ids().back();
      qpnet::IssaResult res = qpnet::issa_resolve(net, 0, sink);
      const Sign truth = testsupport::influence_sign(net, 0, sink);
      if (res.sign == Sign::Ambiguous) {
        CHECK(truth == Sign::Ambiguous);
        continue;
      }
      ++decisive;
      if (res.sign == Sign::Positive) CHECK((truth == Sign::Positive || truth == Sign::Zero));
      if (res.sign == Sign::Negative) CHECK((truth == Sign::Negative || truth == Sign::Zero));
      if (res.sign == Sign::Zero) CHECK(truth == Sign::Zero);
    }
    CHECK(decisive > 0);
  }

  SUBCASE("the enumeration cap propagates") {
    BayesNet net = testsupport::single_mediator_net(5, false);
    try {
      qpnet::issa_resolve(net, 0, 2, 1e-9, 2.0);
      REQUIRE(false);
    } catch (const qpnet::Error& e) {
      CHECK(e.code() == qpnet::ErrorCode::TooLarge);
    }
  }
}
