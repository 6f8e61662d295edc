#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "gkpqec/policy.hpp"

using namespace gkpqec;

namespace {

bool params_equal(const HalfCycleParams& a, const HalfCycleParams& b, double tol = 1e-12) {
  const auto fa = a.flatten();
  const auto fb = b.flatten();
  for (int i = 0; i < 15; ++i)
    if (std::abs(fa[i] - fb[i]) > tol) return false;
  return true;
}

double max_param_diff(const HalfCycleParams& a, const HalfCycleParams& b) {
  const auto fa = a.flatten();
  const auto fb = b.flatten();
  double m = 0.0;
  for (int i = 0; i < 15; ++i) m = std::max(m, std::abs(fa[i] - fb[i]));
  return m;
}

}  // namespace

TEST_CASE("policy kind names") {
  CHECK(policy_kind_from_name("static") == PolicyKind::kStatic);
  CHECK(policy_kind_from_name("standard") == PolicyKind::kStatic);
  CHECK(policy_kind_from_name("lookup") == PolicyKind::kLookup);
  CHECK(policy_kind_from_name("fnn") == PolicyKind::kFnn);
  CHECK(policy_kind_from_name("gru") == PolicyKind::kGru);
  CHECK(policy_kind_from_name("rnn") == PolicyKind::kGru);
  CHECK_THROWS_AS(policy_kind_from_name("transformer"), ConfigError);

  for (auto k : {PolicyKind::kStatic, PolicyKind::kLookup, PolicyKind::kFnn, PolicyKind::kGru})
    CHECK(policy_kind_from_name(policy_kind_name(k)) == k);
}

TEST_CASE("static policy always answers the standard pulse") {
  const FeedbackPolicy p = FeedbackPolicy::make_static();
  CHECK_FALSE(p.trainable());
  CHECK(p.weights().empty());
  CHECK(params_equal(p.query({}), HalfCycleParams::standard()));
  CHECK(params_equal(p.query({1, -1, 1}), HalfCycleParams::standard()));
}

TEST_CASE("zero-initialized lookup table reproduces the static pulse") {
  std::mt19937 rng(3);
  const FeedbackPolicy p = FeedbackPolicy::make_lookup(4, rng, 0.0);
  CHECK(p.trainable());
  CHECK(p.lookup_depth() == 4);
  CHECK(p.weights().size() == 1);
  CHECK(p.weights()[0].second.rows() == 15);  // (1<<4) - 1 nodes
  CHECK(p.weights()[0].second.cols() == 15);
  CHECK(params_equal(p.query({}), HalfCycleParams::standard()));
  CHECK(params_equal(p.query({1, -1, -1, 1, 1}), HalfCycleParams::standard()));

  CHECK_THROWS_AS(FeedbackPolicy::make_lookup(0, rng), ConfigError);
  CHECK_THROWS_AS(FeedbackPolicy::make_lookup(21, rng), ConfigError);
}

TEST_CASE("lookup nodes follow the sliding outcome window") {
  std::mt19937 rng(3);
  FeedbackPolicy p = FeedbackPolicy::make_lookup(3, rng, 0.0);
  MatrixXd& table = p.weights()[0].second;
  REQUIRE(table.rows() == 7);
  for (int node = 0; node < 7; ++node) table(node, 0) = 0.1 * (node + 1);

  const double base = HalfCycleParams::standard().flatten()[0];
  auto probe = [&](const std::vector<int>& hist) {
    return (p.query(hist).flatten()[0] - base) / 2.0;  // = tanh(table entry)
  };

  // root before any outcome, then one level per remembered half-cycle
  CHECK(probe({}) == doctest::Approx(std::tanh(0.1)).epsilon(1e-12));
  CHECK(probe({1}) == doctest::Approx(std::tanh(0.2)).epsilon(1e-12));
  CHECK(probe({-1}) == doctest::Approx(std::tanh(0.3)).epsilon(1e-12));
  CHECK(probe({1, 1}) == doctest::Approx(std::tanh(0.4)).epsilon(1e-12));
  CHECK(probe({1, -1}) == doctest::Approx(std::tanh(0.5)).epsilon(1e-12));
  CHECK(probe({-1, 1}) == doctest::Approx(std::tanh(0.6)).epsilon(1e-12));
  CHECK(probe({-1, -1}) == doctest::Approx(std::tanh(0.7)).epsilon(1e-12));

  // histories beyond the depth keep only the most recent window
  CHECK(probe({1, 1, 1, 1, -1}) == doctest::Approx(probe({1, -1})).epsilon(1e-12));
  CHECK(probe({-1, -1, -1, 1, 1}) == doctest::Approx(probe({1, 1})).epsilon(1e-12));
}

TEST_CASE("dense network reacts only to the latest outcome") {
  std::mt19937 rng(17);
  const FeedbackPolicy p = FeedbackPolicy::make_fnn(rng, 0.1, 0.01);
  CHECK(p.trainable());
  CHECK(p.weights().size() == 6);

  const HalfCycleParams a = p.query({1, -1, 1});
  const HalfCycleParams b = p.query({-1, -1, 1});
  const HalfCycleParams c = p.query({1, 1, -1});
  CHECK(params_equal(a, b));
  CHECK(max_param_diff(a, c) > 1e-6);

  // outputs stay inside the tanh-bounded window around the standard pulse
  const auto base = HalfCycleParams::standard().flatten();
  const auto scale = FeedbackPolicy::output_scale();
  const auto out = p.query({-1}).flatten();
  for (int i = 0; i < 15; ++i) CHECK(std::abs(out[i] - base[i]) <= scale[i]);
}

TEST_CASE("recurrent network remembers older outcomes") {
  std::mt19937 rng(23);
  const FeedbackPolicy p = FeedbackPolicy::make_gru(rng, 0.1, 0.01);
  CHECK(p.weights().size() == 15);

  const HalfCycleParams a = p.query({1, -1, 1});
  const HalfCycleParams b = p.query({-1, -1, 1});
  CHECK(max_param_diff(a, b) > 1e-9);
  CHECK(params_equal(p.query({1, -1, 1}), a));
}

TEST_CASE("taped queries match plain queries") {
  std::mt19937 rng(31);
  std::vector<FeedbackPolicy> policies;
  policies.push_back(FeedbackPolicy::make_static());
  policies.push_back(FeedbackPolicy::make_lookup(4, rng, 0.2));
  policies.push_back(FeedbackPolicy::make_fnn(rng, 0.1, 0.01));
  policies.push_back(FeedbackPolicy::make_gru(rng, 0.1, 0.01));

  const std::vector<int> history{1, -1, -1, 1};
  for (auto& p : policies) {
    ad::Tape tape;
    p.begin_taped(tape);
    if (p.trainable()) CHECK(p.taped_param_ids().size() == p.weights().size());
    const auto taped = p.query_taped(history);
    const auto plain = p.query(history).flatten();
    for (int i = 0; i < 15; ++i)
      CHECK(taped[std::size_t(i)].value()(0, 0) ==
            doctest::Approx(plain[i]).epsilon(1e-12));

    const auto taped_root = p.query_taped({});
    const auto plain_root = p.query({}).flatten();
    for (int i = 0; i < 15; ++i)
      CHECK(taped_root[std::size_t(i)].value()(0, 0) ==
            doctest::Approx(plain_root[i]).epsilon(1e-12));
  }

  FeedbackPolicy unbound = FeedbackPolicy::make_static();
  CHECK_THROWS_AS(unbound.query_taped({}), std::logic_error);
}

TEST_CASE("gradients reach the policy weights") {
  std::mt19937 rng(37);
  FeedbackPolicy p = FeedbackPolicy::make_gru(rng, 0.1, 0.01);
  ad::Tape tape;
  p.begin_taped(tape);
  const auto out = p.query_taped({1, -1});
  ad::Var loss = out[0];
  for (int i = 1; i < 15; ++i) loss = loss + out[std::size_t(i)];
  tape.backward(loss.id);

  int with_signal = 0;
  for (int id : p.taped_param_ids()) {
    const MatrixXd& g = tape.grad(id);
    if (g.size() > 0 && g.norm() > 0) ++with_signal;
  }
  // every weight matrix participates in the rollout
  CHECK(with_signal == int(p.taped_param_ids().size()));
}

TEST_CASE("checkpoint round trips") {
  std::mt19937 rng(41);
  const FeedbackPolicy p = FeedbackPolicy::make_gru(rng, 0.1, 0.01);

  const nlohmann::json j = p.to_json();
  CHECK(j.at("kind") == "gru");
  const FeedbackPolicy q = FeedbackPolicy::from_json(j);
  CHECK(q.kind() == PolicyKind::kGru);
  REQUIRE(q.weights().size() == p.weights().size());
  for (std::size_t i = 0; i < p.weights().size(); ++i) {
    CHECK(q.weights()[i].first == p.weights()[i].first);
    CHECK((q.weights()[i].second - p.weights()[i].second).norm() == 0.0);
  }
  CHECK(params_equal(q.query({1, -1}), p.query({1, -1})));

  const FeedbackPolicy lk = FeedbackPolicy::make_lookup(5, rng, 0.3);
  const FeedbackPolicy lk2 = FeedbackPolicy::from_json(lk.to_json());
  CHECK(lk2.lookup_depth() == 5);
  CHECK(params_equal(lk2.query({-1, -1, 1, 1}), lk.query({-1, -1, 1, 1})));

  const std::string path = "/tmp/gkpqec_test_policy.json";
  p.save(path);
  const FeedbackPolicy r = FeedbackPolicy::load(path);
  CHECK(params_equal(r.query({-1}), p.query({-1})));
  std::remove(path.c_str());

  nlohmann::json bad = p.to_json();
  bad["format"] = "something-else";
  CHECK_THROWS_AS(FeedbackPolicy::from_json(bad), ConfigError);

  nlohmann::json mangled = p.to_json();
  mangled["weights"][0]["data"] = std::vector<double>{1.0, 2.0};
  CHECK_THROWS_AS(FeedbackPolicy::from_json(mangled), ConfigError);
}
