#include <gtest/gtest.h>

#include "support.hpp"

using namespace crossact;
using namespace testing_support;

TEST(Synth, DefaultSpecPassesCorpusInvariants) {
  SynthSpec spec;  // 200 users, 400 repos, 400 questions, 8 topics, seed 7
  auto s = generate_corpus(spec);
  const auto& c = s.corpus;
  EXPECT_EQ(c.items().size(), 800u);
  EXPECT_EQ(c.links().size(), 200u);
  for (const auto& a : c.activities()) {
    EXPECT_TRUE(spec.window.contains(a.timestamp));
    EXPECT_EQ(c.item(*c.item_index(a.item_id)).platform, platform_of(a.activity));
  }
  for (const auto& it : c.items())
    if (it.platform == PlatformId::GitHub) {
      EXPECT_TRUE(it.raw_tags.empty());
    }
  for (const auto& p : s.preferences) {
    double sum = std::accumulate(p.begin(), p.end(), 0.0);
    EXPECT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(Synth, RepoInterestsRecoverPlantedTags) {
  SynthSpec spec;
  spec.noise_rate = 0.2;
  auto s = generate_corpus(spec);
  auto vocab = build_vocabulary(s.corpus);
  for (const auto& it : s.corpus.items()) {
    if (it.platform != PlatformId::GitHub) continue;
    EXPECT_EQ(infer_repo_interests(it, vocab).tags, s.planted_tags.at(it.item_id)) << it.item_id;
  }
}

TEST(Synth, Deterministic) {
  SynthSpec spec;
  spec.n_users = 30;
  auto a = generate_corpus(spec), b = generate_corpus(spec);
  EXPECT_TRUE(a.corpus == b.corpus);
  EXPECT_EQ(a.preferences, b.preferences);
  spec.seed = 8;
  EXPECT_FALSE(generate_corpus(spec).corpus == a.corpus);
}

TEST(Synth, OnTopicItemsScoreHigher) {
  SynthSpec spec;
  spec.noise_rate = 0.2;
  auto s = generate_corpus(spec);
  const auto& c = s.corpus;
  auto ctx = make_feature_context(c.view(), item_interests(c, build_vocabulary(c)));
  double on = 0, off = 0;
  std::size_t n_on = 0, n_off = 0;
  for (std::size_t u = 0; u < s.users.size(); ++u) {
    const auto& pref = s.preferences[u];
    auto best = static_cast<std::size_t>(std::max_element(pref.begin(), pref.end()) - pref.begin());
    auto worst = static_cast<std::size_t>(std::min_element(pref.begin(), pref.end()) - pref.begin());
    for (std::size_t q = 1; q <= 40; ++q) {
      auto id = "so:" + std::to_string(q);
      auto topic = s.item_topic.at(id);
      if (topic != best && topic != worst) continue;
      double v = sim_activity(ctx, s.users[u], id, ActivityType::Fork);
      (topic == best ? on : off) += v;
      ++(topic == best ? n_on : n_off);
    }
  }
  ASSERT_GT(n_on, 0u);
  ASSERT_GT(n_off, 0u);
  EXPECT_GT(on / static_cast<double>(n_on), off / static_cast<double>(n_off));
}

TEST(Synth, ConcentratedUsersStayOnTopic) {
  SynthSpec spec;
  spec.n_users = 40;
  spec.noise_rate = 0.0;
  spec.user_affinity_sharpness = std::numeric_limits<double>::infinity();
  auto s = generate_corpus(spec);
  std::map<std::string, std::set<std::size_t>> topics;
  for (const auto& a : s.corpus.activities()) topics[a.user_id].insert(s.item_topic.at(a.item_id));
  for (const auto& [u, t] : topics) EXPECT_EQ(t.size(), 1u) << u;
}

TEST(Synth, ColdUsersHaveNoStackOverflowActivity) {
  SynthSpec spec;
  spec.n_users = 20;
  spec.n_cold_users = 5;
  auto s = generate_corpus(spec);
  ASSERT_EQ(s.cold_users.size(), 5u);
  std::set<std::string> cold(s.cold_users.begin(), s.cold_users.end());
  std::size_t gh = 0;
  for (const auto& a : s.corpus.activities())
    if (cold.count(a.user_id)) {
      EXPECT_EQ(platform_of(a.activity), PlatformId::GitHub);
      ++gh;
    }
  EXPECT_GT(gh, 0u);
}

TEST(Synth, InvalidSpecs) {
  SynthSpec spec;
  spec.n_topics = 1000;
  spec.tags_per_topic = 5;
  EXPECT_THROW(generate_corpus(spec), std::invalid_argument);
  spec = {};
  spec.noise_rate = 1.5;
  EXPECT_THROW(generate_corpus(spec), std::invalid_argument);
  spec = {};
  spec.n_users = 0;
  EXPECT_THROW(generate_corpus(spec), std::invalid_argument);
}

TEST(Synth, SpecParsing) {
  std::istringstream in("n_users = 12\nuser_affinity_sharpness = inf\nwindow = 2014-01-01,2014-06-01\n");
  auto s = parse_synth_spec(KeyValueConfig::parse(in));
  EXPECT_EQ(s.n_users, 12u);
  EXPECT_TRUE(std::isinf(s.user_affinity_sharpness));
  EXPECT_EQ(s.window.start, ts("2014-01-01"));
  std::istringstream bad("colour = red\n");
  EXPECT_THROW(parse_synth_spec(KeyValueConfig::parse(bad)), std::invalid_argument);
}
