#include <gtest/gtest.h>

#include "support.hpp"

using namespace crossact;
using namespace testing_support;

namespace {

ItemRecord question(std::string id, std::vector<std::string> tags) {
  return {std::move(id), PlatformId::StackOverflow, "", std::move(tags), ts("2014-01-01")};
}

ItemRecord repo(std::string id, std::string text) {
  return {std::move(id), PlatformId::GitHub, std::move(text), {}, ts("2014-01-01")};
}

ActivityRecord fork(std::string u, std::string item) {
  return {std::move(u), std::move(item), ActivityType::Fork, ts("2014-02-01")};
}

// u forked A (lstm) and B (svm); v co-forked D with u and also forked C
// (xgboost). X is an lstm question, Z an xgboost question.
Corpus worked_example() {
  return Corpus({repo("gh:A", "lstm networks"), repo("gh:B", "svm library"),
                 repo("gh:C", "xgboost wrapper"), repo("gh:D", "scikit-learn examples"),
                 question("so:X", {"lstm"}), question("so:Z", {"xgboost"}),
                 question("so:V", {"svm", "scikit-learn"})},
                {fork("u", "gh:A"), fork("u", "gh:B"), fork("w", "gh:D"), fork("v", "gh:C"),
                 fork("v", "gh:D")},
                {});
}

struct Fixture {
  Corpus corpus;
  ItemInterests interests;
  FeatureContext ctx;

  explicit Fixture(Corpus c, CoCap cap = {})
      : corpus(std::move(c)),
        interests(item_interests(corpus, build_vocabulary(corpus))),
        ctx(make_feature_context(corpus.view(), interests, cap)) {}
};

}  // namespace

TEST(Features, WorkedExampleDirect) {
  Fixture f(worked_example());
  EXPECT_EQ(sim_activity(f.ctx, "u", "so:X", ActivityType::Fork), 0.5);
}

TEST(Features, WorkedExampleCoParticipation) {
  // Here u's only co-forker is v via D; rebuild so u forks D instead of w.
  Fixture f(Corpus({repo("gh:A", "lstm networks"), repo("gh:C", "xgboost wrapper"),
                    repo("gh:D", "scikit-learn examples"), question("so:X", {"lstm"}),
                    question("so:Z", {"xgboost"}), question("so:V", {"scikit-learn"})},
                   {fork("u", "gh:A"), fork("u", "gh:D"), fork("v", "gh:C"), fork("v", "gh:D")},
                   {}));
  auto u = *f.corpus.user_index("u");
  ASSERT_EQ(f.ctx.co(ActivityType::Fork, u).size(), 1u);
  EXPECT_EQ(sim_co_activity(f.ctx, "u", "so:Z", ActivityType::Fork), 0.5);
  EXPECT_EQ(featurize_pair(f.ctx, "u", "so:Z").sim_cofork(), 0.5);
}

TEST(Features, EmptyHistoriesGiveZero) {
  Fixture f(worked_example());
  EXPECT_EQ(sim_activity(f.ctx, "u", "so:X", ActivityType::Answer), 0.0);
  EXPECT_EQ(sim_co_activity(f.ctx, "u", "so:X", ActivityType::Answer), 0.0);
  auto unknown = featurize_pair(f.ctx, "nobody", "so:X");
  for (double v : unknown.values) EXPECT_EQ(v, 0.0);
  EXPECT_THROW(featurize_pair(f.ctx, "u", "so:missing"), std::invalid_argument);
}

TEST(Features, QueryItemExcludedFromOwnEvidence) {
  Fixture f(worked_example());
  // u's forks without A: only B, whose svm tag is not on A.
  EXPECT_EQ(sim_activity(f.ctx, "u", "gh:A", ActivityType::Fork), 0.0);
  // Only shared item D is the query itself: v does not count as a co-forker.
  EXPECT_EQ(sim_co_activity(f.ctx, "w", "gh:D", ActivityType::Fork), 0.0);
  EXPECT_EQ(sim_co_activity(f.ctx, "w", "so:V", ActivityType::Fork), 0.5);
}

TEST(Features, CoIndexSymmetricAndIrreflexive) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    auto c = random_corpus(seed, 25, 50, 400);
    auto sets = build_activity_sets(c.view());
    auto co = build_co_index(sets);
    for (auto a : kActivityTypes)
      for (std::uint32_t u = 0; u < c.users().size(); ++u)
        for (const auto& e : co(a, u)) {
          EXPECT_NE(e.user, u);
          const auto& back = co(a, e.user);
          auto it = std::find_if(back.begin(), back.end(), [&](const CoEntry& x) { return x.user == u; });
          ASSERT_NE(it, back.end());
          EXPECT_EQ(it->shared, e.shared);
        }
  }
}

TEST(Features, CappedCoIndexIsSubset) {
  auto c = random_corpus(4, 30, 20, 600);
  auto sets = build_activity_sets(c.view());
  auto full = build_co_index(sets);
  auto capped = build_co_index(sets, {3, 9});
  for (auto a : kActivityTypes)
    for (std::uint32_t u = 0; u < c.users().size(); ++u) {
      EXPECT_LE(capped(a, u).size(), 3u);
      for (const auto& e : capped(a, u))
        EXPECT_NE(std::find(full(a, u).begin(), full(a, u).end(), e), full(a, u).end());
    }
}

TEST(Features, MatchBruteForceOracle) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    Fixture f(random_corpus(seed, 20, 60, 300));
    TimeWindow w{ts("2014-02-01"), ts("2014-09-01")};
    auto ctx = make_feature_context(window_slice(f.corpus, w.start, w.end), f.interests);
    auto imap = interest_map(f.interests);
    BruteForceFeatures oracle(f.corpus, w, imap);
    std::mt19937_64 rng(seed);
    for (int q = 0; q < 200; ++q) {
      const auto& u = f.corpus.users()[rng() % f.corpus.users().size()];
      const auto& k = f.corpus.items()[rng() % f.corpus.items().size()].item_id;
      auto got = featurize_pair(ctx, u, k);
      auto want = oracle.all(u, k);
      for (std::size_t i = 0; i < FeatureVector::kSize; ++i)
        ASSERT_EQ(got.values[i], want.values[i]) << kFeatureNames[i] << " " << u << " " << k;
    }
  }
}

TEST(Features, BatchEqualsPairwise) {
  Fixture f(random_corpus(21, 30, 80, 800));
  std::vector<QueryPair> queries;
  std::mt19937_64 rng(2);
  const auto n_users = f.corpus.users().size();
  for (int i = 0; i < 500; ++i) {
    auto u = rng() % (n_users + 1);  // n_users stands for an unknown user
    queries.push_back({u == n_users ? kNoUser : static_cast<std::uint32_t>(u),
                       static_cast<std::uint32_t>(rng() % f.corpus.items().size())});
  }
  auto one = featurize_batch(f.ctx, queries, 1);
  auto four = featurize_batch(f.ctx, queries, 4);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    auto want = featurize_pair(f.ctx, queries[i].user, queries[i].item);
    EXPECT_EQ(one[i].values, want.values);
    EXPECT_EQ(four[i].values, want.values);
  }
}

TEST(Features, ValuesInUnitInterval) {
  for (std::uint64_t seed = 30; seed < 40; ++seed) {
    Fixture f(random_corpus(seed, 15, 40, 300));
    for (const auto& u : f.corpus.users())
      for (const auto& it : f.corpus.items()) {
        auto v = featurize_pair(f.ctx, u, it.item_id);
        for (double x : v.values) {
          EXPECT_GE(x, 0.0);
          EXPECT_LE(x, 1.0);
        }
      }
  }
}

TEST(Features, AddingOverlappingEvidenceDoesNotLowerSim) {
  // One more forked repo that shares a tag with k can only raise sim_fork.
  auto base = worked_example();
  std::vector<ItemRecord> items(base.items().begin(), base.items().end());
  items.push_back(repo("gh:E", "lstm models"));
  std::vector<ActivityRecord> acts(base.activities().begin(), base.activities().end());
  Fixture before(Corpus(items, acts, {}));
  acts.push_back(fork("u", "gh:E"));
  Fixture after(Corpus(items, acts, {}));
  EXPECT_GT(sim_activity(after.ctx, "u", "so:X", ActivityType::Fork),
            sim_activity(before.ctx, "u", "so:X", ActivityType::Fork));
}

TEST(Features, ConfigurationColumns) {
  FeatureVector v;
  for (std::size_t i = 0; i < 8; ++i) v.values[i] = static_cast<double>(i);
  EXPECT_EQ(select_config(v, FeatureConfig::SO_Act), (std::vector<double>{2, 3}));
  EXPECT_EQ(select_config(v, FeatureConfig::SO_CoAct), (std::vector<double>{6, 7}));
  EXPECT_EQ(select_config(v, FeatureConfig::GH_Act), (std::vector<double>{0, 1}));
  EXPECT_EQ(select_config(v, FeatureConfig::GH_CoAct), (std::vector<double>{4, 5}));
  EXPECT_EQ(select_config(v, FeatureConfig::ALL).size(), 8u);
  for (auto c : kFeatureConfigs) EXPECT_EQ(parse_feature_config(to_string(c)), c);
  EXPECT_THROW(parse_feature_config("XX"), std::invalid_argument);
  EXPECT_EQ(kFeatureNames[0], "sim_fork");
  EXPECT_EQ(kFeatureNames[7], "sim_cofav");
}
