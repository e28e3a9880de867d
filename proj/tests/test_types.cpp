#include <gtest/gtest.h>

#include <crossact/crossact.hpp>

using namespace crossact;

TEST(Timestamp, ParsesStackExchangeStyleAsUtc) {
  EXPECT_EQ(format_timestamp(parse_timestamp("2014-01-05T10:00:00.000")), "2014-01-05T10:00:00Z");
  EXPECT_EQ(format_timestamp(parse_timestamp("2014-01-05")), "2014-01-05T00:00:00Z");
}

TEST(Timestamp, AppliesOffsets) {
  EXPECT_EQ(parse_timestamp("2014-10-01T00:00:00+02:00"), parse_timestamp("2014-09-30T22:00:00Z"));
  EXPECT_EQ(parse_timestamp("2014-09-30T20:30:00-01:30"), parse_timestamp("2014-09-30T22:00:00Z"));
}

TEST(Timestamp, RejectsGarbage) {
  for (const char* s : {"", "not-a-date", "2014-13-01", "2014-02-30", "2014-01-01T25:00:00",
                        "2014-01-01T10:00:00.", "2014-01-01T10:00:00+0200", "2014-01-01X"})
    EXPECT_FALSE(try_parse_timestamp(s).has_value()) << s;
  EXPECT_THROW(parse_timestamp("nope"), std::invalid_argument);
}

TEST(Timestamp, FormatRoundTrips) {
  auto t = parse_timestamp("1999-12-31T23:59:59Z");
  EXPECT_EQ(parse_timestamp(format_timestamp(t)), t);
}

TEST(Window, ParsesBothSeparatorsAndRequiresOrder) {
  auto a = parse_window("2013-10-01,2014-07-01");
  auto b = parse_window("2013-10-01T00:00:00Z / 2014-07-01T00:00:00Z");
  EXPECT_EQ(a, b);
  EXPECT_TRUE(a.contains(a.start));
  EXPECT_FALSE(a.contains(a.end));
  EXPECT_THROW(parse_window("2014-07-01,2013-10-01"), std::invalid_argument);
  EXPECT_THROW(parse_window("2014-07-01"), std::invalid_argument);
}

TEST(Enums, ActivityPlatformMapping) {
  EXPECT_EQ(platform_of(ActivityType::Fork), PlatformId::GitHub);
  EXPECT_EQ(platform_of(ActivityType::Watch), PlatformId::GitHub);
  EXPECT_EQ(platform_of(ActivityType::Answer), PlatformId::StackOverflow);
  EXPECT_EQ(platform_of(ActivityType::Favorite), PlatformId::StackOverflow);
  for (auto a : kActivityTypes) EXPECT_EQ(parse_activity(to_string(a)), a);
  EXPECT_THROW(parse_activity("commit"), std::invalid_argument);
}

TEST(KeyValueConfig, ParsesCommentsAndLists) {
  std::istringstream in("# header\nruns = 3\nconfigs = SO_Act, ALL  # trailing\nflag=true\n");
  auto kv = KeyValueConfig::parse(in);
  EXPECT_EQ(kv.get_number<int>("runs", 0), 3);
  EXPECT_EQ(kv.get_list("configs"), (std::vector<std::string>{"SO_Act", "ALL"}));
  EXPECT_TRUE(kv.get_bool("flag", false));
  EXPECT_EQ(kv.unknown_keys({"runs", "configs"}), std::vector<std::string>{"flag"});
}

TEST(Rng, UniformIndexStaysInRangeAndIsSeeded) {
  Rng a(5), b(5);
  for (int i = 0; i < 1000; ++i) {
    auto x = uniform_index(a, 7);
    EXPECT_LT(x, 7u);
    EXPECT_EQ(x, uniform_index(b, 7));
  }
  EXPECT_NE(derive_seed(1, 1), derive_seed(1, 2));
}
