#pragma once

#include <array>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crossact {

using Timestamp = std::chrono::sys_seconds;

enum class PlatformId : std::uint8_t { GitHub, StackOverflow };

// Order matters: it is the slot order used by ActivitySets and FeatureVector.
enum class ActivityType : std::uint8_t { Fork, Watch, Answer, Favorite };

inline constexpr std::array<ActivityType, 4> kActivityTypes = {
    ActivityType::Fork, ActivityType::Watch, ActivityType::Answer, ActivityType::Favorite};

constexpr std::size_t slot(ActivityType a) { return static_cast<std::size_t>(a); }

constexpr PlatformId platform_of(ActivityType a) {
  return (a == ActivityType::Fork || a == ActivityType::Watch) ? PlatformId::GitHub
                                                                : PlatformId::StackOverflow;
}

inline std::string_view to_string(PlatformId p) {
  return p == PlatformId::GitHub ? "github" : "stackoverflow";
}

inline std::string_view to_string(ActivityType a) {
  switch (a) {
    case ActivityType::Fork: return "fork";
    case ActivityType::Watch: return "watch";
    case ActivityType::Answer: return "answer";
    case ActivityType::Favorite: return "favorite";
  }
  return "?";
}

inline PlatformId parse_platform(std::string_view s) {
  if (s == "github") return PlatformId::GitHub;
  if (s == "stackoverflow") return PlatformId::StackOverflow;
  throw std::invalid_argument("unknown platform: " + std::string(s));
}

inline std::optional<ActivityType> try_parse_activity(std::string_view s) {
  for (auto a : kActivityTypes)
    if (to_string(a) == s) return a;
  return std::nullopt;
}

inline ActivityType parse_activity(std::string_view s) {
  if (auto a = try_parse_activity(s)) return *a;
  throw std::invalid_argument("unknown activity type: " + std::string(s));
}

struct ItemRecord {
  std::string item_id;
  PlatformId platform{PlatformId::GitHub};
  std::string text;
  std::vector<std::string> raw_tags;
  Timestamp created_at{};

  friend bool operator==(const ItemRecord&, const ItemRecord&) = default;
};

struct ActivityRecord {
  std::string user_id;
  std::string item_id;
  ActivityType activity{ActivityType::Fork};
  Timestamp timestamp{};

  friend bool operator==(const ActivityRecord&, const ActivityRecord&) = default;
};

// An activity as it comes out of a platform dump, before account linkage.
struct RawActivity {
  std::string platform_user;
  std::string item_id;
  ActivityType activity{ActivityType::Fork};
  Timestamp timestamp{};

  friend bool operator==(const RawActivity&, const RawActivity&) = default;
};

struct AccountLink {
  std::string canonical_id;
  std::string github_login;
  std::string stackoverflow_user_id;

  friend bool operator==(const AccountLink&, const AccountLink&) = default;
};

/// Half-open interval [start, end).
struct TimeWindow {
  Timestamp start{};
  Timestamp end{};

  bool contains(Timestamp t) const { return start <= t && t < end; }
  friend bool operator==(const TimeWindow&, const TimeWindow&) = default;
};

// ---------------------------------------------------------------------------
// RFC 3339 timestamps (UTC only on output)
// ---------------------------------------------------------------------------

namespace detail {

inline bool read_int(std::string_view s, std::size_t pos, std::size_t len, int& out) {
  if (pos + len > s.size()) return false;
  int v = 0;
  for (std::size_t i = pos; i < pos + len; ++i) {
    char c = s[i];
    if (c < '0' || c > '9') return false;
    v = v * 10 + (c - '0');
  }
  out = v;
  return true;
}

}  // namespace detail

/// Accepts "YYYY-MM-DD", "YYYY-MM-DDTHH:MM:SS" with optional fractional
/// seconds and an optional "Z" or "+HH:MM"/"-HH:MM" offset. Stack Exchange
/// dumps omit the offset; those times are UTC.
inline std::optional<Timestamp> try_parse_timestamp(std::string_view s) {
  using namespace std::chrono;
  int y, mo, d, h = 0, mi = 0, sec = 0;
  if (!detail::read_int(s, 0, 4, y) || s.size() < 10 || s[4] != '-' || s[7] != '-' ||
      !detail::read_int(s, 5, 2, mo) || !detail::read_int(s, 8, 2, d))
    return std::nullopt;
  std::size_t pos = 10;
  if (pos < s.size()) {
    if (s[pos] != 'T' && s[pos] != 't' && s[pos] != ' ') return std::nullopt;
    if (!detail::read_int(s, pos + 1, 2, h) || s.size() < pos + 9 || s[pos + 3] != ':' ||
        !detail::read_int(s, pos + 4, 2, mi) || s[pos + 6] != ':' ||
        !detail::read_int(s, pos + 7, 2, sec))
      return std::nullopt;
    pos += 9;
    if (pos < s.size() && s[pos] == '.') {
      ++pos;
      std::size_t digits = 0;
      while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos, ++digits;
      if (digits == 0) return std::nullopt;
    }
  }
  int offset_minutes = 0;
  if (pos < s.size()) {
    if ((s[pos] == 'Z' || s[pos] == 'z') && pos + 1 == s.size()) {
      ++pos;
    } else if ((s[pos] == '+' || s[pos] == '-') && s.size() == pos + 6 && s[pos + 3] == ':') {
      int oh, om;
      if (!detail::read_int(s, pos + 1, 2, oh) || !detail::read_int(s, pos + 4, 2, om))
        return std::nullopt;
      offset_minutes = (s[pos] == '+' ? 1 : -1) * (oh * 60 + om);
      pos = s.size();
    } else {
      return std::nullopt;
    }
  }
  if (mo < 1 || mo > 12 || h > 23 || mi > 59 || sec > 60) return std::nullopt;
  year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
  if (!ymd.ok()) return std::nullopt;
  auto t = sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} - minutes{offset_minutes};
  return time_point_cast<seconds>(t);
}

inline Timestamp parse_timestamp(std::string_view s) {
  if (auto t = try_parse_timestamp(s)) return *t;
  throw std::invalid_argument("bad timestamp: '" + std::string(s) + "'");
}

inline std::string format_timestamp(Timestamp t) {
  using namespace std::chrono;
  auto days = floor<std::chrono::days>(t);
  year_month_day ymd{days};
  hh_mm_ss hms{t - days};
  char buf[32];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02dZ", int(ymd.year()),
                unsigned(ymd.month()), unsigned(ymd.day()), int(hms.hours().count()),
                int(hms.minutes().count()), int(hms.seconds().count()));
  return buf;
}

/// "start,end" or "start/end".
inline TimeWindow parse_window(std::string_view s) {
  auto sep = s.find_first_of(",/");
  if (sep == std::string_view::npos) throw std::invalid_argument("bad window: " + std::string(s));
  auto trim = [](std::string_view v) {
    while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
    while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
    return v;
  };
  TimeWindow w{parse_timestamp(trim(s.substr(0, sep))), parse_timestamp(trim(s.substr(sep + 1)))};
  if (!(w.start < w.end)) throw std::invalid_argument("window start must precede end");
  return w;
}

}  // namespace crossact
