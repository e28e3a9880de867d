#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "types.hpp"

namespace crossact {

class CorpusError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Output of a platform dump parser, before account linkage.
struct ParsedDump {
  std::vector<ItemRecord> items;
  std::vector<RawActivity> activities;
  std::map<std::string, std::size_t> skipped;  // reason -> count

  std::size_t skipped_total() const {
    std::size_t n = 0;
    for (const auto& [_, c] : skipped) n += c;
    return n;
  }
};

/// Activity with interned user and item indices.
struct ActivityRef {
  std::uint32_t user;
  std::uint32_t item;
  ActivityType activity;
  Timestamp timestamp;
};

namespace detail {

struct CorpusData {
  std::vector<ItemRecord> items;           // sorted by item_id
  std::vector<ActivityRecord> activities;  // sorted by (timestamp, user, item, activity)
  std::vector<ActivityRef> refs;           // parallel to activities
  std::vector<AccountLink> links;          // sorted by canonical_id
  std::vector<std::string> users;          // sorted canonical ids
  std::unordered_map<std::string, std::uint32_t> item_index;
  std::unordered_map<std::string, std::uint32_t> user_index;
  TimeWindow window;
};

inline bool activity_order(const ActivityRecord& a, const ActivityRecord& b) {
  return std::tie(a.timestamp, a.user_id, a.item_id, a.activity) <
         std::tie(b.timestamp, b.user_id, b.item_id, b.activity);
}

}  // namespace detail

class CorpusView;

/// Immutable activity corpus. Copies share the same underlying data.
class Corpus {
 public:
  Corpus() : Corpus(std::vector<ItemRecord>{}, {}, {}) {}

  /// Validates and canonicalizes: items sorted by id, activities deduplicated
  /// on (user, item, activity) keeping the earliest timestamp. When no window
  /// is given it spans the activities, [first, last + 1s).
  Corpus(std::vector<ItemRecord> items, std::vector<ActivityRecord> activities,
         std::vector<AccountLink> links, std::optional<TimeWindow> window = std::nullopt);

  std::span<const ItemRecord> items() const { return data_->items; }
  std::span<const ActivityRecord> activities() const { return data_->activities; }
  std::span<const ActivityRef> refs() const { return data_->refs; }
  std::span<const AccountLink> links() const { return data_->links; }
  std::span<const std::string> users() const { return data_->users; }
  const TimeWindow& window() const { return data_->window; }

  const ItemRecord& item(std::uint32_t index) const { return data_->items[index]; }

  std::optional<std::uint32_t> item_index(const std::string& id) const {
    auto it = data_->item_index.find(id);
    if (it == data_->item_index.end()) return std::nullopt;
    return it->second;
  }
  std::optional<std::uint32_t> user_index(const std::string& id) const {
    auto it = data_->user_index.find(id);
    if (it == data_->user_index.end()) return std::nullopt;
    return it->second;
  }

  CorpusView view() const;

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.data_->items == b.data_->items && a.data_->activities == b.data_->activities &&
           a.data_->links == b.data_->links && a.data_->window == b.data_->window;
  }

 private:
  friend class CorpusView;
  std::shared_ptr<const detail::CorpusData> data_;
};

/// Read-only window over a corpus: activities with start <= t < end.
class CorpusView {
 public:
  CorpusView(const Corpus& corpus, TimeWindow window) : corpus_(corpus), window_(window) {
    const auto& acts = corpus.data_->activities;
    auto lo = std::lower_bound(acts.begin(), acts.end(), window.start,
                               [](const ActivityRecord& a, Timestamp t) { return a.timestamp < t; });
    auto hi = std::lower_bound(lo, acts.end(), window.end,
                               [](const ActivityRecord& a, Timestamp t) { return a.timestamp < t; });
    begin_ = static_cast<std::size_t>(lo - acts.begin());
    end_ = std::max(begin_, static_cast<std::size_t>(hi - acts.begin()));
  }

  const Corpus& corpus() const { return corpus_; }
  const TimeWindow& window() const { return window_; }
  std::span<const ItemRecord> items() const { return corpus_.items(); }
  std::span<const AccountLink> links() const { return corpus_.links(); }
  std::span<const ActivityRecord> activities() const {
    return corpus_.activities().subspan(begin_, end_ - begin_);
  }
  std::span<const ActivityRef> refs() const { return corpus_.refs().subspan(begin_, end_ - begin_); }

 private:
  Corpus corpus_;
  TimeWindow window_;
  std::size_t begin_ = 0, end_ = 0;
};

inline Corpus::Corpus(std::vector<ItemRecord> items, std::vector<ActivityRecord> activities,
                      std::vector<AccountLink> links, std::optional<TimeWindow> window) {
  auto d = std::make_shared<detail::CorpusData>();

  std::sort(items.begin(), items.end(),
            [](const ItemRecord& a, const ItemRecord& b) { return a.item_id < b.item_id; });
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0 && items[i].item_id == items[i - 1].item_id)
      throw CorpusError("duplicate item id: " + items[i].item_id);
    if (items[i].platform == PlatformId::GitHub && !items[i].raw_tags.empty())
      throw CorpusError("repository carries raw tags: " + items[i].item_id);
    d->item_index.emplace(items[i].item_id, static_cast<std::uint32_t>(i));
  }
  d->items = std::move(items);

  // Earliest record wins per (user, item, activity).
  std::sort(activities.begin(), activities.end(), detail::activity_order);
  std::set<std::tuple<std::string_view, std::string_view, ActivityType>> seen;
  std::vector<ActivityRecord> kept;
  kept.reserve(activities.size());
  for (const auto& a : activities) {
    auto it = d->item_index.find(a.item_id);
    if (it == d->item_index.end())
      throw CorpusError("activity references unknown item: " + a.item_id);
    if (d->items[it->second].platform != platform_of(a.activity))
      throw CorpusError("activity '" + std::string(to_string(a.activity)) +
                        "' on item of the wrong platform: " + a.item_id);
    if (window && !window->contains(a.timestamp))
      throw CorpusError("activity outside corpus window at " + format_timestamp(a.timestamp));
    if (seen.emplace(a.user_id, a.item_id, a.activity).second) kept.push_back(a);
  }
  d->activities = std::move(kept);

  std::sort(links.begin(), links.end(), [](const AccountLink& a, const AccountLink& b) {
    return a.canonical_id < b.canonical_id;
  });
  d->links = std::move(links);

  std::set<std::string> users;
  for (const auto& a : d->activities) users.insert(a.user_id);
  for (const auto& l : d->links) users.insert(l.canonical_id);
  d->users.assign(users.begin(), users.end());
  for (std::size_t i = 0; i < d->users.size(); ++i)
    d->user_index.emplace(d->users[i], static_cast<std::uint32_t>(i));

  d->refs.reserve(d->activities.size());
  for (const auto& a : d->activities)
    d->refs.push_back({d->user_index.at(a.user_id), d->item_index.at(a.item_id), a.activity,
                       a.timestamp});

  if (window) {
    d->window = *window;
  } else if (!d->activities.empty()) {
    d->window = {d->activities.front().timestamp,
                 d->activities.back().timestamp + std::chrono::seconds{1}};
  }
  data_ = std::move(d);
}

inline CorpusView Corpus::view() const { return CorpusView(*this, window()); }

/// Activities with start <= timestamp < end. A zero-width slice is empty.
inline CorpusView window_slice(const Corpus& corpus, Timestamp start, Timestamp end) {
  if (end < start) throw std::invalid_argument("window_slice: end precedes start");
  return CorpusView(corpus, {start, end});
}

/// Users with at least one GitHub and at least one Stack Overflow activity in
/// the window. Sorted by canonical id.
inline std::vector<std::string> filter_base_users(const Corpus& corpus, TimeWindow window) {
  std::vector<std::uint8_t> mask(corpus.users().size(), 0);
  for (const auto& r : window_slice(corpus, window.start, window.end).refs())
    mask[r.user] |= platform_of(r.activity) == PlatformId::GitHub ? 1 : 2;
  std::vector<std::string> out;
  for (std::size_t u = 0; u < mask.size(); ++u)
    if (mask[u] == 3) out.push_back(corpus.users()[u]);
  return out;
}

// ---------------------------------------------------------------------------
// Account linkage
// ---------------------------------------------------------------------------

inline std::string unlinked_user_id(PlatformId p, std::string_view platform_user) {
  return std::string(p == PlatformId::GitHub ? "gh:" : "so:") + std::string(platform_user);
}

inline void validate_links(std::span<const AccountLink> links) {
  std::map<std::string, int> gh, so, canon;
  for (const auto& l : links) {
    if (l.canonical_id.empty() || l.github_login.empty() || l.stackoverflow_user_id.empty())
      throw CorpusError("link with empty field for canonical id '" + l.canonical_id + "'");
    ++gh[l.github_login];
    ++so[l.stackoverflow_user_id];
    ++canon[l.canonical_id];
  }
  std::string offenders;
  auto collect = [&](const std::map<std::string, int>& m, const char* what) {
    for (const auto& [k, n] : m)
      if (n > 1) offenders += std::string(offenders.empty() ? "" : ", ") + what + " '" + k + "'";
  };
  collect(gh, "github_login");
  collect(so, "stackoverflow_user_id");
  collect(canon, "canonical_id");
  if (!offenders.empty()) throw CorpusError("duplicate account links: " + offenders);
}

/// Joins both platforms' activities under canonical ids. Linked platform
/// users take their link's canonical id; unlinked ones keep a
/// platform-prefixed id ("gh:<login>", "so:<id>").
inline Corpus link_accounts(std::vector<AccountLink> links, const ParsedDump& github,
                            const ParsedDump& stackoverflow) {
  validate_links(links);
  std::unordered_map<std::string, std::string> gh_map, so_map;
  for (const auto& l : links) {
    gh_map.emplace(l.github_login, l.canonical_id);
    so_map.emplace(l.stackoverflow_user_id, l.canonical_id);
  }

  std::vector<ItemRecord> items;
  items.reserve(github.items.size() + stackoverflow.items.size());
  items.insert(items.end(), github.items.begin(), github.items.end());
  items.insert(items.end(), stackoverflow.items.begin(), stackoverflow.items.end());

  std::vector<ActivityRecord> acts;
  acts.reserve(github.activities.size() + stackoverflow.activities.size());
  auto add = [&](const ParsedDump& dump, const std::unordered_map<std::string, std::string>& map,
                 PlatformId p) {
    for (const auto& a : dump.activities) {
      auto it = map.find(a.platform_user);
      acts.push_back({it != map.end() ? it->second : unlinked_user_id(p, a.platform_user),
                      a.item_id, a.activity, a.timestamp});
    }
  };
  add(github, gh_map, PlatformId::GitHub);
  add(stackoverflow, so_map, PlatformId::StackOverflow);
  return Corpus(std::move(items), std::move(acts), std::move(links));
}

/// Links file: one record per line, "canonical_id,github_login,stackoverflow_user_id"
/// (comma or tab separated). Blank lines and lines starting with '#' are ignored.
inline std::vector<AccountLink> read_links(std::istream& in) {
  std::vector<AccountLink> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    std::vector<std::string> fields;
    std::string cur;
    for (char c : line) {
      if (c == ',' || c == '\t') {
        fields.push_back(cur);
        cur.clear();
      } else {
        cur += c;
      }
    }
    fields.push_back(cur);
    for (auto& f : fields) {
      while (!f.empty() && f.front() == ' ') f.erase(f.begin());
      while (!f.empty() && f.back() == ' ') f.pop_back();
    }
    if (fields.size() != 3)
      throw CorpusError("links file line " + std::to_string(lineno) + ": expected 3 fields");
    out.push_back({fields[0], fields[1], fields[2]});
  }
  if (in.bad()) throw CorpusError("links file: read error");
  return out;
}

// ---------------------------------------------------------------------------
// Canonical corpus files: items.jsonl, activities.jsonl, links.jsonl
// ---------------------------------------------------------------------------

inline nlohmann::json to_json(const ItemRecord& it) {
  return {{"item_id", it.item_id},
          {"platform", to_string(it.platform)},
          {"text", it.text},
          {"raw_tags", it.raw_tags},
          {"created_at", format_timestamp(it.created_at)}};
}

inline nlohmann::json to_json(const ActivityRecord& a) {
  return {{"user_id", a.user_id},
          {"item_id", a.item_id},
          {"activity", to_string(a.activity)},
          {"timestamp", format_timestamp(a.timestamp)}};
}

inline nlohmann::json to_json(const AccountLink& l) {
  return {{"canonical_id", l.canonical_id},
          {"github_login", l.github_login},
          {"stackoverflow_user_id", l.stackoverflow_user_id}};
}

inline void write_corpus(const Corpus& corpus, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto dump = [&](const char* name, auto range) {
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw CorpusError("cannot write " + (dir / name).string());
    for (const auto& rec : range) out << to_json(rec).dump() << '\n';
  };
  dump("items.jsonl", corpus.items());
  dump("activities.jsonl", corpus.activities());
  dump("links.jsonl", corpus.links());
}

namespace detail {

template <class Fn>
void for_each_json_line(const std::filesystem::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CorpusError("cannot open " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      fn(nlohmann::json::parse(line));
    } catch (const std::exception& e) {
      throw CorpusError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

}  // namespace detail

inline Corpus read_corpus(const std::filesystem::path& dir) {
  std::vector<ItemRecord> items;
  std::vector<ActivityRecord> acts;
  std::vector<AccountLink> links;
  detail::for_each_json_line(dir / "items.jsonl", [&](const nlohmann::json& j) {
    items.push_back({j.at("item_id").get<std::string>(),
                     parse_platform(j.at("platform").get<std::string>()),
                     j.at("text").get<std::string>(),
                     j.at("raw_tags").get<std::vector<std::string>>(),
                     parse_timestamp(j.at("created_at").get<std::string>())});
  });
  detail::for_each_json_line(dir / "activities.jsonl", [&](const nlohmann::json& j) {
    acts.push_back({j.at("user_id").get<std::string>(), j.at("item_id").get<std::string>(),
                    parse_activity(j.at("activity").get<std::string>()),
                    parse_timestamp(j.at("timestamp").get<std::string>())});
  });
  detail::for_each_json_line(dir / "links.jsonl", [&](const nlohmann::json& j) {
    links.push_back({j.at("canonical_id").get<std::string>(),
                     j.at("github_login").get<std::string>(),
                     j.at("stackoverflow_user_id").get<std::string>()});
  });
  return Corpus(std::move(items), std::move(acts), std::move(links));
}

}  // namespace crossact
