#pragma once

#include <algorithm>
#include <cctype>
#include <istream>
#include <map>
#include <string>

#include <json.hpp>

#include "corpus.hpp"
#include "stackoverflow.hpp"

namespace crossact {

inline std::string github_item_id(std::string_view repo_id) { return "gh:" + std::string(repo_id); }

namespace detail {

inline std::optional<ActivityType> github_event_type(std::string type) {
  std::transform(type.begin(), type.end(), type.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (type == "fork" || type == "forkevent") return ActivityType::Fork;
  if (type == "watch" || type == "star" || type == "watchevent") return ActivityType::Watch;
  return std::nullopt;
}

inline std::optional<std::string> json_scalar(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<long long>());
  return std::nullopt;
}

}  // namespace detail

/// Parses a line-oriented GitHub event export: one JSON object per line with
/// {type, actor_login, repo_id, repo_description, created_at}. Fork events
/// map to Fork activities, watch/star events to Watch. Lines for the same
/// repository merge into one item keeping the longest description.
inline ParsedDump parse_github_events(std::istream& in) {
  ParsedDump out;
  std::map<std::string, ItemRecord> repos;
  std::string line;
  std::uint64_t offset = 0;
  while (std::getline(in, line)) {
    offset += line.size() + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      ++out.skipped["malformed_line"];
      continue;
    }
    auto type = detail::json_scalar(j, "type");
    auto login = detail::json_scalar(j, "actor_login");
    auto repo = detail::json_scalar(j, "repo_id");
    auto created = detail::json_scalar(j, "created_at");
    std::optional<Timestamp> ts;
    if (created) ts = try_parse_timestamp(*created);
    if (!type || !login || login->empty() || !repo || repo->empty() || !ts) {
      ++out.skipped["malformed_line"];
      continue;
    }
    auto activity = detail::github_event_type(*type);
    if (!activity) {
      ++out.skipped["unknown_event_type"];
      continue;
    }
    auto id = github_item_id(*repo);
    std::string desc = detail::json_scalar(j, "repo_description").value_or("");
    auto [it, fresh] = repos.try_emplace(id);
    auto& item = it->second;
    if (fresh) {
      item.item_id = id;
      item.platform = PlatformId::GitHub;
      item.created_at = *ts;
    }
    item.created_at = std::min(item.created_at, *ts);
    if (desc.size() > item.text.size()) item.text = std::move(desc);
    out.activities.push_back({*login, id, *activity, *ts});
  }
  if (in.bad()) throw ParseError("read error in event stream", offset);
  out.items.reserve(repos.size());
  for (auto& [_, item] : repos) out.items.push_back(std::move(item));
  return out;
}

}  // namespace crossact
