#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <set>
#include <utility>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "corpus.hpp"

namespace crossact {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::uint64_t offset)
      : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::uint64_t offset() const { return offset_; }

 private:
  std::uint64_t offset_;
};

namespace xml {

using Attributes = std::unordered_map<std::string, std::string>;

/// Decodes the five predefined entities and numeric character references.
/// Returns nullopt on an unterminated or unknown entity.
inline std::optional<std::string> decode_entities(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '&') {
      out += s[i];
      continue;
    }
    auto semi = s.find(';', i);
    if (semi == std::string_view::npos) return std::nullopt;
    auto ent = s.substr(i + 1, semi - i - 1);
    if (ent == "lt") out += '<';
    else if (ent == "gt") out += '>';
    else if (ent == "amp") out += '&';
    else if (ent == "quot") out += '"';
    else if (ent == "apos") out += '\'';
    else if (ent.size() > 1 && ent[0] == '#') {
      std::uint32_t cp = 0;
      bool hex = ent[1] == 'x' || ent[1] == 'X';
      auto digits = ent.substr(hex ? 2 : 1);
      if (digits.empty() || digits.size() > 8) return std::nullopt;
      for (char c : digits) {
        int v;
        if (c >= '0' && c <= '9') v = c - '0';
        else if (hex && c >= 'a' && c <= 'f') v = c - 'a' + 10;
        else if (hex && c >= 'A' && c <= 'F') v = c - 'A' + 10;
        else return std::nullopt;
        cp = cp * (hex ? 16 : 10) + static_cast<std::uint32_t>(v);
      }
      if (cp > 0x10FFFF) return std::nullopt;
      // UTF-8 encode
      if (cp < 0x80) {
        out += static_cast<char>(cp);
      } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
      }
    } else {
      return std::nullopt;
    }
    i = semi;
  }
  return out;
}

/// Parses the attribute list of a `<row .../>` element body (the text
/// between "<row" and "/>"). Returns nullopt if malformed.
inline std::optional<Attributes> parse_attributes(std::string_view body) {
  Attributes attrs;
  std::size_t i = 0;
  auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
  while (true) {
    while (i < body.size() && is_space(body[i])) ++i;
    if (i == body.size()) break;
    std::size_t name_start = i;
    while (i < body.size() && body[i] != '=' && !is_space(body[i])) ++i;
    auto name = body.substr(name_start, i - name_start);
    while (i < body.size() && is_space(body[i])) ++i;
    if (name.empty() || i == body.size() || body[i] != '=') return std::nullopt;
    ++i;
    while (i < body.size() && is_space(body[i])) ++i;
    if (i == body.size() || (body[i] != '"' && body[i] != '\'')) return std::nullopt;
    char quote = body[i++];
    auto close = body.find(quote, i);
    if (close == std::string_view::npos) return std::nullopt;
    auto value = decode_entities(body.substr(i, close - i));
    if (!value) return std::nullopt;
    if (!attrs.emplace(std::string(name), std::move(*value)).second) return std::nullopt;
    i = close + 1;
    if (i < body.size() && !is_space(body[i])) return std::nullopt;
  }
  return attrs;
}

/// Streams `<row .../>` elements out of a Stack Exchange dump. Anything
/// outside row elements (XML declaration, enclosing tag) is ignored.
class RowReader {
 public:
  explicit RowReader(std::istream& in) : in_(in) {}

  enum class Status { Row, Malformed, End };

  /// On Row, `attrs()` holds the attributes.
  Status next() {
    while (true) {
      auto open = buf_.find("<row", scan_);
      if (open == std::string::npos) {
        compact(std::max(scan_, buf_.size() > 3 ? buf_.size() - 3 : 0));
        if (!fill()) return Status::End;
        continue;
      }
      if (open + 4 >= buf_.size()) {
        compact(open);
        if (!fill()) return truncated();
        continue;
      }
      char after = buf_[open + 4];
      if (!is_space(after) && after != '/') {
        scan_ = open + 4;
        continue;
      }
      auto [end, ok] = find_element_end(open + 4);
      if (end == std::string::npos) {
        compact(open);
        if (!fill()) return truncated();
        continue;
      }
      if (!ok) {
        scan_ = end;
        return Status::Malformed;
      }
      auto attrs = parse_attributes(std::string_view(buf_).substr(open + 4, end - open - 4));
      scan_ = end + 2;
      if (!attrs) return Status::Malformed;
      attrs_ = std::move(*attrs);
      return Status::Row;
    }
  }

  const Attributes& attrs() const { return attrs_; }
  std::uint64_t offset() const { return base_offset_ + scan_; }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

  Status truncated() {
    scan_ = buf_.size();
    return Status::Malformed;
  }

  // Index of the "/>" closing the element, skipping quoted values. An
  // unquoted '<' or '>' first means a malformed element (ok = false, index
  // where scanning should resume). npos: need more input.
  std::pair<std::size_t, bool> find_element_end(std::size_t from) const {
    char quote = 0;
    for (std::size_t i = from; i < buf_.size(); ++i) {
      char c = buf_[i];
      if (quote) {
        if (c == quote) quote = 0;
      } else if (c == '"' || c == '\'') {
        quote = c;
      } else if (c == '/') {
        if (i + 1 == buf_.size()) return {std::string::npos, false};
        if (buf_[i + 1] == '>') return {i, true};
      } else if (c == '>') {
        return {i + 1, false};
      } else if (c == '<') {
        return {i, false};
      }
    }
    return {std::string::npos, false};
  }

  void compact(std::size_t keep_from) {
    base_offset_ += keep_from;
    buf_.erase(0, keep_from);
    scan_ = 0;
  }

  bool fill() {
    char chunk[1 << 16];
    // Take what is already buffered first, so a device error on the next
    // read reports the offset of everything consumed before it.
    std::streamsize want = sizeof chunk;
    if (auto avail = in_.rdbuf() ? in_.rdbuf()->in_avail() : 0; avail > 0)
      want = std::min<std::streamsize>(avail, want);
    in_.read(chunk, want);
    auto got = in_.gcount();
    if (got > 0) buf_.append(chunk, static_cast<std::size_t>(got));
    if (in_.bad()) throw ParseError("read error in dump stream", base_offset_ + buf_.size());
    return got > 0;
  }

  std::istream& in_;
  std::string buf_;
  std::size_t scan_ = 0;
  std::uint64_t base_offset_ = 0;
  Attributes attrs_;
};

}  // namespace xml

inline std::string stackoverflow_item_id(std::string_view post_id) {
  return "so:" + std::string(post_id);
}

/// Splits a Tags attribute. Accepts "<a><b>" and the newer "|a|b|" layout.
inline std::vector<std::string> split_tags(std::string_view tags) {
  std::vector<std::string> out;
  if (tags.empty()) return out;
  if (tags.front() == '<') {
    std::size_t i = 0;
    while (i < tags.size()) {
      auto open = tags.find('<', i);
      if (open == std::string_view::npos) break;
      auto close = tags.find('>', open);
      if (close == std::string_view::npos) break;
      if (close > open + 1) out.emplace_back(tags.substr(open + 1, close - open - 1));
      i = close + 1;
    }
  } else {
    std::size_t i = 0;
    while (i <= tags.size()) {
      auto bar = tags.find('|', i);
      if (bar == std::string_view::npos) bar = tags.size();
      if (bar > i) out.emplace_back(tags.substr(i, bar - i));
      i = bar + 1;
    }
  }
  return out;
}

/// Parses Posts.xml and Votes.xml rows. Questions (PostTypeId=1) become
/// items, answers (PostTypeId=2) become Answer activities of their owner on
/// the parent question, and favorite votes (VoteTypeId=5) become Favorite
/// activities. Skipped rows are counted per reason in `skipped`.
inline ParsedDump parse_stackoverflow(std::istream& posts, std::istream* votes = nullptr) {
  ParsedDump out;
  auto skip = [&](const char* reason) { ++out.skipped[reason]; };
  auto get = [](const xml::Attributes& a, const char* key) -> const std::string* {
    auto it = a.find(key);
    return it == a.end() || it->second.empty() ? nullptr : &it->second;
  };

  {
    xml::RowReader rows(posts);
    for (auto st = rows.next(); st != xml::RowReader::Status::End; st = rows.next()) {
      if (st == xml::RowReader::Status::Malformed) {
        skip("malformed_row");
        continue;
      }
      const auto& a = rows.attrs();
      auto id = get(a, "Id");
      auto type = get(a, "PostTypeId");
      auto created = get(a, "CreationDate");
      if (!id || !type || !created) {
        skip("malformed_row");
        continue;
      }
      auto ts = try_parse_timestamp(*created);
      if (!ts) {
        skip("malformed_row");
        continue;
      }
      if (*type == "1") {
        ItemRecord q;
        q.item_id = stackoverflow_item_id(*id);
        q.platform = PlatformId::StackOverflow;
        if (auto tags = get(a, "Tags")) q.raw_tags = split_tags(*tags);
        if (auto title = get(a, "Title")) q.text = *title;
        for (const auto& t : q.raw_tags) q.text += (q.text.empty() ? "" : " ") + t;
        q.created_at = *ts;
        out.items.push_back(std::move(q));
      } else if (*type == "2") {
        auto owner = get(a, "OwnerUserId");
        auto parent = get(a, "ParentId");
        if (!owner || !parent) {
          skip("missing_owner_or_parent");
          continue;
        }
        out.activities.push_back({*owner, stackoverflow_item_id(*parent), ActivityType::Answer, *ts});
      } else {
        skip("other_post_type");
      }
    }
  }

  if (votes) {
    xml::RowReader rows(*votes);
    for (auto st = rows.next(); st != xml::RowReader::Status::End; st = rows.next()) {
      if (st == xml::RowReader::Status::Malformed) {
        skip("malformed_row");
        continue;
      }
      const auto& a = rows.attrs();
      auto type = get(a, "VoteTypeId");
      auto post = get(a, "PostId");
      auto created = get(a, "CreationDate");
      if (!type || !post || !created) {
        skip("malformed_row");
        continue;
      }
      if (*type != "5") continue;  // only favorites are activities
      auto ts = try_parse_timestamp(*created);
      if (!ts) {
        skip("malformed_row");
        continue;
      }
      auto user = get(a, "UserId");
      if (!user) {
        skip("missing_owner_or_parent");
        continue;
      }
      out.activities.push_back({*user, stackoverflow_item_id(*post), ActivityType::Favorite, *ts});
    }
  }

  // Answers/favorites on questions outside the dump cannot be resolved.
  std::set<std::string> known;
  for (const auto& q : out.items) known.insert(q.item_id);
  std::erase_if(out.activities, [&](const RawActivity& r) {
    if (known.count(r.item_id)) return false;
    ++out.skipped["unknown_question"];
    return true;
  });
  // Duplicate question rows: the first one wins.
  std::set<std::string> seen;
  std::erase_if(out.items, [&](const ItemRecord& q) {
    if (seen.insert(q.item_id).second) return false;
    ++out.skipped["duplicate_question"];
    return true;
  });
  return out;
}

}  // namespace crossact
