#include "notimind/enrich.hpp"

#include <algorithm>
#include <cctype>

#include "notimind/error.hpp"
#include "notimind/text.hpp"

namespace notimind {

namespace {

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

std::vector<std::string> parse_list(std::string_view value) {
  std::vector<std::string> out;
  for (std::string_view item : split(value, ',')) {
    item = trim(item);
    if (!item.empty()) out.emplace_back(item);
  }
  return out;
}

bool parse_bool(const KeyValue& kv) {
  const std::string v = to_lower(kv.value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw Error(ErrorCode::kBadFormat, "line " + std::to_string(kv.line) + ": " + kv.key + " expects a boolean");
}

// Tags match at a token start so "Re:" does not fire inside "Score:".
bool contains_tag(std::string_view lowered_message, std::string_view lowered_tag) {
  if (lowered_tag.empty()) return false;
  std::size_t pos = lowered_message.find(lowered_tag);
  while (pos != std::string_view::npos) {
    if (pos == 0 || !is_alnum(lowered_message[pos - 1])) return true;
    pos = lowered_message.find(lowered_tag, pos + 1);
  }
  return false;
}

// "@" directly followed by label(.label)+ whose last label has >= 2 letters.
bool contains_email_domain(std::string_view message) {
  for (std::size_t at = message.find('@'); at != std::string_view::npos; at = message.find('@', at + 1)) {
    std::size_t pos = at + 1;
    int labels = 0;
    std::size_t last_label_letters = 0;
    bool last_label_alpha = true;
    while (true) {
      const std::size_t start = pos;
      bool all_alpha = true;
      while (pos < message.size() && (is_alnum(message[pos]) || message[pos] == '-')) {
        if (!is_alpha(message[pos])) all_alpha = false;
        ++pos;
      }
      if (pos == start) break;
      ++labels;
      last_label_letters = pos - start;
      last_label_alpha = all_alpha;
      if (pos + 1 < message.size() && message[pos] == '.' && (is_alnum(message[pos + 1]))) {
        ++pos;
        continue;
      }
      break;
    }
    if (labels >= 2 && last_label_alpha && last_label_letters >= 2) return true;
  }
  return false;
}

std::vector<std::string> originator_components(std::string_view originator) {
  std::vector<std::string> parts;
  std::string current;
  for (char c : originator) {
    if (c == '.' || c == '-' || c == '_' || std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) parts.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty()) parts.push_back(std::move(current));
  return parts;
}

}  // namespace

std::u32string decode_utf8(std::string_view text) {
  std::u32string out;
  out.reserve(text.size());
  std::size_t i = 0;
  const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
  while (i < text.size()) {
    const unsigned char b0 = byte(i);
    std::size_t len = 0;
    char32_t cp = 0;
    char32_t min = 0;
    if (b0 < 0x80) {
      out.push_back(b0);
      ++i;
      continue;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2, cp = b0 & 0x1F, min = 0x80;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3, cp = b0 & 0x0F, min = 0x800;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4, cp = b0 & 0x07, min = 0x10000;
    }
    bool ok = len != 0 && i + len <= text.size();
    for (std::size_t k = 1; ok && k < len; ++k) {
      if ((byte(i + k) & 0xC0) != 0x80) ok = false;
      else cp = (cp << 6) | (byte(i + k) & 0x3F);
    }
    if (ok && (cp < min || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF))) ok = false;
    if (ok) {
      out.push_back(cp);
      i += len;
    } else {
      out.push_back(0xFFFD);
      ++i;
    }
  }
  return out;
}

std::string encode_utf8(char32_t cp) {
  std::string out;
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
  return out;
}

DetectorConfig DetectorConfig::parse(std::string_view text) {
  DetectorConfig config;
  for (const KeyValue& kv : parse_key_value(text)) {
    if (kv.key == "work_originators") {
      config.work_originators = parse_list(kv.value);
    } else if (kv.key == "originator_aliases") {
      config.originator_aliases.clear();
      for (const std::string& pair : parse_list(kv.value)) {
        const auto colon = pair.find(':');
        if (colon == std::string::npos) {
          throw Error(ErrorCode::kBadFormat, "line " + std::to_string(kv.line) + ": alias expects from:to");
        }
        config.originator_aliases[to_lower(trim(pair.substr(0, colon)))] = to_lower(trim(pair.substr(colon + 1)));
      }
    } else if (kv.key == "work_tags") {
      config.work_tags = parse_list(kv.value);
    } else if (kv.key == "work_email_address") {
      config.work_email_address = parse_bool(kv);
    } else if (kv.key == "system_keywords") {
      config.system_keywords = parse_list(kv.value);
    } else if (kv.key == "system_originators") {
      config.system_originators = parse_list(kv.value);
    } else if (kv.key == "multi_pattern") {
      config.multi_pattern = parse_bool(kv);
    } else if (kv.key == "emoji_table") {
      config.emoji_table_path = kv.value;
    } else {
      throw Error(ErrorCode::kBadFormat, "line " + std::to_string(kv.line) + ": unknown key " + kv.key);
    }
  }
  return config;
}

DetectorConfig DetectorConfig::load(const std::string& path) { return parse(read_file(path)); }

std::string originator_of(std::string_view event_name) {
  const auto colon = event_name.find(':');
  return to_lower(trim(event_name.substr(0, colon)));
}

bool detect_group(const NotificationEvent& event) { return event.event_name.find('@') != std::string::npos; }

bool detect_work(const NotificationEvent& event, const DetectorConfig& config) {
  for (std::string component : originator_components(originator_of(event.event_name))) {
    if (auto it = config.originator_aliases.find(component); it != config.originator_aliases.end()) {
      component = it->second;
    }
    for (const std::string& known : config.work_originators) {
      if (component == to_lower(known)) return true;
    }
  }
  const std::string message = to_lower(event.message);
  for (const std::string& tag : config.work_tags) {
    if (contains_tag(message, to_lower(tag))) return true;
  }
  return config.work_email_address && contains_email_domain(event.message);
}

bool detect_system(const NotificationEvent& event, const DetectorConfig& config) {
  const std::string originator = originator_of(event.event_name);
  for (const std::string& sys : config.system_originators) {
    if (originator == to_lower(sys)) return true;
  }
  const std::string message = to_lower(event.message);
  const std::string name = to_lower(event.event_name);
  for (const std::string& keyword : config.system_keywords) {
    const std::string k = to_lower(keyword);
    if (k.empty()) continue;
    if (message.find(k) != std::string::npos || name.find(k) != std::string::npos) return true;
  }
  return false;
}

// <int >= 2> <ws> [new <ws>] message[s], nothing else.
bool detect_multi(const NotificationEvent& event, const DetectorConfig& config) {
  if (!config.multi_pattern) return false;
  const std::string text = to_lower(trim(event.message));
  std::size_t pos = 0;
  while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) ++pos;
  if (pos == 0) return false;
  const std::string_view digits = std::string_view(text).substr(0, pos);
  const auto skip_space = [&] {
    const std::size_t start = pos;
    while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    return pos > start;
  };
  if (!skip_space()) return false;
  std::string_view rest = std::string_view(text).substr(pos);
  if (rest.substr(0, 3) == "new") {
    pos += 3;
    if (!skip_space()) return false;
    rest = std::string_view(text).substr(pos);
  }
  if (rest != "message" && rest != "messages") return false;
  // Compare the count without overflowing: strip leading zeros first.
  const std::size_t nz = digits.find_first_not_of('0');
  if (nz == std::string_view::npos) return false;
  const std::string_view significant = digits.substr(nz);
  return significant.size() > 1 || significant[0] >= '2';
}

EmojiCount count_emojis(std::string_view message, const EmojiTable& table) {
  EmojiCount result;
  for (char32_t cp : decode_utf8(message)) {
    if (!table.is_emoji(cp)) continue;
    ++result.count;
    result.descriptions.emplace_back(table.name(cp));
  }
  return result;
}

std::optional<int> parse_duration(std::string_view token) {
  const auto parts = split(token, ':');
  if (parts.size() != 2 && parts.size() != 3) return std::nullopt;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (parts[i].empty() || parts[i].size() > 6) return std::nullopt;
    if (i > 0 && parts[i].size() != 2) return std::nullopt;
    for (char c : parts[i]) {
      if (c < '0' || c > '9') return std::nullopt;
    }
  }
  const auto value = [&](std::size_t i) { return static_cast<int>(*parse_int(parts[i])); };
  if (parts.size() == 2) {
    if (value(1) > 59) return std::nullopt;
    return value(0) * 60 + value(1);
  }
  if (value(1) > 59 || value(2) > 59) return std::nullopt;
  return value(0) * 3600 + value(1) * 60 + value(2);
}

MediaInfo detect_media(std::string_view message) {
  MediaInfo info;
  const std::u32string cps = decode_utf8(message);
  std::size_t video_at = std::u32string::npos;
  for (std::size_t i = 0; i < cps.size(); ++i) {
    if ((cps[i] == kMovieCamera || cps[i] == kVideoCamera) && video_at == std::u32string::npos) video_at = i;
    if (cps[i] == kCamera) info.has_image = true;
  }
  if (video_at == std::u32string::npos) return info;
  info.has_video = true;
  // First run of digits and colons that contains a colon.
  for (std::size_t i = video_at + 1; i < cps.size(); ++i) {
    if (!(cps[i] >= U'0' && cps[i] <= U'9')) continue;
    std::string token;
    std::size_t j = i;
    while (j < cps.size() && ((cps[j] >= U'0' && cps[j] <= U'9') || cps[j] == U':')) token.push_back(static_cast<char>(cps[j++]));
    if (token.find(':') == std::string::npos) {
      i = j;
      continue;
    }
    info.video_length_seconds = parse_duration(token);
    break;
  }
  return info;
}

Enricher::Enricher() : Enricher(DetectorConfig{}) {}

Enricher::Enricher(DetectorConfig config)
    : config_(std::move(config)),
      table_(config_.emoji_table_path ? EmojiTable::parse(read_file(*config_.emoji_table_path)) : EmojiTable::bundled()) {}

Enricher::Enricher(DetectorConfig config, EmojiTable table) : config_(std::move(config)), table_(std::move(table)) {}

EnrichedEvent Enricher::operator()(const NotificationEvent& event) const {
  EnrichedEvent out;
  out.base = event;
  if (event.state != EventState::kPosted && event.state != EventState::kRemoved) return out;
  out.is_group = detect_group(event);
  out.is_work = detect_work(event, config_);
  out.is_system = detect_system(event, config_);
  out.is_multi = detect_multi(event, config_);
  if (!out.is_multi) {
    EmojiCount emojis = count_emojis(event.message, table_);
    out.emoji_count = emojis.count;
    out.emoji_descriptions = std::move(emojis.descriptions);
  }
  const MediaInfo media = detect_media(event.message);
  out.has_video = media.has_video;
  out.video_length_seconds = media.video_length_seconds;
  out.has_image = media.has_image;
  out.message_length = static_cast<int>(decode_utf8(event.message).size());
  return out;
}

EnrichedEvent enrich(const NotificationEvent& event) {
  static const Enricher default_enricher;
  return default_enricher(event);
}

}  // namespace notimind
