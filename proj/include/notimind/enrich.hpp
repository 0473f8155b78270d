#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "notimind/ingest.hpp"

namespace notimind {

// Decodes UTF-8; each invalid byte becomes U+FFFD.
std::u32string decode_utf8(std::string_view text);
std::string encode_utf8(char32_t codepoint);

inline constexpr char32_t kMovieCamera = 0x1F3A5;
inline constexpr char32_t kVideoCamera = 0x1F4F9;
inline constexpr char32_t kCamera = 0x1F4F7;

// Codepoint ranges that count as emoji plus a codepoint -> name table.
// Text form: `HEX<TAB>NAME` for names, `HEX..HEX<TAB>RANGE-NAME` for ranges,
// '#' comments. A named codepoint outside every range still counts.
class EmojiTable {
 public:
  struct Range {
    char32_t first;
    char32_t last;
    std::string name;
  };

  static EmojiTable parse(std::string_view text);
  static const EmojiTable& bundled();
  static std::string_view bundled_text();

  bool is_emoji(char32_t cp) const;
  // "UNKNOWN" for emoji codepoints without a bundled name.
  std::string_view name(char32_t cp) const;

  const std::vector<Range>& ranges() const { return ranges_; }
  const std::map<char32_t, std::string>& names() const { return names_; }

 private:
  std::vector<Range> ranges_;
  std::map<char32_t, std::string> names_;
};

struct DetectorConfig {
  std::vector<std::string> work_originators{"gmail", "email", "outlook", "k9", "linkedin"};
  // Originator component -> canonical originator ("gm" is the Gmail package suffix).
  std::map<std::string, std::string> originator_aliases{{"gm", "gmail"}};
  std::vector<std::string> work_tags{"Re:", "Fwd:"};
  bool work_email_address = true;
  std::vector<std::string> system_keywords{"Updating", "WIFI", "USB"};
  std::vector<std::string> system_originators{"com.android.systemui"};
  bool multi_pattern = true;
  std::optional<std::string> emoji_table_path;

  // Keys: work_originators, originator_aliases (a:b, ...), work_tags,
  // work_email_address, system_keywords, system_originators,
  // multi_pattern, emoji_table. Lists are comma separated.
  static DetectorConfig parse(std::string_view text);
  static DetectorConfig load(const std::string& path);
};

struct EnrichedEvent {
  NotificationEvent base;
  bool is_group = false;
  bool is_work = false;
  bool is_system = false;
  bool is_multi = false;
  int emoji_count = 0;
  std::vector<std::string> emoji_descriptions;
  bool has_video = false;
  std::optional<int> video_length_seconds;
  bool has_image = false;
  int message_length = 0;

  bool operator==(const EnrichedEvent&) const = default;
};

struct EmojiCount {
  int count = 0;
  std::vector<std::string> descriptions;
};

struct MediaInfo {
  bool has_video = false;
  std::optional<int> video_length_seconds;
  bool has_image = false;
};

// Text before the first ':' of the event name, trimmed and lower-cased.
std::string originator_of(std::string_view event_name);

bool detect_group(const NotificationEvent& event);
bool detect_work(const NotificationEvent& event, const DetectorConfig& config = {});
bool detect_system(const NotificationEvent& event, const DetectorConfig& config = {});
bool detect_multi(const NotificationEvent& event, const DetectorConfig& config = {});
EmojiCount count_emojis(std::string_view message, const EmojiTable& table = EmojiTable::bundled());
MediaInfo detect_media(std::string_view message);
// "m:ss" or "h:mm:ss" to seconds.
std::optional<int> parse_duration(std::string_view token);

// Only notification events (Posted, Removed) carry content; screen,
// unlock and keyboard events enrich to all-false flags and zero counts.
class Enricher {
 public:
  Enricher();
  explicit Enricher(DetectorConfig config);
  Enricher(DetectorConfig config, EmojiTable table);

  EnrichedEvent operator()(const NotificationEvent& event) const;
  const DetectorConfig& config() const { return config_; }

 private:
  DetectorConfig config_;
  EmojiTable table_;
};

EnrichedEvent enrich(const NotificationEvent& event);

}  // namespace notimind
