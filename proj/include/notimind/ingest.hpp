#pragma once

#include <array>
#include <chrono>
#include <cstddef>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace notimind {

using Timestamp = std::chrono::sys_time<std::chrono::milliseconds>;

// RFC-3339 in UTC ("Z" or "+00:00"), at most millisecond precision.
std::optional<Timestamp> parse_timestamp(std::string_view text);
// Canonical form: YYYY-MM-DDTHH:MM:SS.mmmZ
std::string format_timestamp(Timestamp ts);

enum class EventState { kPosted, kRemoved, kScreenOn, kScreenOff, kUnlock, kKeyboardOut };
inline constexpr std::size_t kEventStateCount = 6;

enum class RingerMode { kNormal, kVibrate, kSilent, kUnknown };

std::string_view to_string(EventState state);
std::string_view to_string(RingerMode mode);
std::optional<EventState> parse_event_state(std::string_view text);
// Never fails: anything unrecognised is kUnknown.
RingerMode parse_ringer_mode(std::string_view text);

struct NotificationEvent {
  Timestamp timestamp{};
  std::string user_id;
  std::string event_name;
  EventState state = EventState::kPosted;
  std::string message;
  RingerMode volume = RingerMode::kUnknown;

  bool operator==(const NotificationEvent&) const = default;
};

// I-PANAS-SF items in storage order. The first five are the positive
// affect items, the last five the negative ones.
enum class PanasItem { kDetermined, kAttentive, kAlert, kInspired, kActive, kUpset, kAshamed, kNervous, kAfraid, kHostile };
inline constexpr std::size_t kPanasItemCount = 10;
inline constexpr std::array<std::string_view, kPanasItemCount> kPanasItemNames = {
    "Determined", "Attentive", "Alert", "Inspired", "Active", "Upset", "Ashamed", "Nervous", "Afraid", "Hostile"};

struct PanasEntry {
  Timestamp timestamp{};
  std::string user_id;
  std::array<int, kPanasItemCount> items{};

  int item(PanasItem which) const { return items[static_cast<std::size_t>(which)]; }
  int& item(PanasItem which) { return items[static_cast<std::size_t>(which)]; }

  bool operator==(const PanasEntry&) const = default;
};

enum class ParseErrorKind { kMalformed, kMissingField, kBadValue, kBadTimestamp, kBadState, kBadItemRange, kDuplicateEntry };

struct ParseError {
  ParseErrorKind kind = ParseErrorKind::kMalformed;
  std::size_t line = 0;
  std::string field;
  std::string value;

  std::string message() const;
  bool operator==(const ParseError&) const = default;
};

std::string_view to_string(ParseErrorKind kind);

std::variant<NotificationEvent, ParseError> parse_event_line(std::string_view line, std::size_t line_number = 1);
std::variant<PanasEntry, ParseError> parse_panas_line(std::string_view line, std::size_t line_number = 1);

struct EventLog {
  std::vector<NotificationEvent> events;
  std::vector<ParseError> errors;
};

struct PanasLog {
  std::vector<PanasEntry> entries;
  std::vector<ParseError> errors;
};

// Blank lines are skipped but still counted for line numbers. Output is
// sorted by (user, timestamp) and is a function of the multiset of lines.
EventLog parse_event_log(std::istream& in);
// Duplicate (user, timestamp) pairs: the first occurrence in input order
// wins, later ones become kDuplicateEntry errors.
PanasLog parse_panas_log(std::istream& in);

std::string to_json_line(const NotificationEvent& event);
std::string to_json_line(const PanasEntry& entry);

// Total order used for sorting event logs.
bool event_less(const NotificationEvent& a, const NotificationEvent& b);

}  // namespace notimind
