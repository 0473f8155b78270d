#include "notimind/synth.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>

#include <Eigen/Dense>

#include "notimind/enrich.hpp"
#include "notimind/error.hpp"
#include "notimind/panas.hpp"
#include "notimind/rng.hpp"
#include "notimind/stats.hpp"
#include "notimind/text.hpp"

namespace notimind {

namespace {

using std::chrono::milliseconds;

// Columns of the coupling array.
enum Column : std::size_t { kP, kR, kO, kF, kU, kK, kS, kM, kG, kE, kW };

constexpr std::array<std::size_t, 6> kStateColumns = {kP, kR, kO, kF, kU, kK};
constexpr std::array<std::size_t, 4> kPostColumns = {kS, kM, kG, kW};
constexpr double kMaxShift = 6.0;
constexpr std::uint64_t kCalibrationSeed = 0x5eedca11b7a7e000ULL;

double rate(long long numerator, long long denominator) {
  if (denominator <= 0) return 0.0;
  return 100.0 * static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::array<double, kRateFeatureCount> rates_of(const RawCounts& c) {
  return {rate(c.p, c.n),
          rate(c.r, c.n),
          rate(c.o, c.n),
          rate(c.f, c.n),
          rate(c.u, c.n),
          rate(c.k, c.n),
          rate(c.s, c.p),
          rate(c.m, c.p),
          rate(c.g, c.p),
          std::min(rate(c.e, c.p - c.m), kDefaultEmojiRateCap),
          std::clamp(rate(c.w, c.p - c.s), 0.0, 100.0)};
}

// Splits `total` in proportion to `weights`; leftover units go to the
// largest fractional parts, ties to the lower index.
template <std::size_t N>
std::array<long long, N> apportion(long long total, const std::array<double, N>& weights) {
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::array<long long, N> out{};
  std::array<double, N> frac{};
  long long assigned = 0;
  for (std::size_t i = 0; i < N; ++i) {
    const double exact = static_cast<double>(total) * weights[i] / sum;
    out[i] = static_cast<long long>(std::floor(exact));
    frac[i] = exact - static_cast<double>(out[i]);
    assigned += out[i];
  }
  std::array<std::size_t, N> order{};
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
  for (std::size_t i = 0; assigned < total; ++i, ++assigned) ++out[order[i % N]];
  return out;
}

struct UserProfile {
  std::array<double, 6> state_base{};
  std::array<double, 4> post_base{};  // fractions of posts: s, m, g, w
  double emoji_base = 0.0;            // emojis per non-multi post
  double coupling_scale = 1.0;
  double affect_mean = 0.0;
};

UserProfile draw_profile(const CohortSpec& spec, Rng& rng) {
  const double h = spec.heterogeneity;
  const auto spread = [&] { return std::exp(h * rng.normal() - h * h / 2.0); };
  UserProfile u;
  for (std::size_t j = 0; j < 6; ++j) u.state_base[j] = spec.state_mix[j] * spread();
  const std::array<double, 4> post{spec.system_rate, spec.multi_rate, spec.group_rate, spec.work_rate};
  for (std::size_t j = 0; j < 4; ++j) u.post_base[j] = post[j] / 100.0 * spread();
  u.emoji_base = spec.emoji_rate / 100.0 * spread();
  u.coupling_scale = std::clamp(1.0 + spec.coupling_spread * rng.normal(), 0.0, 2.0);
  u.affect_mean = rng.normal(spec.score_mean, spec.user_affect_sd);
  return u;
}

struct Latent {
  double value = 0.0;
  int score = 0;
  double z = 0.0;  // what the event mix responds to
};

Latent draw_latent(const CohortSpec& spec, const UserProfile& user, Rng& rng) {
  const double within_sd = std::sqrt(spec.score_sd * spec.score_sd - spec.user_affect_sd * spec.user_affect_sd);
  Latent l;
  const double z = rng.normal();
  l.value = user.affect_mean + within_sd * z;
  l.score = static_cast<int>(std::clamp(std::round(l.value), -20.0, 20.0));
  const double noise = rng.normal();
  l.z = std::sqrt(1.0 - spec.label_noise * spec.label_noise) * z + spec.label_noise * noise;
  return l;
}

RawCounts draw_counts(const CohortSpec& spec, const std::array<double, kRateFeatureCount>& coefficients,
                      const UserProfile& user, double z, Rng& rng) {
  const double v = spec.volatility;
  const auto factor = [&](std::size_t column) {
    return coefficients[column] * user.coupling_scale * z + rng.normal();
  };
  RawCounts counts;
  counts.n = std::max<long long>(spec.min_events_per_segment,
                                 std::llround(rng.normal(spec.events_per_segment, spec.events_per_segment_sd)));
  std::array<double, 6> weights{};
  for (std::size_t j = 0; j < 6; ++j) weights[j] = user.state_base[j] * std::exp(v * factor(kStateColumns[j]));
  const auto states = apportion<6>(counts.n, weights);
  counts.p = states[0];
  counts.r = states[1];
  counts.o = states[2];
  counts.f = states[3];
  counts.u = states[4];
  counts.k = states[5];

  std::array<double, 5> post{};
  double taken = 0.0;
  for (std::size_t j = 0; j < 4; ++j) {
    post[j] = user.post_base[j] * std::exp(v * factor(kPostColumns[j]) - v * v / 2.0);
    taken += post[j];
  }
  if (taken > 0.95) {
    for (std::size_t j = 0; j < 4; ++j) post[j] *= 0.95 / taken;
    taken = 0.95;
  }
  post[4] = 1.0 - taken;
  const double emoji_level = user.emoji_base * std::exp(v * factor(kE) - v * v / 2.0);
  if (counts.p > 0) {
    const auto split_posts = apportion<5>(counts.p, post);
    counts.s = split_posts[0];
    counts.m = split_posts[1];
    counts.g = split_posts[2];
    counts.w = split_posts[3];
    counts.e = std::llround(emoji_level * static_cast<double>(counts.p - counts.m));
  }
  return counts;
}

std::array<double, kRateFeatureCount> realized_correlations(const CohortSpec& spec,
                                                            const std::array<double, kRateFeatureCount>& coefficients) {
  const int users = 1000;
  const int per_user = 30;
  std::vector<std::vector<double>> columns(kRateFeatureCount);
  std::vector<double> scores;
  Rng rng(kCalibrationSeed);
  for (int u = 0; u < users; ++u) {
    const UserProfile profile = draw_profile(spec, rng);
    for (int s = 0; s < per_user; ++s) {
      const Latent latent = draw_latent(spec, profile, rng);
      const auto rates = rates_of(draw_counts(spec, coefficients, profile, latent.z, rng));
      for (std::size_t c = 0; c < kRateFeatureCount; ++c) columns[c].push_back(rates[c]);
      scores.push_back(latent.score);
    }
  }
  std::array<double, kRateFeatureCount> r{};
  for (std::size_t c = 0; c < kRateFeatureCount; ++c) {
    try {
      r[c] = pearson(columns[c], scores);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kConstantInput) throw;
      r[c] = 0.0;
    }
  }
  return r;
}

std::string user_name(int index, int users) {
  std::string digits = std::to_string(index + 1);
  const std::size_t width = std::max<std::size_t>(2, std::to_string(users).size());
  return "u" + std::string(width - digits.size(), '0') + digits;
}

constexpr std::array<std::string_view, 5> kPlainSenders = {"WhatsApp: Alex", "Telegram: Sam", "Messenger: Jordan",
                                                           "Instagram: Robin", "Signal: Casey"};
constexpr std::array<std::string_view, 8> kPlainMessages = {"see you later", "on my way",  "lunch today?",
                                                            "call me back",  "thanks a lot", "good night",
                                                            "where are you", "sounds great"};
constexpr std::array<std::string_view, 3> kGroupSenders = {"WhatsApp: Family @ Alex", "WhatsApp: Climbing club @ Sam",
                                                           "Telegram: Flatmates @ Jordan"};
constexpr std::array<std::string_view, 3> kWorkSenders = {"Gmail: Chris Doe", "Outlook: Dana Lee",
                                                          "LinkedIn: Recruiter"};
constexpr std::array<std::string_view, 4> kWorkMessages = {"Re: quarterly report", "Fwd: meeting notes",
                                                           "Budget review at 3pm", "Invoice attached"};
constexpr std::string_view kSystemSender = "com.android.systemui: System";
constexpr std::array<std::string_view, 3> kSystemMessages = {"Updating apps", "WIFI connected",
                                                             "USB debugging connected"};
constexpr std::array<char32_t, 5> kEmojis = {0x1F600, 0x1F602, 0x1F44D, 0x1F389, 0x1F60D};

template <std::size_t N>
std::string_view pick(const std::array<std::string_view, N>& items, Rng& rng) {
  return items[static_cast<std::size_t>(rng.below(N))];
}

enum class PostKind { kSystem, kMulti, kGroup, kWork, kPlain };

void emit_segment_events(const std::string& user, Timestamp t_start, Timestamp t_end, const RawCounts& counts,
                         Rng& rng, std::vector<NotificationEvent>& out) {
  std::vector<EventState> states;
  const auto add = [&](EventState s, long long count) { states.insert(states.end(), count, s); };
  add(EventState::kPosted, counts.p);
  add(EventState::kRemoved, counts.r);
  add(EventState::kScreenOn, counts.o);
  add(EventState::kScreenOff, counts.f);
  add(EventState::kUnlock, counts.u);
  add(EventState::kKeyboardOut, counts.k);
  rng.shuffle(std::span<EventState>(states));

  std::vector<PostKind> kinds;
  kinds.insert(kinds.end(), counts.s, PostKind::kSystem);
  kinds.insert(kinds.end(), counts.m, PostKind::kMulti);
  kinds.insert(kinds.end(), counts.g, PostKind::kGroup);
  kinds.insert(kinds.end(), counts.w, PostKind::kWork);
  kinds.insert(kinds.end(), counts.p - counts.s - counts.m - counts.g - counts.w, PostKind::kPlain);
  rng.shuffle(std::span<PostKind>(kinds));
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (kinds[i] != PostKind::kMulti) eligible.push_back(i);
  }
  std::vector<int> emojis(kinds.size(), 0);
  for (long long i = 0; i < counts.e; ++i) ++emojis[eligible[static_cast<std::size_t>(rng.below(eligible.size()))]];

  constexpr std::array<RingerMode, 3> kModes = {RingerMode::kNormal, RingerMode::kVibrate, RingerMode::kSilent};
  const RingerMode volume = kModes[static_cast<std::size_t>(rng.below(kModes.size()))];
  const long long span = (t_end - t_start).count();
  std::size_t post = 0;
  for (EventState state : states) {
    NotificationEvent ev;
    ev.user_id = user;
    ev.state = state;
    ev.volume = volume;
    ev.timestamp = t_start + milliseconds(1 + static_cast<long long>(rng.below(static_cast<std::uint64_t>(span - 1))));
    if (state == EventState::kPosted) {
      switch (kinds[post]) {
        case PostKind::kSystem:
          ev.event_name = kSystemSender;
          ev.message = pick(kSystemMessages, rng);
          break;
        case PostKind::kMulti:
          ev.event_name = "WhatsApp: WhatsApp";
          ev.message = std::to_string(2 + rng.below(8)) + " new messages";
          break;
        case PostKind::kGroup:
          ev.event_name = pick(kGroupSenders, rng);
          ev.message = pick(kPlainMessages, rng);
          break;
        case PostKind::kWork:
          ev.event_name = pick(kWorkSenders, rng);
          ev.message = pick(kWorkMessages, rng);
          break;
        case PostKind::kPlain:
          ev.event_name = pick(kPlainSenders, rng);
          ev.message = pick(kPlainMessages, rng);
          break;
      }
      for (int i = 0; i < emojis[post]; ++i) ev.message += " " + encode_utf8(kEmojis[rng.below(kEmojis.size())]);
      ++post;
    } else if (state == EventState::kRemoved) {
      ev.event_name = pick(kPlainSenders, rng);
      ev.message = pick(kPlainMessages, rng);
    }
    out.push_back(std::move(ev));
  }
}

std::optional<std::chrono::sys_days> parse_date(std::string_view text) {
  const auto ts = parse_timestamp(std::string(text) + "T00:00:00Z");
  if (!ts) return std::nullopt;
  return std::chrono::floor<std::chrono::days>(*ts);
}

std::string truth_header() {
  std::string h = "user,t_start,t_end,score,latent,n";
  for (std::string_view name : kRateFeatureNames) h += "," + std::string(name);
  return h;
}

}  // namespace

void CohortSpec::validate() const {
  const auto fail = [](const std::string& field, const std::string& why) {
    throw Error(ErrorCode::kInvalidArgument, "cohort spec " + field + ": " + why);
  };
  if (users < 0) fail("users", "must not be negative");
  if (days < 0) fail("days", "must not be negative");
  if (panas_per_day < 1 || panas_per_day > 24) fail("panas_per_day", "must be in [1, 24]");
  if (!(events_per_segment > 0)) fail("events_per_segment", "must be positive");
  if (!(events_per_segment_sd >= 0)) fail("events_per_segment_sd", "must not be negative");
  if (min_events_per_segment < 1) fail("min_events_per_segment", "must be positive");
  const double mix = std::accumulate(state_mix.begin(), state_mix.end(), 0.0);
  for (double s : state_mix) {
    if (!(s > 0)) fail("state mix", "every share must be positive");
  }
  if (std::abs(mix - 100.0) > 5.0) fail("state mix", "shares must sum to 100 +- 5, got " + format_double(mix));
  for (double r : {system_rate, multi_rate, group_rate, work_rate, emoji_rate}) {
    if (!(r > 0) || r > 100) fail("sub-rates", "must be in (0, 100]");
  }
  if (system_rate + multi_rate + group_rate + work_rate >= 95) fail("sub-rates", "system+multi+group+work must stay below 95");
  for (std::size_t c = 0; c < kRateFeatureCount; ++c) {
    if (!(std::abs(coupling[c]) <= 1.0)) fail("coupling_" + std::string(kRateFeatureNames[c]), "must be in [-1, 1]");
  }
  if (coupling[kF] != 0.0) fail("coupling_f_a", "f_a balances the other states and cannot be coupled");
  if (!(label_noise >= 0 && label_noise < 1)) fail("label_noise", "must be in [0, 1)");
  if (!(score_sd > 0)) fail("score_sd", "must be positive");
  if (!(user_affect_sd >= 0 && user_affect_sd < score_sd)) fail("user_affect_sd", "must be in [0, score_sd)");
  if (!(miss_rate >= 0 && miss_rate < 1)) fail("miss_rate", "must be in [0, 1)");
  if (!(heterogeneity >= 0)) fail("heterogeneity", "must not be negative");
  if (!(coupling_spread >= 0)) fail("coupling_spread", "must not be negative");
  if (!(volatility > 0)) fail("volatility", "must be positive");
  if (!parse_date(start_date)) fail("start_date", "expected YYYY-MM-DD, got '" + start_date + "'");
}

CohortSpec parse_cohort_spec(std::string_view text) {
  CohortSpec spec;
  const std::array<std::string_view, 6> share_keys = {"share_p", "share_r", "share_o", "share_f", "share_u", "share_k"};
  for (const KeyValue& kv : parse_key_value(text)) {
    const auto bad = [&](const std::string& why) {
      return Error(ErrorCode::kBadFormat, "cohort spec line " + std::to_string(kv.line) + ": " + why);
    };
    const auto number = [&] {
      const auto v = parse_double(kv.value);
      if (!v) throw bad("'" + kv.key + "' expects a number, got '" + kv.value + "'");
      return *v;
    };
    const auto integer = [&] {
      const auto v = parse_int(kv.value);
      if (!v) throw bad("'" + kv.key + "' expects an integer, got '" + kv.value + "'");
      return *v;
    };
    const std::string& k = kv.key;
    if (k == "users") spec.users = static_cast<int>(integer());
    else if (k == "days") spec.days = static_cast<int>(integer());
    else if (k == "panas_per_day") spec.panas_per_day = static_cast<int>(integer());
    else if (k == "events_per_segment") spec.events_per_segment = number();
    else if (k == "events_per_segment_sd") spec.events_per_segment_sd = number();
    else if (k == "min_events_per_segment") spec.min_events_per_segment = static_cast<int>(integer());
    else if (k == "rate_s") spec.system_rate = number();
    else if (k == "rate_m") spec.multi_rate = number();
    else if (k == "rate_g") spec.group_rate = number();
    else if (k == "rate_w") spec.work_rate = number();
    else if (k == "rate_e") spec.emoji_rate = number();
    else if (k == "label_noise") spec.label_noise = number();
    else if (k == "score_mean") spec.score_mean = number();
    else if (k == "score_sd") spec.score_sd = number();
    else if (k == "user_affect_sd") spec.user_affect_sd = number();
    else if (k == "miss_rate") spec.miss_rate = number();
    else if (k == "heterogeneity") spec.heterogeneity = number();
    else if (k == "coupling_spread") spec.coupling_spread = number();
    else if (k == "volatility") spec.volatility = number();
    else if (k == "start_date") spec.start_date = kv.value;
    else if (k == "seed") {
      const auto v = parse_int(kv.value);
      if (!v || *v < 0) throw bad("'seed' expects a non-negative integer, got '" + kv.value + "'");
      spec.seed = static_cast<std::uint64_t>(*v);
    } else if (const auto it = std::find(share_keys.begin(), share_keys.end(), k); it != share_keys.end()) {
      spec.state_mix[static_cast<std::size_t>(it - share_keys.begin())] = number();
    } else if (k.starts_with("coupling_")) {
      const std::string column = k.substr(9);
      const auto c = std::find(kRateFeatureNames.begin(), kRateFeatureNames.end(), column);
      if (c == kRateFeatureNames.end()) throw bad("unknown coupling column '" + column + "'");
      spec.coupling[static_cast<std::size_t>(c - kRateFeatureNames.begin())] = number();
    } else {
      throw bad("unknown key '" + k + "'");
    }
  }
  return spec;
}

std::string format_cohort_spec(const CohortSpec& spec) {
  std::string out;
  const auto put = [&](std::string_view key, const std::string& value) {
    out += std::string(key) + " = " + value + "\n";
  };
  put("users", std::to_string(spec.users));
  put("days", std::to_string(spec.days));
  put("panas_per_day", std::to_string(spec.panas_per_day));
  put("events_per_segment", format_double(spec.events_per_segment));
  put("events_per_segment_sd", format_double(spec.events_per_segment_sd));
  put("min_events_per_segment", std::to_string(spec.min_events_per_segment));
  const std::array<std::string_view, 6> share_keys = {"share_p", "share_r", "share_o", "share_f", "share_u", "share_k"};
  for (std::size_t i = 0; i < 6; ++i) put(share_keys[i], format_double(spec.state_mix[i]));
  put("rate_s", format_double(spec.system_rate));
  put("rate_m", format_double(spec.multi_rate));
  put("rate_g", format_double(spec.group_rate));
  put("rate_w", format_double(spec.work_rate));
  put("rate_e", format_double(spec.emoji_rate));
  for (std::size_t c = 0; c < kRateFeatureCount; ++c) {
    if (c != kF) put("coupling_" + std::string(kRateFeatureNames[c]), format_double(spec.coupling[c]));
  }
  put("label_noise", format_double(spec.label_noise));
  put("score_mean", format_double(spec.score_mean));
  put("score_sd", format_double(spec.score_sd));
  put("user_affect_sd", format_double(spec.user_affect_sd));
  put("miss_rate", format_double(spec.miss_rate));
  put("heterogeneity", format_double(spec.heterogeneity));
  put("coupling_spread", format_double(spec.coupling_spread));
  put("volatility", format_double(spec.volatility));
  put("start_date", spec.start_date);
  put("seed", std::to_string(spec.seed));
  return out;
}

std::array<double, kRateFeatureCount> calibrate_coupling(const CohortSpec& spec) {
  spec.validate();
  std::array<double, kRateFeatureCount> a{};
  std::vector<std::size_t> active;
  const bool states_coupled = std::any_of(kStateColumns.begin(), kStateColumns.end(),
                                          [&](std::size_t c) { return spec.coupling[c] != 0.0; });
  const bool posts_coupled =
      spec.coupling[kE] != 0.0 ||
      std::any_of(kPostColumns.begin(), kPostColumns.end(), [&](std::size_t c) { return spec.coupling[c] != 0.0; });
  if (states_coupled) {
    for (std::size_t c : kStateColumns) {
      if (c != kF) active.push_back(c);
    }
  }
  if (posts_coupled) {
    active.insert(active.end(), kPostColumns.begin(), kPostColumns.end());
    active.push_back(kE);
  }
  if (active.empty()) return a;
  for (std::size_t c : active) a[c] = spec.coupling[c];

  constexpr int kIterations = 30;
  constexpr double kTolerance = 1e-3;
  constexpr double kProbe = 0.05;
  const auto m = static_cast<Eigen::Index>(active.size());
  std::array<double, kRateFeatureCount> r{};
  for (int it = 0; it < kIterations; ++it) {
    r = realized_correlations(spec, a);
    Eigen::VectorXd residual(m);
    for (Eigen::Index i = 0; i < m; ++i) residual(i) = spec.coupling[active[i]] - r[active[i]];
    if (residual.cwiseAbs().maxCoeff() < kTolerance) return a;
    Eigen::MatrixXd jacobian(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
      auto probe = a;
      probe[active[j]] += kProbe;
      const auto shifted = realized_correlations(spec, probe);
      for (Eigen::Index i = 0; i < m; ++i) jacobian(i, j) = (shifted[active[i]] - r[active[i]]) / kProbe;
    }
    Eigen::VectorXd step = jacobian.colPivHouseholderQr().solve(residual);
    if (!step.allFinite()) break;
    const double largest = step.cwiseAbs().maxCoeff();
    if (largest > 1.0) step /= largest;
    bool moved = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      const double next = std::clamp(a[active[i]] + step(i), -kMaxShift, kMaxShift);
      moved = moved || next != a[active[i]];
      a[active[i]] = next;
    }
    if (!moved) break;
  }
  std::size_t worst_column = active.front();
  for (std::size_t c : active) {
    if (std::abs(spec.coupling[c] - r[c]) > std::abs(spec.coupling[worst_column] - r[worst_column])) worst_column = c;
  }
  if (std::abs(spec.coupling[worst_column] - r[worst_column]) > 0.01) {
    throw Error(ErrorCode::kInfeasibleCoupling,
                std::string(kRateFeatureNames[worst_column]) + " target " + format_fixed(spec.coupling[worst_column], 3) +
                    " but at most " + format_fixed(r[worst_column], 3) + " is reachable with label_noise " +
                    format_double(spec.label_noise));
  }
  return a;
}

Cohort generate_cohort(const CohortSpec& spec) { return generate_cohort(spec, calibrate_coupling(spec)); }

Cohort generate_cohort(const CohortSpec& spec, const std::array<double, kRateFeatureCount>& coefficients) {
  spec.validate();
  Cohort cohort;
  const std::chrono::sys_days start = *parse_date(spec.start_date);
  const milliseconds spacing{24LL * 3600 * 1000 / spec.panas_per_day};
  for (int u = 0; u < spec.users; ++u) {
    const std::string user = user_name(u, spec.users);
    Rng rng(derive_seed(spec.seed, {hash_string(user)}));
    const UserProfile profile = draw_profile(spec, rng);

    std::vector<Timestamp> times;
    const int reports = spec.days * spec.panas_per_day;
    for (int i = 0; i < reports; ++i) {
      const double jitter_s = std::clamp(rng.normal(0.0, 600.0), -1800.0, 1800.0);
      const bool missed = rng.uniform() < spec.miss_rate;
      if (missed && i > 0 && i + 1 < reports) continue;
      const Timestamp t = Timestamp(start) + std::chrono::hours{7} + spacing * i +
                          std::chrono::seconds{std::llround(jitter_s)};
      times.push_back(t);
    }

    std::vector<NotificationEvent> events;
    for (std::size_t i = 0; i < times.size(); ++i) {
      const Latent latent = draw_latent(spec, profile, rng);
      PanasEntry entry;
      entry.timestamp = times[i];
      entry.user_id = user;
      entry.items = panas_items_for(latent.score);
      cohort.panas.push_back(entry);
      if (i == 0) continue;
      const RawCounts counts = draw_counts(spec, coefficients, profile, latent.z, rng);
      emit_segment_events(user, times[i - 1], times[i], counts, rng, events);
      if (times[i] - times[i - 1] > kDefaultMaxGap) continue;
      TruthRow row;
      row.user_id = user;
      row.t_start = times[i - 1];
      row.t_end = times[i];
      row.score = latent.score;
      row.latent = latent.value;
      row.counts = counts;
      row.rates = rates_of(counts);
      cohort.truth.push_back(std::move(row));
    }
    std::sort(events.begin(), events.end(), event_less);
    cohort.events.insert(cohort.events.end(), std::make_move_iterator(events.begin()),
                         std::make_move_iterator(events.end()));
  }
  return cohort;
}

std::array<int, kPanasItemCount> panas_items_for(int balance) {
  if (balance < -20 || balance > 20) {
    throw Error(ErrorCode::kInvalidArgument, "balance " + std::to_string(balance) + " outside [-20, 20]");
  }
  std::array<int, kPanasItemCount> items{};
  for (std::size_t i = 0; i < 5; ++i) items[i] = 1;
  for (std::size_t i = 5; i < 10; ++i) items[i] = 5;
  int current = -20;
  for (std::size_t step = 0; current < balance && step < 20; ++step, ++current) ++items[step % 5];
  for (std::size_t step = 0; current < balance; ++step, ++current) --items[5 + step % 5];
  return items;
}

std::string write_events_jsonl(std::span<const NotificationEvent> events) {
  std::string out;
  for (const NotificationEvent& e : events) out += to_json_line(e) + "\n";
  return out;
}

std::string write_panas_jsonl(std::span<const PanasEntry> entries) {
  std::string out;
  for (const PanasEntry& e : entries) out += to_json_line(e) + "\n";
  return out;
}

std::string write_truth_csv(std::span<const TruthRow> rows) {
  std::string out = truth_header() + "\n";
  for (const TruthRow& r : rows) {
    out += r.user_id + "," + format_timestamp(r.t_start) + "," + format_timestamp(r.t_end) + "," +
           std::to_string(r.score) + "," + format_double(r.latent) + "," + std::to_string(r.counts.n);
    for (double v : r.rates) out += "," + format_double(v);
    out += "\n";
  }
  return out;
}

std::vector<TruthRow> read_truth_csv(std::string_view text) {
  std::vector<TruthRow> rows;
  const std::vector<std::string_view> lines = split(text, '\n');
  const auto fail = [](std::size_t line, const std::string& why) {
    return Error(ErrorCode::kBadFormat, "ground truth line " + std::to_string(line) + ": " + why);
  };
  if (lines.empty() || trim(lines[0]) != truth_header()) throw fail(1, "unexpected header");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim(lines[i]).empty()) continue;
    const std::vector<std::string_view> f = split(trim(lines[i]), ',');
    if (f.size() != 6 + kRateFeatureCount) throw fail(i + 1, "expected " + std::to_string(6 + kRateFeatureCount) + " fields");
    TruthRow r;
    r.user_id = std::string(f[0]);
    const auto t0 = parse_timestamp(f[1]);
    const auto t1 = parse_timestamp(f[2]);
    const auto score = parse_int(f[3]);
    const auto latent = parse_double(f[4]);
    const auto n = parse_int(f[5]);
    if (!t0 || !t1 || !score || !latent || !n) throw fail(i + 1, "bad field");
    r.t_start = *t0;
    r.t_end = *t1;
    r.score = static_cast<int>(*score);
    r.latent = *latent;
    r.counts.n = *n;
    for (std::size_t c = 0; c < kRateFeatureCount; ++c) {
      const auto v = parse_double(f[6 + c]);
      if (!v) throw fail(i + 1, "bad rate '" + std::string(f[6 + c]) + "'");
      r.rates[c] = *v;
    }
    rows.push_back(std::move(r));
  }
  return rows;
}

VerifyReport verify_cohort(std::span<const NotificationEvent> events, std::span<const PanasEntry> panas,
                           std::span<const TruthRow> truth) {
  VerifyReport report;
  const Enricher enricher;
  std::vector<EnrichedEvent> enriched;
  enriched.reserve(events.size());
  for (const NotificationEvent& e : events) enriched.push_back(enricher(e));
  const SegmentationResult segmented = build_segments(enriched, panas);

  const auto record = [&](const std::string& user, Timestamp t_end, std::string detail) {
    ++report.mismatches;
    if (report.first.size() < 10) report.first.push_back(SegmentMismatch{user, t_end, std::move(detail)});
  };
  std::map<std::pair<std::string, Timestamp>, const Segment*> recovered;
  for (const Segment& s : segmented.segments) recovered[{s.user_id, s.t_end}] = &s;
  for (const TruthRow& row : truth) {
    ++report.checked;
    const auto it = recovered.find({row.user_id, row.t_end});
    if (it == recovered.end()) {
      record(row.user_id, row.t_end, "segment missing from the pipeline output");
      continue;
    }
    const Segment& seg = *it->second;
    recovered.erase(it);
    std::string detail;
    if (seg.t_start != row.t_start) detail += "t_start differs; ";
    if (seg.score.balance != row.score) {
      detail += "score " + std::to_string(seg.score.balance) + " vs " + std::to_string(row.score) + "; ";
    }
    if (seg.counts.n != row.counts.n) {
      detail += "n " + std::to_string(seg.counts.n) + " vs " + std::to_string(row.counts.n) + "; ";
    }
    const auto got = seg.features.rates();
    for (std::size_t c = 0; c < kRateFeatureCount; ++c) {
      if (std::abs(got[c] - row.rates[c]) > 1e-9) {
        detail += std::string(kRateFeatureNames[c]) + " " + format_double(got[c]) + " vs " + format_double(row.rates[c]) + "; ";
      }
    }
    if (!detail.empty()) {
      detail.resize(detail.size() - 2);
      record(row.user_id, row.t_end, detail);
    }
  }
  for (const auto& [key, seg] : recovered) record(key.first, key.second, "segment absent from the ground truth");
  return report;
}

}  // namespace notimind
