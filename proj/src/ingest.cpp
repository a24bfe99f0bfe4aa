#include "bispectral/ingest.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <numeric>
#include <optional>
#include <ostream>

#include "bispectral/error.hpp"

namespace bispectral {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    out.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
  T value{};
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
  return value;
}

std::optional<int> fixed_digits(std::string_view s, std::size_t pos, std::size_t count) {
  if (pos + count > s.size()) return std::nullopt;
  int v = 0;
  for (std::size_t i = pos; i < pos + count; ++i) {
    if (s[i] < '0' || s[i] > '9') return std::nullopt;
    v = v * 10 + (s[i] - '0');
  }
  return v;
}

TimestampFormat detect_format(std::string_view ts) {
  return ts.size() > 10 && ts[10] == 'T' ? TimestampFormat::iso8601
                                         : TimestampFormat::space_separated;
}

[[noreturn]] void line_error(std::size_t line, const std::string& what) {
  throw Error("line " + std::to_string(line) + ": " + what);
}

}  // namespace

std::string_view to_string(PriceColumn c) noexcept {
  switch (c) {
    case PriceColumn::open: return "open";
    case PriceColumn::high: return "high";
    case PriceColumn::low: return "low";
    case PriceColumn::close: return "close";
  }
  return "close";
}

PriceColumn parse_price_column(std::string_view name) {
  if (name == "open") return PriceColumn::open;
  if (name == "high") return PriceColumn::high;
  if (name == "low") return PriceColumn::low;
  if (name == "close") return PriceColumn::close;
  throw Error("unknown price column '" + std::string(name) +
              "' (expected open, high, low or close)");
}

MinuteTime parse_timestamp(std::string_view text) {
  const std::string_view s = trim(text);
  const auto year = fixed_digits(s, 0, 4);
  const auto month = fixed_digits(s, 5, 2);
  const auto day = fixed_digits(s, 8, 2);
  const auto hour = fixed_digits(s, 11, 2);
  const auto minute = fixed_digits(s, 14, 2);
  const bool separators_ok = s.size() >= 16 && s[4] == '-' && s[7] == '-' &&
                             (s[10] == ' ' || s[10] == 'T') && s[13] == ':';
  if (!year || !month || !day || !hour || !minute || !separators_ok) {
    throw Error("bad timestamp '" + std::string(s) +
                "' (expected YYYY-MM-DD HH:MM or YYYY-MM-DDTHH:MM[:SS])");
  }
  std::string_view rest = s.substr(16);
  if (!rest.empty() && rest.front() == ':') {
    const auto seconds = fixed_digits(rest, 1, 2);
    if (!seconds) throw Error("bad seconds field in timestamp '" + std::string(s) + "'");
    if (*seconds != 0) {
      throw Error("timestamp '" + std::string(s) + "' is not on a minute boundary");
    }
    rest.remove_prefix(3);
  }
  if (rest == "Z" && s[10] == 'T') rest = {};
  if (!rest.empty()) throw Error("unsupported timestamp suffix in '" + std::string(s) + "'");

  using namespace std::chrono;
  const year_month_day ymd{std::chrono::year{*year}, std::chrono::month{static_cast<unsigned>(*month)},
                           std::chrono::day{static_cast<unsigned>(*day)}};
  if (!ymd.ok() || *hour > 23 || *minute > 59) {
    throw Error("timestamp '" + std::string(s) + "' is not a valid calendar time");
  }
  return MinuteTime{sys_days{ymd}.time_since_epoch() + hours{*hour} + minutes{*minute}};
}

std::string format_timestamp(MinuteTime t) {
  using namespace std::chrono;
  const sys_days day = floor<days>(t);
  const year_month_day ymd{day};
  const auto minute_of_day = (t - day).count();
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%04d-%02u-%02u %02d:%02d", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                static_cast<int>(minute_of_day / 60), static_cast<int>(minute_of_day % 60));
  return buf.data();
}

ParsedTicks parse_ticks(std::istream& in, const TickColumns& columns) {
  std::string line;
  std::size_t line_no = 0;
  std::optional<std::array<std::size_t, 6>> where;  // ts, o, h, l, c, v
  std::size_t header_width = 0;

  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    if (trim(view).empty()) continue;
    const auto fields = split_commas(view);
    std::array<std::size_t, 6> idx{};
    const std::array<const std::string*, 6> names{&columns.timestamp, &columns.open,
                                                  &columns.high,      &columns.low,
                                                  &columns.close,     &columns.volume};
    for (std::size_t c = 0; c < names.size(); ++c) {
      const auto it = std::find_if(fields.begin(), fields.end(),
                                   [&](std::string_view f) { return iequals(f, *names[c]); });
      if (it == fields.end()) line_error(line_no, "header lacks column '" + *names[c] + "'");
      idx[c] = static_cast<std::size_t>(it - fields.begin());
    }
    where = idx;
    header_width = fields.size();
    break;
  }
  if (!where) throw Error("tick file is empty");

  ParsedTicks out;
  struct Numbered {
    TickRecord rec;
    std::size_t order;
  };
  std::vector<Numbered> rows;
  std::optional<TimestampFormat> format;

  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split_commas(line);
    if (fields.size() != header_width) {
      line_error(line_no, "expected " + std::to_string(header_width) + " fields, found " +
                              std::to_string(fields.size()));
    }
    const auto& w = *where;
    TickRecord rec;
    const std::string_view ts = fields[w[0]];
    if (!format) {
      format = detect_format(ts);
    } else if (detect_format(ts) != *format) {
      line_error(line_no, "timestamp format differs from the first data row");
    }
    try {
      rec.timestamp = parse_timestamp(ts);
    } catch (const Error& e) {
      line_error(line_no, e.what());
    }
    const std::array<std::pair<double*, const char*>, 4> prices{
        std::pair{&rec.open, "open"}, std::pair{&rec.high, "high"}, std::pair{&rec.low, "low"},
        std::pair{&rec.close, "close"}};
    for (std::size_t p = 0; p < prices.size(); ++p) {
      const std::string_view text = fields[w[p + 1]];
      const auto value = parse_number<double>(text);
      if (!value || !std::isfinite(*value)) {
        line_error(line_no, std::string("bad ") + prices[p].second + " value '" +
                                std::string(text) + "'");
      }
      if (*value <= 0.0) {
        line_error(line_no, std::string(prices[p].second) + " price must be positive");
      }
      *prices[p].first = *value;
    }
    const std::string_view vol_text = fields[w[5]];
    if (const auto v = parse_number<std::uint64_t>(vol_text)) {
      rec.volume = *v;
    } else if (const auto d = parse_number<double>(vol_text);
               d && *d >= 0.0 && std::isfinite(*d) && std::floor(*d) == *d) {
      rec.volume = static_cast<std::uint64_t>(*d);
    } else {
      line_error(line_no, "bad volume value '" + std::string(vol_text) + "'");
    }
    if (rec.low > std::min(rec.open, rec.close) || rec.high < std::max(rec.open, rec.close)) {
      line_error(line_no, "inconsistent bar: need low <= min(open, close) and "
                          "high >= max(open, close)");
    }
    rows.push_back({rec, rows.size()});
  }
  if (rows.empty()) throw Error("tick file has a header but no data rows");

  std::stable_sort(rows.begin(), rows.end(), [](const Numbered& a, const Numbered& b) {
    return a.rec.timestamp < b.rec.timestamp;
  });
  out.records.reserve(rows.size());
  for (const Numbered& r : rows) {
    if (!out.records.empty() && out.records.back().timestamp == r.rec.timestamp) {
      out.records.back() = r.rec;  // last occurrence in file order wins
      ++out.duplicates_collapsed;
    } else {
      out.records.push_back(r.rec);
    }
  }
  out.format = format.value_or(TimestampFormat::space_separated);
  return out;
}

ParsedTicks parse_ticks_file(const std::string& path, const TickColumns& columns) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open tick file '" + path + "'");
  try {
    return parse_ticks(in, columns);
  } catch (const Error& e) {
    throw Error(path + ": " + e.what());
  }
}

void write_ticks_csv(std::ostream& out, const std::vector<TickRecord>& records) {
  out << "timestamp,open,high,low,close,volume\n";
  std::array<char, 64> buf{};
  auto num = [&](double v) {
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
  };
  for (const TickRecord& r : records) {
    out << format_timestamp(r.timestamp) << ',' << num(r.open) << ',' << num(r.high) << ','
        << num(r.low) << ',' << num(r.close) << ',' << r.volume << '\n';
  }
}

SessionSeries sessionize(const std::vector<TickRecord>& records, int max_gap_minutes,
                         PriceColumn column) {
  if (records.empty()) throw Error("cannot sessionize an empty record list");
  if (max_gap_minutes < 1) throw Error("max gap must be at least 1 minute");
  auto price = [column](const TickRecord& r) {
    switch (column) {
      case PriceColumn::open: return r.open;
      case PriceColumn::high: return r.high;
      case PriceColumn::low: return r.low;
      case PriceColumn::close: return r.close;
    }
    return r.close;
  };
  SessionSeries out;
  auto start_session = [&](const TickRecord& r) {
    out.sessions.push_back(
        {std::chrono::year_month_day{std::chrono::floor<std::chrono::days>(r.timestamp)},
         {price(r)},
         60.0});
  };
  start_session(records.front());
  for (std::size_t i = 1; i < records.size(); ++i) {
    const auto gap = (records[i].timestamp - records[i - 1].timestamp).count();
    if (gap <= 0) throw Error("records must be sorted by strictly increasing timestamp");
    if (gap > max_gap_minutes) {
      start_session(records[i]);
      continue;
    }
    auto& values = out.sessions.back().values;
    const double carried = values.back();
    for (long long k = 1; k < gap; ++k) {
      values.push_back(carried);
      ++out.fill_count;
    }
    values.push_back(price(records[i]));
  }
  return out;
}

std::string_view to_string(TransformKind k) noexcept {
  switch (k) {
    case TransformKind::raw: return "raw";
    case TransformKind::demean: return "demean";
    case TransformKind::log_return: return "log_return";
    case TransformKind::first_difference: return "first_difference";
  }
  return "raw";
}

TransformKind parse_transform(std::string_view name) {
  if (name == "raw") return TransformKind::raw;
  if (name == "demean") return TransformKind::demean;
  if (name == "log_return") return TransformKind::log_return;
  if (name == "first_difference") return TransformKind::first_difference;
  throw Error("unknown transform '" + std::string(name) +
              "' (expected raw, demean, log_return or first_difference)");
}

SessionSeries transform(const SessionSeries& sessions, TransformKind kind) {
  SessionSeries out;
  out.gap_policy = sessions.gap_policy;
  out.fill_count = sessions.fill_count;
  out.dropped_sessions = sessions.dropped_sessions;
  for (std::size_t s = 0; s < sessions.sessions.size(); ++s) {
    const Session& in = sessions.sessions[s];
    Session next{in.date, {}, in.dt};
    const auto& v = in.values;
    switch (kind) {
      case TransformKind::raw:
        next.values = v;
        break;
      case TransformKind::demean: {
        const double mean =
            v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
        next.values.reserve(v.size());
        for (double x : v) next.values.push_back(x - mean);
        break;
      }
      case TransformKind::log_return:
        for (std::size_t i = 0; i < v.size(); ++i) {
          if (!(v[i] > 0.0)) {
            throw Error("log_return needs positive prices: session " + std::to_string(s) +
                        " index " + std::to_string(i) + " holds " + std::to_string(v[i]));
          }
        }
        for (std::size_t i = 1; i < v.size(); ++i) next.values.push_back(std::log(v[i] / v[i - 1]));
        break;
      case TransformKind::first_difference:
        for (std::size_t i = 1; i < v.size(); ++i) next.values.push_back(v[i] - v[i - 1]);
        break;
    }
    if (next.values.empty()) {
      ++out.dropped_sessions;
      continue;
    }
    out.sessions.push_back(std::move(next));
  }
  return out;
}

std::string_view to_string(WindowKind k) noexcept {
  return k == WindowKind::hann ? "hann" : "rectangular";
}

WindowKind parse_window(std::string_view name) {
  if (name == "rectangular") return WindowKind::rectangular;
  if (name == "hann") return WindowKind::hann;
  throw Error("unknown window '" + std::string(name) + "' (expected rectangular or hann)");
}

SegmentSet segment(const SessionSeries& sessions, const SegmentSpec& spec) {
  const std::size_t len = spec.length;
  if (len < 2 || !is_power_of_two(len)) {
    throw Error("segment length must be a power of two >= 2, got " + std::to_string(len));
  }
  if (!(spec.overlap >= 0.0 && spec.overlap <= 0.5)) {
    throw Error("segment overlap must be in [0, 0.5]");
  }
  std::size_t longest = 0;
  for (const Session& s : sessions.sessions) longest = std::max(longest, s.values.size());
  if (len > longest) {
    throw Error("segment length " + std::to_string(len) + " exceeds the longest session (" +
                std::to_string(longest) + " samples)");
  }
  const auto overlap_samples =
      static_cast<std::size_t>(std::floor(static_cast<double>(len) * spec.overlap));
  const std::size_t hop = len - overlap_samples;

  // Periodic Hann, the usual choice for DFT analysis.
  std::vector<double> window(len, 1.0);
  if (spec.window == WindowKind::hann) {
    for (std::size_t i = 0; i < len; ++i) {
      window[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) /
                                       static_cast<double>(len));
    }
  }

  SegmentSet out;
  for (std::size_t s = 0; s < sessions.sessions.size(); ++s) {
    const Session& session = sessions.sessions[s];
    const auto& v = session.values;
    std::size_t covered = 0;
    for (std::size_t start = 0; start + len <= v.size(); start += hop) {
      const double mean =
          std::accumulate(v.begin() + static_cast<std::ptrdiff_t>(start),
                          v.begin() + static_cast<std::ptrdiff_t>(start + len), 0.0) /
          static_cast<double>(len);
      std::vector<double> seg(len);
      for (std::size_t i = 0; i < len; ++i) seg[i] = (v[start + i] - mean) * window[i];
      out.segments.emplace_back(std::move(seg), session.dt,
                                "s" + std::to_string(s) + "@" + std::to_string(start));
      out.session_of.push_back(s);
      out.start_of.push_back(start);
      covered = start + len;
    }
    out.dropped_samples += v.size() - covered;
  }
  return out;
}

}  // namespace bispectral
