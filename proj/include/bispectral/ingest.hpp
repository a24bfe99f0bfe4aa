#pragma once

// Minute-bar market data: CSV parsing, sessionization, per-session
// transforms and segmentation for the averaged bispectrum estimator.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bispectral/spectral.hpp"

namespace bispectral {

using MinuteTime = std::chrono::sys_time<std::chrono::minutes>;

struct TickRecord {
  MinuteTime timestamp;
  double open = 0.0;
  double high = 0.0;
  double low = 0.0;
  double close = 0.0;
  std::uint64_t volume = 0;

  bool operator==(const TickRecord&) const = default;
};

enum class PriceColumn { open, high, low, close };
std::string_view to_string(PriceColumn c) noexcept;
PriceColumn parse_price_column(std::string_view name);

/// Header names to look for (matched case-insensitively).
struct TickColumns {
  std::string timestamp = "timestamp";
  std::string open = "open";
  std::string high = "high";
  std::string low = "low";
  std::string close = "close";
  std::string volume = "volume";
};

enum class TimestampFormat { space_separated, iso8601 };

struct ParsedTicks {
  std::vector<TickRecord> records;  // strictly increasing timestamps
  std::size_t duplicates_collapsed = 0;
  TimestampFormat format = TimestampFormat::space_separated;
};

/// Parses `YYYY-MM-DD HH:MM` or ISO-8601 `YYYY-MM-DDTHH:MM[:SS][Z]`
/// timestamps (seconds, if present, must be zero).
MinuteTime parse_timestamp(std::string_view text);
std::string format_timestamp(MinuteTime t);

/// Reads a header + rows CSV. The timestamp format is detected from the
/// first data row and every other row must use the same one. Rows are
/// validated (positive finite prices, low <= min(open, close),
/// high >= max(open, close)) and sorted; repeated timestamps keep the last
/// occurrence in file order. Errors name the 1-based line number.
ParsedTicks parse_ticks(std::istream& in, const TickColumns& columns = {});
ParsedTicks parse_ticks_file(const std::string& path, const TickColumns& columns = {});

/// Canonical form: header `timestamp,open,high,low,close,volume` and
/// `YYYY-MM-DD HH:MM` timestamps.
void write_ticks_csv(std::ostream& out, const std::vector<TickRecord>& records);

struct Session {
  std::chrono::year_month_day date;
  std::vector<double> values;
  double dt = 60.0;  // seconds
};

struct SessionSeries {
  std::vector<Session> sessions;
  std::string gap_policy = "carry_forward";
  std::size_t fill_count = 0;
  std::size_t dropped_sessions = 0;  // sessions emptied by a transform
};

/// Splits sorted records into sessions wherever consecutive timestamps are
/// more than max_gap_minutes apart. Missing minutes inside a session are
/// filled by carrying the previous value forward.
SessionSeries sessionize(const std::vector<TickRecord>& records, int max_gap_minutes,
                         PriceColumn column = PriceColumn::close);

enum class TransformKind { raw, demean, log_return, first_difference };
std::string_view to_string(TransformKind k) noexcept;
TransformKind parse_transform(std::string_view name);

/// Applied per session. log_return and first_difference shorten each
/// session by one sample; sessions left empty are dropped and counted.
SessionSeries transform(const SessionSeries& sessions, TransformKind kind);

enum class WindowKind { rectangular, hann };
std::string_view to_string(WindowKind k) noexcept;
WindowKind parse_window(std::string_view name);

struct SegmentSpec {
  std::size_t length = 256;
  double overlap = 0.0;  // fraction in [0, 0.5]
  WindowKind window = WindowKind::rectangular;
};

struct SegmentSet {
  std::vector<TimeSeries> segments;
  std::vector<std::size_t> session_of;  // source session per segment
  std::vector<std::size_t> start_of;    // start offset within that session
  std::size_t dropped_samples = 0;
};

/// Cuts fixed-length segments inside each session (never across a
/// boundary), stepping by length - floor(length * overlap). Each segment is
/// demeaned and then multiplied by the window. Samples not covered by any
/// segment are counted as dropped.
SegmentSet segment(const SessionSeries& sessions, const SegmentSpec& spec);

}  // namespace bispectral
