#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "bispectral/error.hpp"
#include "bispectral/ingest.hpp"

using namespace bispectral;

namespace {

constexpr const char* kHeader = "timestamp,open,high,low,close,volume\n";

ParsedTicks parse(const std::string& text) {
  std::istringstream in(text);
  return parse_ticks(in);
}

std::string parse_error(const std::string& text) {
  try {
    parse(text);
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

// Consecutive minute bars starting at `start` with price 100 + i.
std::vector<TickRecord> minutes(const std::string& start, int count, int skip = -1) {
  std::vector<TickRecord> out;
  const MinuteTime t0 = parse_timestamp(start);
  for (int i = 0; i < count; ++i) {
    if (i == skip) continue;
    const double p = 100.0 + i;
    out.push_back({t0 + std::chrono::minutes(i), p, p, p, p, 10});
  }
  return out;
}

SessionSeries sessions_of(std::vector<std::vector<double>> values) {
  SessionSeries s;
  for (auto& v : values) s.sessions.push_back({std::chrono::year_month_day{}, std::move(v), 60.0});
  return s;
}

}  // namespace

TEST_CASE("timestamps") {
  const MinuteTime a = parse_timestamp("2015-01-01 09:15");
  CHECK(format_timestamp(a) == "2015-01-01 09:15");
  CHECK(parse_timestamp("2015-01-01T09:15") == a);
  CHECK(parse_timestamp("2015-01-01T09:15:00") == a);
  CHECK(parse_timestamp("2015-01-01T09:15:00Z") == a);
  CHECK(parse_timestamp("2015-01-01 09:16") - a == std::chrono::minutes(1));
  CHECK_THROWS_AS(parse_timestamp("2015-01-01 09:15:30"), Error);
  CHECK_THROWS_AS(parse_timestamp("2015-02-30 09:15"), Error);
  CHECK_THROWS_AS(parse_timestamp("2015-01-01 25:00"), Error);
  CHECK_THROWS_AS(parse_timestamp("01/01/2015 09:15"), Error);
  CHECK_THROWS_AS(parse_timestamp("2015-01-01 09:15+05:30"), Error);
}

TEST_CASE("parse_ticks examples") {
  SUBCASE("single row") {
    const ParsedTicks t = parse(std::string(kHeader) + "2015-01-01 09:15,100,101,99,100.5,1200\n");
    REQUIRE(t.records.size() == 1);
    CHECK(t.records[0].close == 100.5);
    CHECK(t.records[0].open == 100.0);
    CHECK(t.records[0].high == 101.0);
    CHECK(t.records[0].low == 99.0);
    CHECK(t.records[0].volume == 1200);
    CHECK(t.duplicates_collapsed == 0);
    CHECK(t.format == TimestampFormat::space_separated);
  }
  SUBCASE("duplicate timestamps keep the last row") {
    const ParsedTicks t = parse(std::string(kHeader) +
                                "2015-01-01 09:15,100,101,99,100.5,1200\n"
                                "2015-01-01 09:15,100,102,99,101.5,1300\n");
    REQUIRE(t.records.size() == 1);
    CHECK(t.duplicates_collapsed == 1);
    CHECK(t.records[0].close == 101.5);
  }
  SUBCASE("malformed close names line 3") {
    const std::string msg = parse_error(std::string(kHeader) +
                                        "2015-01-01 09:15,100,101,99,100.5,1200\n"
                                        "2015-01-01 09:16,100,101,99,abc,1200\n");
    CHECK(msg.find("line 3") != std::string::npos);
    CHECK(msg.find("close") != std::string::npos);
  }
}

TEST_CASE("parse_ticks error paths") {
  CHECK(parse_error("").find("empty") != std::string::npos);
  CHECK(parse_error(kHeader).find("no data rows") != std::string::npos);
  CHECK(parse_error("time,open,high,low,close,volume\n").find("timestamp") != std::string::npos);
  CHECK(parse_error(std::string(kHeader) + "2015-01-01 09:15,0,101,0,100,1\n").find("positive") !=
        std::string::npos);
  CHECK(parse_error(std::string(kHeader) + "2015-01-01 09:15,-1,101,99,100,1\n").find("line 2") !=
        std::string::npos);
  CHECK(parse_error(std::string(kHeader) + "2015-01-01 09:15,100,99,98,100,1\n")
            .find("inconsistent bar") != std::string::npos);
  CHECK(parse_error(std::string(kHeader) + "2015-01-01 09:15,100,101,99,100\n").find("fields") !=
        std::string::npos);
  CHECK(parse_error(std::string(kHeader) + "2015-01-01 09:15,100,101,99,100,-4\n")
            .find("volume") != std::string::npos);
  CHECK(parse_error(std::string(kHeader) +
                    "2015-01-01 09:15,100,101,99,100,1\n"
                    "2015-01-01T09:16,100,101,99,100,1\n")
            .find("format differs") != std::string::npos);
}

TEST_CASE("parse_ticks: sorting, custom columns and ISO timestamps") {
  std::istringstream in(
      "\xEF\xBB\xBF"
      "Vol,Close,Low,High,Open,Time\r\n"
      "12,10.5,10,11,10.2,2020-03-02T10:01\r\n"
      "7,10.1,9.5,10.6,10.5,2020-03-02T10:00\r\n");
  const TickColumns cols{"time", "open", "high", "low", "close", "vol"};
  const ParsedTicks t = parse_ticks(in, cols);
  REQUIRE(t.records.size() == 2);
  CHECK(t.format == TimestampFormat::iso8601);
  CHECK(t.records[0].timestamp < t.records[1].timestamp);
  CHECK(t.records[0].close == 10.1);
  CHECK(t.records[1].volume == 12);
}

TEST_CASE("property: canonical CSV round trip is idempotent") {
  const std::string text = std::string(kHeader) +
                           "2015-01-01 09:16,100.25,101,99,100.5,1200\n"
                           "2015-01-01 09:15,100,101.75,99.5,100.125,900\n";
  const ParsedTicks first = parse(text);
  std::ostringstream once;
  write_ticks_csv(once, first.records);
  const ParsedTicks second = parse(once.str());
  std::ostringstream twice;
  write_ticks_csv(twice, second.records);
  CHECK(once.str() == twice.str());
  CHECK(first.records == second.records);
}

TEST_CASE("sessionize examples") {
  SUBCASE("one trading day") {
    const SessionSeries s = sessionize(minutes("2015-01-05 09:15", 375), 60);
    REQUIRE(s.sessions.size() == 1);
    CHECK(s.sessions[0].values.size() == 375);
    CHECK(s.fill_count == 0);
    CHECK(s.sessions[0].date == std::chrono::year_month_day{std::chrono::year{2015}, std::chrono::January, std::chrono::day{5}});
  }
  SUBCASE("overnight gap splits sessions") {
    auto recs = minutes("2015-01-05 09:15", 375);
    const auto day2 = minutes("2015-01-06 09:15", 375);
    recs.insert(recs.end(), day2.begin(), day2.end());
    const SessionSeries s = sessionize(recs, 60);
    CHECK(s.sessions.size() == 2);
  }
  SUBCASE("one missing minute is carried forward") {
    const SessionSeries s = sessionize(minutes("2015-01-05 09:15", 375, 100), 60);
    REQUIRE(s.sessions.size() == 1);
    CHECK(s.sessions[0].values.size() == 375);
    CHECK(s.fill_count == 1);
    CHECK(s.sessions[0].values[100] == s.sessions[0].values[99]);
    CHECK(s.sessions[0].values[101] == 201.0);
  }
  SUBCASE("price column selection") {
    auto recs = minutes("2015-01-05 09:15", 3);
    recs[1].open = 50.0;
    CHECK(sessionize(recs, 60, PriceColumn::open).sessions[0].values[1] == 50.0);
    CHECK(sessionize(recs, 60, PriceColumn::close).sessions[0].values[1] == 101.0);
  }
  CHECK_THROWS_AS(sessionize({}, 60), Error);
}

TEST_CASE("transform examples") {
  const SessionSeries in = sessions_of({{100.0, 101.0}, {1.0, 2.0, 3.0}});
  SUBCASE("raw") {
    const SessionSeries out = transform(in, TransformKind::raw);
    CHECK(out.sessions[0].values == in.sessions[0].values);
    CHECK(out.sessions[1].values == in.sessions[1].values);
  }
  SUBCASE("log_return") {
    const SessionSeries out = transform(in, TransformKind::log_return);
    REQUIRE(out.sessions[0].values.size() == 1);
    CHECK(out.sessions[0].values[0] == doctest::Approx(0.00995033).epsilon(1e-7));
    CHECK(out.sessions[0].values[0] == std::log(1.01));
    CHECK(out.sessions[1].values.size() == 2);
  }
  SUBCASE("demean") {
    const SessionSeries out = transform(sessions_of({{1.0, 2.0, 3.0}}), TransformKind::demean);
    CHECK(out.sessions[0].values == std::vector<double>{-1.0, 0.0, 1.0});
  }
  SUBCASE("first_difference") {
    const SessionSeries out = transform(in, TransformKind::first_difference);
    CHECK(out.sessions[1].values == std::vector<double>{1.0, 1.0});
  }
  SUBCASE("log_return rejects non-positive prices, naming session and index") {
    try {
      transform(sessions_of({{1.0, 2.0}, {3.0, 0.0}}), TransformKind::log_return);
      FAIL("expected an error");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("session 1") != std::string::npos);
      CHECK(msg.find("index 1") != std::string::npos);
    }
  }
  SUBCASE("single-sample sessions vanish under differencing") {
    const SessionSeries out = transform(sessions_of({{5.0}, {1.0, 2.0}}), TransformKind::first_difference);
    CHECK(out.sessions.size() == 1);
    CHECK(out.dropped_sessions == 1);
  }
}

TEST_CASE("property: transform length and conservation laws") {
  std::vector<std::vector<double>> data;
  for (int s = 0; s < 5; ++s) {
    std::vector<double> v;
    for (int i = 0; i < 50 + 13 * s; ++i) v.push_back(100.0 + std::sin(0.1 * i * (s + 1)) + 0.01 * i);
    data.push_back(v);
  }
  const SessionSeries in = sessions_of(data);
  const SessionSeries lr = transform(in, TransformKind::log_return);
  const SessionSeries dm = transform(in, TransformKind::demean);
  const SessionSeries raw = transform(in, TransformKind::raw);
  for (std::size_t s = 0; s < data.size(); ++s) {
    CHECK(lr.sessions[s].values.size() == data[s].size() - 1);
    CHECK(dm.sessions[s].values.size() == data[s].size());
    CHECK(raw.sessions[s].values.size() == data[s].size());
    const double sum = std::accumulate(dm.sessions[s].values.begin(), dm.sessions[s].values.end(), 0.0);
    CHECK(std::abs(sum) <= 1e-9 * static_cast<double>(data[s].size()));
  }
}

TEST_CASE("segment examples") {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.05 * static_cast<double>(i)) + 0.001 * i;
  const SessionSeries one = sessions_of({v});

  SUBCASE("no overlap") {
    const SegmentSet s = segment(one, {256, 0.0, WindowKind::rectangular});
    CHECK(s.segments.size() == 3);
    CHECK(s.dropped_samples == 232);
  }
  SUBCASE("half overlap") {
    const SegmentSet s = segment(one, {256, 0.5, WindowKind::rectangular});
    REQUIRE(s.segments.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) CHECK(s.start_of[i] == 128 * i);
    CHECK(s.dropped_samples == 1000 - (640 + 256));
  }
  SUBCASE("rectangular window only demeans") {
    const SegmentSet s = segment(one, {256, 0.0, WindowKind::rectangular});
    for (std::size_t j = 0; j < s.segments.size(); ++j) {
      const std::size_t start = s.start_of[j];
      double mean = 0.0;
      for (std::size_t i = 0; i < 256; ++i) mean += v[start + i];
      mean /= 256.0;
      for (std::size_t i = 0; i < 256; ++i) REQUIRE(s.segments[j][i] == v[start + i] - mean);
    }
  }
  SUBCASE("hann window tapers the ends") {
    const SegmentSet s = segment(one, {256, 0.0, WindowKind::hann});
    CHECK(s.segments[0][0] == 0.0);
    double mean = 0.0;
    for (std::size_t i = 0; i < 256; ++i) mean += v[i];
    mean /= 256.0;
    CHECK(s.segments[0][128] == doctest::Approx(v[128] - mean));
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(segment(one, {2048, 0.0, WindowKind::rectangular}), Error);
    CHECK_THROWS_AS(segment(one, {100, 0.0, WindowKind::rectangular}), Error);
    CHECK_THROWS_AS(segment(one, {256, 0.6, WindowKind::rectangular}), Error);
  }
}

TEST_CASE("property: segments never cross session boundaries") {
  // Session s holds the constant value s, so any segment mixing sessions
  // would be non-constant before demeaning and non-zero after.
  std::vector<std::vector<double>> data;
  const std::size_t lengths[] = {300, 64, 700, 129, 512};
  for (std::size_t s = 0; s < 5; ++s) data.emplace_back(lengths[s], static_cast<double>(s));
  for (double overlap : {0.0, 0.25, 0.5}) {
    const SegmentSet set = segment(sessions_of(data), {128, overlap, WindowKind::rectangular});
    std::size_t covered = 0;
    for (std::size_t j = 0; j < set.segments.size(); ++j) {
      const std::size_t s = set.session_of[j];
      CHECK(set.start_of[j] + 128 <= lengths[s]);
      for (double x : set.segments[j].values()) REQUIRE(x == 0.0);
      covered += 128;
    }
    CHECK(set.segments.size() > 0);
    if (overlap == 0.0) CHECK(covered + set.dropped_samples == 300 + 64 + 700 + 129 + 512);
  }
}

TEST_CASE("bundled three-day fixture") {
  const ParsedTicks t = parse_ticks_file(std::string(BISPECTRAL_FIXTURE_DIR) + "/ticks_3day.csv");
  CHECK(t.records.size() == 3 * 375 - 1);
  const SessionSeries s = sessionize(t.records, 60);
  REQUIRE(s.sessions.size() == 3);
  CHECK(s.fill_count == 1);
  for (const Session& session : s.sessions) CHECK(session.values.size() == 375);
  const SessionSeries lr = transform(s, TransformKind::log_return);
  for (const Session& session : lr.sessions) CHECK(session.values.size() == 374);
}

TEST_CASE("determinism: identical bytes give identical outputs") {
  const std::string path = std::string(BISPECTRAL_FIXTURE_DIR) + "/ticks_3day.csv";
  const auto a = segment(sessionize(parse_ticks_file(path).records, 60), {256, 0.25, WindowKind::hann});
  const auto b = segment(sessionize(parse_ticks_file(path).records, 60), {256, 0.25, WindowKind::hann});
  REQUIRE(a.segments.size() == b.segments.size());
  for (std::size_t j = 0; j < a.segments.size(); ++j) {
    CHECK(std::equal(a.segments[j].values().begin(), a.segments[j].values().end(),
                     b.segments[j].values().begin()));
  }
}
