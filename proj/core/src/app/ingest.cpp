#include "rfcp/app/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>

#include "rfcp/app/errors.hpp"

namespace rfcp::app {
namespace {

std::string at_line(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line) + ": ";
}

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  return s;
}

std::chrono::sys_days parse_iso_date(std::string_view s, const std::string& where) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  auto bad = [&] { return DataError(where + "expected a date YYYY-MM-DD, got '" + std::string(s) + "'"); };
  if (s.size() != 10 || s[4] != '-' || s[7] != '-') throw bad();
  auto num = [&](std::string_view part, auto& out) {
    auto [p, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (ec != std::errc() || p != part.data() + part.size()) throw bad();
  };
  num(s.substr(0, 4), y);
  num(s.substr(5, 2), m);
  num(s.substr(8, 2), d);
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
  if (!ymd.ok()) throw bad();
  return std::chrono::sys_days{ymd};
}

std::string iso(std::chrono::sys_days day) {
  const std::chrono::year_month_day ymd{day};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

}  // namespace

std::vector<std::uint8_t> read_fasta(std::istream& in, const std::string& source_name) {
  std::vector<std::uint8_t> out;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = strip(line);
    if (body.empty()) continue;
    if (body.front() == '>' || body.front() == ';') {
      header_seen = true;
      continue;
    }
    if (!header_seen) throw DataError(at_line(source_name, lineno) + "sequence data before a FASTA header");
    for (char c : body) {
      switch (c) {
        case 'A': case 'a': out.push_back(0); break;
        case 'C': case 'c': out.push_back(1); break;
        case 'G': case 'g': out.push_back(2); break;
        case 'T': case 't': out.push_back(3); break;
        default:
          throw DataError(at_line(source_name, lineno) + "unknown nucleotide '" + std::string(1, c) + "'");
      }
    }
  }
  if (out.empty()) throw DataError(source_name + ": no sequence data");
  return out;
}

std::vector<double> read_numeric_csv(std::istream& in, const std::string& source_name) {
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = strip(line);
    if (body.empty()) {
      // A trailing newline at end of file is not a blank record.
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw DataError(at_line(source_name, lineno) + "blank line");
    }
    double v = 0.0;
    auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), v);
    if (ec != std::errc() || p != body.data() + body.size() || !std::isfinite(v)) {
      throw DataError(at_line(source_name, lineno) + "expected one number, got '" + std::string(body) + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw DataError(source_name + ": no observations");
  return out;
}

WeeklyCounts bin_events_weekly(std::istream& in, const std::string& source_name) {
  std::vector<std::chrono::sys_days> days;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto body = strip(line);
    if (body.empty()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw DataError(at_line(source_name, lineno) + "blank line");
    }
    days.push_back(parse_iso_date(body, at_line(source_name, lineno)));
  }
  if (days.empty()) throw DataError(source_name + ": no events");
  const auto [lo, hi] = std::minmax_element(days.begin(), days.end());
  const auto first = *lo;
  const auto weeks = static_cast<std::size_t>((*hi - first).count() / 7) + 1;
  WeeklyCounts out;
  out.counts.assign(weeks, 0.0);
  for (auto d : days) out.counts[static_cast<std::size_t>((d - first).count() / 7)] += 1.0;
  out.first_date = iso(first);
  out.last_date = iso(*hi);
  out.events = days.size();
  return out;
}

Series ingest(const std::filesystem::path& path, DataFormat format) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  const auto name = path.string();
  Series s;
  s.format = format;
  switch (format) {
    case DataFormat::Fasta:
      s.symbols = read_fasta(in, name);
      s.convention = "A=0 C=1 G=2 T=3";
      break;
    case DataFormat::Csv:
      s.values = read_numeric_csv(in, name);
      s.convention = "one value per line";
      break;
    case DataFormat::Events:
      s.weekly = bin_events_weekly(in, name);
      s.values = s.weekly.counts;
      s.convention = "weekly counts in consecutive 7-day blocks from " + s.weekly.first_date;
      break;
  }
  return s;
}

}  // namespace rfcp::app
