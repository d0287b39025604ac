#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "rfcp/app/config.hpp"

namespace rfcp::app {

/// FASTA records concatenated; A/C/G/T (either case) map to 0..3. Any other
/// residue raises DataError with its line number.
std::vector<std::uint8_t> read_fasta(std::istream& in, const std::string& source_name);

/// One finite number per line. Blank or malformed lines raise DataError.
std::vector<double> read_numeric_csv(std::istream& in, const std::string& source_name);

struct WeeklyCounts {
  std::vector<double> counts;
  std::string first_date;  // ISO date opening week 1
  std::string last_date;   // last event date
  std::size_t events = 0;
};

/// ISO dates (YYYY-MM-DD, one per line, any order) binned into consecutive
/// 7-day blocks starting at the earliest date, through the block holding the
/// latest date.
WeeklyCounts bin_events_weekly(std::istream& in, const std::string& source_name);

struct Series {
  DataFormat format = DataFormat::Csv;
  std::vector<std::uint8_t> symbols;  // fasta
  std::vector<double> values;         // csv, events
  std::string convention;             // how values were derived
  WeeklyCounts weekly;                // events only

  std::size_t size() const { return format == DataFormat::Fasta ? symbols.size() : values.size(); }
};

Series ingest(const std::filesystem::path& path, DataFormat format);

}  // namespace rfcp::app
