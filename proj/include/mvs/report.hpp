#pragma once

#include "mvs/harness.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace mvs {

class ReportError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class ReportFormat { Csv, TextTable };

/// A rectangular table with units attached to column names.
struct Table {
  struct Column {
    std::string name;
    std::string unit;  // empty for dimensionless
  };
  std::vector<Column> columns;
  std::vector<std::vector<std::string>> rows;
};

Table summary_table(const std::vector<RunReport>& reports);
Table sweep_table(const std::vector<SweepPoint>& points);

/// CSV header uses name_unit; the text table puts units in parentheses and
/// right-aligns every column.
void write_csv(std::ostream& os, const Table& t);
void write_text_table(std::ostream& os, const Table& t);

/// time_s,buffer_bytes,buffer_media_s (player buffer plus socket bytes).
void write_buffer_csv(std::ostream& os, const std::vector<BufferSample>& series);

/// Writes the summary (report.csv or report.txt) plus per-scenario packet,
/// radio and buffer CSVs into out_dir. Returns the written paths.
std::vector<std::filesystem::path> emit_report(const std::vector<RunReport>& reports, ReportFormat format,
                                               const std::filesystem::path& out_dir);

}  // namespace mvs
