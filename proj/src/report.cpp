#include "mvs/report.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>

#include <fmt/format.h>

namespace mvs {

namespace {

std::string header_name(const Table::Column& c) { return c.unit.empty() ? c.name : c.name + "_" + c.unit; }

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream f(p);
  if (!f) throw ReportError(fmt::format("cannot write {}", p.string()));
  return f;
}

void finish(std::ofstream& f, const std::filesystem::path& p) {
  f.flush();
  if (!f) throw ReportError(fmt::format("write to {} failed", p.string()));
}

}  // namespace

Table summary_table(const std::vector<RunReport>& reports) {
  Table t;
  t.columns = {{"scenario", ""},        {"technique", ""},         {"radio", ""},
               {"duration", "s"},       {"total_size", "bytes"},   {"received", "bytes"},
               {"wasted", "bytes"},     {"overhead_ratio", ""},    {"stalls", ""},
               {"stall_time", "s"},     {"avg_total_current", "mA"}, {"playback_current", "mA"},
               {"avg_streaming_current", "mA"}};
  for (std::size_t i = 0; i < kRadioStateCount; ++i) {
    auto label = std::string(to_string(static_cast<RadioState>(i)));
    std::transform(label.begin(), label.end(), label.begin(), [](unsigned char c) { return std::tolower(c); });
    t.columns.push_back({"dwell_" + label, "s"});
  }
  t.columns.push_back({"classified_as", ""});
  t.columns.push_back({"confidence", ""});
  t.columns.push_back({"classifier_agrees", ""});

  for (const auto& r : reports) {
    const auto& m = r.session.metrics;
    std::vector<std::string> row = {
        r.scenario,
        std::string(to_string(expected_label(r.technique))),
        std::string(to_string(r.radio_kind)),
        fmt::format("{:.2f}", r.energy.duration_s),
        fmt::format("{}", m.total_size),
        fmt::format("{}", m.received_total),
        fmt::format("{}", m.wasted_total),
        fmt::format("{:.4f}", m.overhead_ratio()),
        fmt::format("{}", m.stall_count),
        fmt::format("{:.2f}", m.stall_duration_s),
        fmt::format("{:.2f}", r.energy.avg_total_current_ma),
        fmt::format("{:.2f}", r.energy.playback_current_ma),
        fmt::format("{:.2f}", r.energy.avg_streaming_current_ma)};
    for (double d : r.energy.dwell_s) row.push_back(fmt::format("{:.3f}", d));
    row.emplace_back(to_string(r.classification.label));
    row.push_back(fmt::format("{:.2f}", r.classification.confidence));
    row.emplace_back(r.classifier_agrees ? "true" : "false");
    t.rows.push_back(std::move(row));
  }
  return t;
}

Table sweep_table(const std::vector<SweepPoint>& points) {
  Table t;
  t.columns = {{"fraction", ""},
               {"watch_end", "s"},
               {"avg_streaming_current", "mA"},
               {"received", "bytes"},
               {"wasted", "bytes"}};
  for (const auto& p : points) {
    t.rows.push_back({fmt::format("{:.2f}", p.fraction), fmt::format("{:.2f}", p.watch_end_s),
                      fmt::format("{:.2f}", p.avg_streaming_current_ma), fmt::format("{}", p.received_bytes),
                      fmt::format("{}", p.wasted_bytes)});
  }
  return t;
}

void write_csv(std::ostream& os, const Table& t) {
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << header_name(t.columns[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << row[i];
    os << '\n';
  }
}

void write_text_table(std::ostream& os, const Table& t) {
  std::vector<std::string> heads;
  for (const auto& c : t.columns) heads.push_back(c.unit.empty() ? c.name : fmt::format("{} ({})", c.name, c.unit));
  std::vector<std::size_t> width(heads.size());
  for (std::size_t i = 0; i < heads.size(); ++i) width[i] = heads[i].size();
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], row[i].size());
  }
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      os << (i ? "  " : "") << fmt::format("{:>{}}", cells[i], width[i]);
    }
    os << '\n';
  };
  line(heads);
  std::size_t total = 0;
  for (auto w : width) total += w;
  os << std::string(total + 2 * (width.empty() ? 0 : width.size() - 1), '-') << '\n';
  for (const auto& row : t.rows) line(row);
}

void write_buffer_csv(std::ostream& os, const std::vector<BufferSample>& series) {
  os << "time_s,buffer_bytes,buffer_media_s\n";
  for (const auto& s : series) os << fmt::format("{:.3f},{},{:.3f}\n", s.time, s.client_held(), s.media_s);
}

std::vector<std::filesystem::path> emit_report(const std::vector<RunReport>& reports, ReportFormat format,
                                               const std::filesystem::path& out_dir) {
  if (reports.empty()) throw ReportError("no reports to emit");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw ReportError(fmt::format("cannot create {}: {}", out_dir.string(), ec.message()));

  std::vector<std::filesystem::path> written;
  const auto summary = out_dir / (format == ReportFormat::Csv ? "report.csv" : "report.txt");
  {
    auto f = open_out(summary);
    const auto t = summary_table(reports);
    format == ReportFormat::Csv ? write_csv(f, t) : write_text_table(f, t);
    finish(f, summary);
  }
  written.push_back(summary);

  for (const auto& r : reports) {
    const auto packets = out_dir / (r.scenario + "_packets.csv");
    const auto radio = out_dir / (r.scenario + "_radio.csv");
    const auto buffer = out_dir / (r.scenario + "_buffer.csv");
    {
      auto f = open_out(packets);
      write_timeline_csv(f, r.session.timeline);
      finish(f, packets);
    }
    {
      auto f = open_out(radio);
      write_radio_csv(f, r.radio);
      finish(f, radio);
    }
    {
      auto f = open_out(buffer);
      write_buffer_csv(f, r.session.metrics.buffer_series);
      finish(f, buffer);
    }
    written.insert(written.end(), {packets, radio, buffer});
  }
  return written;
}

}  // namespace mvs
