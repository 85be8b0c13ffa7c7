// mvs: run streaming scenarios, sweep watched fractions, analyze traces.

#include "mvs/analysis.hpp"
#include "mvs/harness.hpp"
#include "mvs/report.hpp"
#include "mvs/scenario.hpp"
#include "mvs/util.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace mvs;

int cmd_run(const std::vector<std::string>& files, const std::string& out, const std::string& format) {
  std::vector<RunReport> reports;
  for (const auto& f : files) reports.push_back(run_scenario(load_scenario_file(f)));
  const auto fmt_kind = format == "text" ? ReportFormat::TextTable : ReportFormat::Csv;
  write_text_table(std::cout, summary_table(reports));
  if (!out.empty()) {
    for (const auto& p : emit_report(reports, fmt_kind, out)) std::cerr << "wrote " << p.string() << '\n';
  }
  return 0;
}

int cmd_sweep(const std::string& file, const std::string& fractions_arg, const std::string& out) {
  std::vector<double> fractions;
  for (auto f : split(fractions_arg, ',')) {
    if (!trim(f).empty()) fractions.push_back(parse_double(f));
  }
  const auto points = sweep_watched_fraction(load_scenario_file(file), fractions);
  const auto table = sweep_table(points);
  if (out.empty()) {
    write_csv(std::cout, table);
  } else {
    std::ofstream f(out);
    if (!f) throw ReportError(fmt::format("cannot write {}", out));
    write_csv(f, table);
    write_text_table(std::cout, table);
  }
  return 0;
}

int cmd_analyze(const std::string& trace, const std::string& encoding, double bandwidth, double playback_start,
                const std::string& cdf_dir) {
  std::ifstream tf(trace);
  if (!tf) throw FormatError(fmt::format("cannot open {}", trace));
  auto timeline = read_timeline_csv(tf);
  sort_by_time(timeline);
  std::ifstream ef(encoding);
  if (!ef) throw FormatError(fmt::format("cannot open {}", encoding));
  const auto schedule = read_encoding_csv(ef);
  VideoSpec v;
  v.encoding_schedule = schedule;
  const double avg = v.avg_encoding_bps();

  const auto result = classify(timeline, avg, bandwidth);
  std::cout << fmt::format("technique,{}\nconfidence,{:.3f}\nrule,{}\n", to_string(result.label),
                           result.confidence, result.rule);
  for (const auto& [k, val] : result.evidence) std::cout << fmt::format("{},{:.6g}\n", k, val);
  try {
    std::cout << fmt::format("throttle_factor_estimate,{:.4f}\n", estimate_throttle_factor(timeline, avg));
    std::cout << fmt::format("fast_start_media_estimate_s,{:.2f}\n", estimate_fast_start_media(timeline, avg));
  } catch (const AnalysisError& e) {
    std::cerr << "estimate unavailable: " << e.what() << '\n';
  }
  if (!std::isnan(playback_start)) {
    const auto est = estimate_buffer(timeline, schedule, playback_start);
    double peak = 0.0;
    for (const auto& p : est.points) peak = std::max(peak, p.bytes);
    std::cout << fmt::format("buffer_peak_bytes,{:.0f}\nbuffer_stalled_s,{:.2f}\n", peak, est.stalled_s);
  }
  if (!cdf_dir.empty()) {
    std::filesystem::create_directories(cdf_dir);
    const auto cdf = burst_cdf(group_bursts(timeline));
    std::ofstream sizes(std::filesystem::path(cdf_dir) / "burst_size_cdf.csv");
    std::ofstream intervals(std::filesystem::path(cdf_dir) / "burst_interval_cdf.csv");
    if (!sizes || !intervals) throw ReportError(fmt::format("cannot write into {}", cdf_dir));
    write_cdf_csv(sizes, cdf.sizes);
    write_cdf_csv(intervals, cdf.intervals);
  }
  return 0;
}

// Invariant suite over a scenario directory: conservation (checked inside
// every run), radio dwell coverage, classifier agreement and determinism.
int cmd_validate(const std::string& dir) {
  int failures = 0;
  for (const auto& file : list_scenarios(dir)) {
    std::vector<std::string> problems;
    try {
      const auto s = load_scenario_file(file);
      const auto a = run_scenario(s);
      const auto b = run_scenario(s);
      check_radio_timeline(a.radio);
      double dwell = 0.0;
      for (double d : a.energy.dwell_s) dwell += d;
      if (std::abs(dwell - a.session.end_time) > 1e-6) problems.push_back("dwell does not cover the session");
      if (!a.classifier_agrees) {
        problems.push_back(fmt::format("classified {} but configured {}", to_string(a.classification.label),
                                       to_string(a.expected)));
      }
      std::ostringstream x, y;
      write_csv(x, summary_table({a}));
      write_timeline_csv(x, a.session.timeline);
      write_csv(y, summary_table({b}));
      write_timeline_csv(y, b.session.timeline);
      if (x.str() != y.str()) problems.push_back("repeated run is not byte-identical");
    } catch (const std::exception& e) {
      problems.push_back(e.what());
    }
    std::cout << fmt::format("{:<40} {}\n", file.filename().string(), problems.empty() ? "ok" : "FAIL");
    for (const auto& p : problems) std::cout << "    " << p << '\n';
    failures += problems.empty() ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Mobile video streaming simulator and trace analyzer"};
  app.require_subcommand(1);

  std::vector<std::string> run_files;
  std::string run_out, run_format = "csv";
  auto* run = app.add_subcommand("run", "Simulate scenarios and report energy");
  run->add_option("--scenario", run_files, "Scenario file(s)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "Output directory for reports and timelines");
  run->add_option("--format", run_format, "Summary format")->check(CLI::IsMember({"csv", "text"}));

  std::string sweep_file, sweep_fractions = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0", sweep_out;
  auto* sweep = app.add_subcommand("sweep", "Average streaming current versus watched fraction");
  sweep->add_option("--scenario", sweep_file, "Scenario file")->required()->check(CLI::ExistingFile);
  sweep->add_option("--fractions", sweep_fractions, "Comma-separated ascending fractions in (0,1]");
  sweep->add_option("--out", sweep_out, "CSV output file (stdout if omitted)");

  std::string trace, encoding, cdf_dir;
  double bandwidth = 6e6;
  double playback_start = std::nan("");
  auto* analyze = app.add_subcommand("analyze", "Classify a packet timeline CSV");
  analyze->add_option("--trace", trace, "Packet timeline CSV")->required()->check(CLI::ExistingFile);
  analyze->add_option("--encoding", encoding, "Encoding schedule CSV (second,bytes)")->required()->check(CLI::ExistingFile);
  analyze->add_option("--bandwidth", bandwidth, "Path bandwidth in bits/s");
  analyze->add_option("--playback-start", playback_start, "Playback start (s) for the buffer estimate");
  analyze->add_option("--cdf-out", cdf_dir, "Directory for burst size/interval CDFs");

  std::string validate_dir = bundled_scenario_dir().string();
  auto* validate = app.add_subcommand("validate", "Invariant suite over the bundled scenarios");
  validate->add_option("--dir", validate_dir, "Scenario directory")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*run) return cmd_run(run_files, run_out, run_format);
    if (*sweep) return cmd_sweep(sweep_file, sweep_fractions, sweep_out);
    if (*analyze) return cmd_analyze(trace, encoding, bandwidth, playback_start, cdf_dir);
    if (*validate) return cmd_validate(validate_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
