#include "mvs/harness.hpp"

#include <future>

#include <fmt/format.h>

namespace mvs {

TechniqueLabel expected_label(const TechniqueSpec& t) {
  switch (t.kind) {
    case TechniqueKind::EncodingRate: return TechniqueLabel::EncodingRate;
    case TechniqueKind::Throttle: return TechniqueLabel::Throttle;
    case TechniqueKind::OnOff:
      return t.connection_mode == ConnectionMode::Persistent ? TechniqueLabel::OnOffPersistent
                                                             : TechniqueLabel::OnOffPerBurst;
    case TechniqueKind::FastCaching: return TechniqueLabel::FastCaching;
    case TechniqueKind::Dash: return TechniqueLabel::Dash;
  }
  return TechniqueLabel::Unknown;
}

RadioTimeline drive_radio(const Scenario& s, const PacketTimeline& timeline, double obs_start, double obs_end) {
  return s.radio_kind == RadioKind::Rrc3g ? rrc_drive(timeline, s.rrc, obs_start, obs_end)
                                          : psm_drive(timeline, s.psm, obs_start, obs_end);
}

EnergyReport integrate_radio(const Scenario& s, const RadioTimeline& radio) {
  return s.radio_kind == RadioKind::Rrc3g ? integrate(radio, s.rrc, s.playback_current_ma)
                                          : integrate(radio, s.psm, s.playback_current_ma);
}

RunReport run_scenario(const Scenario& s) {
  s.validate();
  RunReport rep;
  rep.scenario = s.name;
  rep.technique = s.technique;
  rep.radio_kind = s.radio_kind;
  rep.session = simulate_session(s.video, s.technique, s.path, s.session_options());
  rep.radio = drive_radio(s, rep.session.timeline, 0.0, rep.session.end_time);
  rep.energy = integrate_radio(s, rep.radio);
  rep.classification = classify(rep.session.timeline, s.video.avg_encoding_bps(), s.path.bandwidth_bps);
  rep.expected = expected_label(s.technique);
  rep.classifier_agrees = rep.classification.label == rep.expected;
  return rep;
}

std::vector<SweepPoint> sweep_watched_fraction(const Scenario& s, const std::vector<double>& fractions) {
  for (std::size_t i = 0; i < fractions.size(); ++i) {
    if (!(fractions[i] > 0.0 && fractions[i] <= 1.0)) {
      throw std::invalid_argument(fmt::format("fraction {} is outside (0, 1]", fractions[i]));
    }
    if (i > 0 && !(fractions[i] > fractions[i - 1])) {
      throw std::invalid_argument("fractions must be strictly ascending");
    }
  }
  // independent runs, each with its own kernel
  std::vector<std::future<SweepPoint>> jobs;
  for (double f : fractions) {
    jobs.push_back(std::async(std::launch::async, [&s, f] {
      Scenario run = s;
      run.watched_fraction = f;
      const auto r = run_scenario(run);
      SweepPoint p;
      p.fraction = f;
      p.watch_end_s = r.session.end_time;
      p.avg_streaming_current_ma = r.energy.avg_streaming_current_ma;
      p.wasted_bytes = r.session.metrics.wasted_total;
      p.received_bytes = r.session.metrics.received_total;
      return p;
    }));
  }
  std::vector<SweepPoint> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace mvs
