#pragma once

#include "mvs/analysis.hpp"
#include "mvs/radio.hpp"
#include "mvs/scenario.hpp"
#include "mvs/session.hpp"

#include <string>
#include <vector>

namespace mvs {

/// Classifier label a clean trace of this technique should receive.
TechniqueLabel expected_label(const TechniqueSpec& t);

struct RunReport {
  std::string scenario;
  TechniqueSpec technique;
  RadioKind radio_kind = RadioKind::Rrc3g;
  SessionRun session;
  RadioTimeline radio;
  EnergyReport energy;
  ClassificationResult classification;
  TechniqueLabel expected = TechniqueLabel::Unknown;
  bool classifier_agrees = false;
};

/// Simulate, drive the radio model over [0, session end], integrate energy and
/// classify the session's own trace. Deterministic for a given scenario.
RunReport run_scenario(const Scenario& s);

/// Radio timeline and energy for an arbitrary trace under the scenario's radio.
RadioTimeline drive_radio(const Scenario& s, const PacketTimeline& timeline, double obs_start, double obs_end);
EnergyReport integrate_radio(const Scenario& s, const RadioTimeline& radio);

struct SweepPoint {
  double fraction = 0.0;
  double watch_end_s = 0.0;
  double avg_streaming_current_ma = 0.0;
  Bytes wasted_bytes = 0;
  Bytes received_bytes = 0;
};

/// One run per fraction (same seed). Fractions must be ascending in (0, 1].
std::vector<SweepPoint> sweep_watched_fraction(const Scenario& s, const std::vector<double>& fractions);

}  // namespace mvs
