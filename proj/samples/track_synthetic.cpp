// Generates a few synthetic sequences and scores the two baseline trackers.

#include <iostream>
#include <memory>
#include <utility>
#include <vector>

#include "solartrack/harness.hpp"

using namespace solartrack;

int main() {
  synth::SynthConfig tmpl;
  tmpl.n_frames = 20;
  const auto corpus = synth::generate_corpus(8, tmpl, 2024);

  const auto stat = harness::evaluate_tracker(harness::static_factory(), corpus);
  const auto ncc = harness::evaluate_tracker([] { return std::make_unique<trackers::NccTracker>(); }, corpus);

  const std::vector<std::pair<std::string, metrics::MetricReport>> rows{{"static", stat.report}, {"ncc", ncc.report}};
  std::cout << harness::report_table(rows);
  std::cout << ncc.report.frames_evaluated << " frames scored\n";
}
