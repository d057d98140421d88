#include <stdexcept>

#include "slowdrift/experiments.hpp"

namespace slowdrift {

Report run_experiment(Experiment e, const ExperimentConfig& config) {
  Report report;
  switch (e) {
    case Experiment::jumplaw: report = run_verify_jumplaw(config); break;
    case Experiment::lemma2: report = run_verify_lemma2(config); break;
    case Experiment::theorem: report = run_verify_theorem(config); break;
    case Experiment::fluctuation: report = run_verify_fluctuation(config); break;
    default: throw std::invalid_argument("run_experiment: unknown experiment");
  }
  report.provenance = {{"experiment", experiment_name(e)},
                       {"config", config_echo(config)},
                       {"code_version", code_version()}};
  return report;
}

}  // namespace slowdrift
