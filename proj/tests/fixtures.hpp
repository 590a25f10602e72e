#pragma once

#include "esncert/experiment.hpp"

namespace fixtures {

// Small pH identification problem shared by several suites: 12 training
// holds and 6 validation holds of the default MPRS, noise 0.01 pH.
inline const esncert::ExperimentData& small_plant_data() {
  static const esncert::ExperimentData data = [] {
    esncert::ExperimentConfig cfg = esncert::ExperimentConfig::from_profile("desk");
    cfg.train_holds = 12;
    cfg.validation_holds = 6;
    cfg.seed = 99;
    return esncert::generate_data(cfg);
  }();
  return data;
}

}  // namespace fixtures
