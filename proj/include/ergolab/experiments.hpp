#pragma once

#include "ergolab/config.hpp"
#include "ergolab/table.hpp"

namespace ergolab::runner {

// Runs one validated experiment. Deterministic given (canonical config,
// seed); the worker count never changes results.
ResultTable run_experiment(const ExperimentConfig& cfg);

}  // namespace ergolab::runner
