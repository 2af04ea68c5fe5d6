#pragma once

// Everything except the JSON-facing headers (config.hpp, report.hpp), which
// pull in nlohmann/json.

#include "tgae/assignment.hpp"
#include "tgae/checkpoint.hpp"
#include "tgae/eigen.hpp"
#include "tgae/encoder.hpp"
#include "tgae/error.hpp"
#include "tgae/experiments.hpp"
#include "tgae/features.hpp"
#include "tgae/filter_recovery.hpp"
#include "tgae/generators.hpp"
#include "tgae/graph.hpp"
#include "tgae/loss.hpp"
#include "tgae/mapping.hpp"
#include "tgae/matrix.hpp"
#include "tgae/parallel.hpp"
#include "tgae/perturb.hpp"
#include "tgae/rng.hpp"
#include "tgae/trainer.hpp"
