#pragma once

// Umbrella header for the ddasim toolkit.

#include "dda/config_io.hpp"
#include "dda/consensus.hpp"
#include "dda/cost_model.hpp"
#include "dda/dda_core.hpp"
#include "dda/graph.hpp"
#include "dda/instance_io.hpp"
#include "dda/metric.hpp"
#include "dda/problems.hpp"
#include "dda/quadmax.hpp"
#include "dda/rng.hpp"
#include "dda/schedule.hpp"
#include "dda/simulator.hpp"
#include "dda/trace_io.hpp"
#include "dda/version.hpp"
