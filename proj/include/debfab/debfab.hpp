#pragma once

// Umbrella header.

#include "debfab/addr.hpp"
#include "debfab/dataplane.hpp"
#include "debfab/error.hpp"
#include "debfab/experiment.hpp"
#include "debfab/fabric.hpp"
#include "debfab/fabric_json.hpp"
#include "debfab/flow_compiler.hpp"
#include "debfab/flow_table.hpp"
#include "debfab/label.hpp"
#include "debfab/rng.hpp"
#include "debfab/routing.hpp"
#include "debfab/sim.hpp"
#include "debfab/trace_json.hpp"
