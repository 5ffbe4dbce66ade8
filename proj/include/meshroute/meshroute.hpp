#pragma once

// Umbrella header for the meshroute workbench library.

#include "bbbc.hpp"
#include "errors.hpp"
#include "fuzzy.hpp"
#include "oracle.hpp"
#include "rng.hpp"
#include "sim.hpp"
#include "topology.hpp"
