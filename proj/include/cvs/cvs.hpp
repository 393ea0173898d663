#pragma once

// Umbrella header for the current-vortex-sheet laboratory.

#include "cvs/diagnostics/diagnostics.hpp"
#include "cvs/driver/driver.hpp"
#include "cvs/io/checkpoint.hpp"
#include "cvs/io/svg.hpp"
