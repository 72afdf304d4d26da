#pragma once

#include "watt/csv.hpp"
#include "watt/diagnostics.hpp"
#include "watt/error.hpp"
#include "watt/estimands.hpp"
#include "watt/inference.hpp"
#include "watt/montecarlo.hpp"
#include "watt/parallel.hpp"
#include "watt/propensity.hpp"
#include "watt/rng.hpp"
#include "watt/simulation.hpp"
#include "watt/types.hpp"
#include "watt/version.hpp"
