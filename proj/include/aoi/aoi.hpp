#pragma once

#include "aoi/errors.hpp"
#include "aoi/quadrature.hpp"
#include "aoi/penalty.hpp"
#include "aoi/ttime.hpp"
#include "aoi/policy.hpp"
#include "aoi/solver.hpp"
#include "aoi/simulator.hpp"
#include "aoi/config.hpp"
#include "aoi/experiment.hpp"
