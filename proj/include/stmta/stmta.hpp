#pragma once

#include "stmta/geometry.hpp"
#include "stmta/scenario.hpp"
#include "stmta/scenario_config.hpp"
#include "stmta/losses.hpp"
#include "stmta/cbba.hpp"
#include "stmta/simulator.hpp"
#include "stmta/oracle.hpp"
#include "stmta/montecarlo.hpp"
#include "stmta/report.hpp"
