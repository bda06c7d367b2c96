#pragma once

#include "bnk/calibration.hpp"
#include "bnk/config.hpp"
#include "bnk/data.hpp"
#include "bnk/empirics.hpp"
#include "bnk/error.hpp"
#include "bnk/expectations.hpp"
#include "bnk/filters.hpp"
#include "bnk/model.hpp"
#include "bnk/quarter.hpp"
#include "bnk/report.hpp"
#include "bnk/robustness.hpp"
#include "bnk/simulator.hpp"
#include "bnk/stats.hpp"
#include "bnk/svg.hpp"
