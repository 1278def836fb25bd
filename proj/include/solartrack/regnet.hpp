#pragma once

#include "solartrack/regnet/checkpoint.hpp"
#include "solartrack/regnet/config.hpp"
#include "solartrack/regnet/crop.hpp"
#include "solartrack/regnet/network.hpp"
#include "solartrack/regnet/tracker.hpp"
#include "solartrack/regnet/train.hpp"
