#pragma once

#include "solartrack/harness/evaluate.hpp"
#include "solartrack/harness/experiment.hpp"
#include "solartrack/harness/report.hpp"
#include "solartrack/harness/spec.hpp"
