#pragma once

#include "solartrack/ingest/build.hpp"
#include "solartrack/ingest/client.hpp"
#include "solartrack/ingest/hek.hpp"
#include "solartrack/ingest/helioviewer.hpp"
#include "solartrack/ingest/transport.hpp"
