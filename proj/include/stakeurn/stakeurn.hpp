#pragma once

#include "analytics.hpp"
#include "config_json.hpp"
#include "csv.hpp"
#include "error.hpp"
#include "montecarlo.hpp"
#include "report.hpp"
#include "rng.hpp"
#include "schemes.hpp"
#include "svg.hpp"
#include "urn.hpp"
