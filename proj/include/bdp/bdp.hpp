// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "bdp/analytics.hpp"
#include "bdp/errors.hpp"
#include "bdp/estimator.hpp"
#include "bdp/extended_value.hpp"
#include "bdp/lpp.hpp"
#include "bdp/parallel.hpp"
#include "bdp/paths.hpp"
#include "bdp/quadrature.hpp"
#include "bdp/report.hpp"
#include "bdp/rmt.hpp"
#include "bdp/rng.hpp"
#include "bdp/stationary.hpp"
#include "bdp/stats.hpp"
