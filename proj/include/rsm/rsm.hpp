#pragma once

#include "rsm/collision.hpp"
#include "rsm/errors.hpp"
#include "rsm/histogram.hpp"
#include "rsm/kinematics.hpp"
#include "rsm/noise.hpp"
#include "rsm/parallel.hpp"
#include "rsm/quadrature.hpp"
#include "rsm/stats.hpp"
