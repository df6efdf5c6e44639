#pragma once

#include "dla/beurling.hpp"
#include "dla/bounds.hpp"
#include "dla/coords.hpp"
#include "dla/errors.hpp"
#include "dla/flat_set.hpp"
#include "dla/graph/family.hpp"
#include "dla/growth.hpp"
#include "dla/io.hpp"
#include "dla/potential/heat_kernel.hpp"
#include "dla/potential/solver.hpp"
#include "dla/potential/walk.hpp"
#include "dla/rng.hpp"
#include "dla/sim/aggregate.hpp"
#include "dla/sim/engine.hpp"
#include "dla/version.hpp"
#include "dla/workers.hpp"
