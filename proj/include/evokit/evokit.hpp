#pragma once

#include "evokit/archive.hpp"
#include "evokit/errors.hpp"
#include "evokit/fitness.hpp"
#include "evokit/genome.hpp"
#include "evokit/harness/runner.hpp"
#include "evokit/harness/stats.hpp"
#include "evokit/memetic.hpp"
#include "evokit/population.hpp"
#include "evokit/problems/layout.hpp"
#include "evokit/problems/problem.hpp"
#include "evokit/problems/sched.hpp"
#include "evokit/problems/sphere.hpp"
#include "evokit/problems/tsp.hpp"
#include "evokit/rng.hpp"
#include "evokit/variation.hpp"
