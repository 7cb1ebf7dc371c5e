#pragma once

#include "core.hpp"
#include "rng.hpp"
#include "oracle.hpp"
#include "distributions.hpp"
#include "analysis.hpp"
#include "solvers.hpp"
#include "dimacs.hpp"
#include "experiments.hpp"
