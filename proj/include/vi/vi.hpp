#pragma once

#include "vi/linalg.hpp"
#include "vi/operators.hpp"
#include "vi/feasible_sets.hpp"
#include "vi/diagnostics.hpp"
#include "vi/solvers.hpp"
#include "vi/bench.hpp"
