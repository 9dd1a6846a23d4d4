#pragma once

#include "pmc/apriori_bound.hpp"
#include "pmc/continuation.hpp"
#include "pmc/diagnostics.hpp"
#include "pmc/discrete_operator.hpp"
#include "pmc/errors.hpp"
#include "pmc/linearized.hpp"
#include "pmc/minimal_branch.hpp"
#include "pmc/problem.hpp"
#include "pmc/radial_core.hpp"
#include "pmc/tridiagonal.hpp"
