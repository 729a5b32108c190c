#pragma once

#include "symflow/bounds.hpp"
#include "symflow/checkpoint.hpp"
#include "symflow/config.hpp"
#include "symflow/experiments.hpp"
#include "symflow/field.hpp"
#include "symflow/flows.hpp"
#include "symflow/grid.hpp"
#include "symflow/solver.hpp"
#include "symflow/symmetry.hpp"
