#pragma once

#include "bfslab/besov.hpp"
#include "bfslab/config.hpp"
#include "bfslab/grid.hpp"
#include "bfslab/half_line.hpp"
#include "bfslab/maxreg.hpp"
#include "bfslab/operators.hpp"
#include "bfslab/random_fields.hpp"
#include "bfslab/report.hpp"
#include "bfslab/spaces.hpp"
#include "bfslab/suites.hpp"
