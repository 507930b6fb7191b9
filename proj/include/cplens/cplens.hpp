#pragma once

// Umbrella header: the whole library in one include.

#include "cplens/complex.hpp"
#include "cplens/errors.hpp"
#include "cplens/unipoly.hpp"
#include "cplens/bipoly.hpp"
#include "cplens/rational_fn.hpp"
#include "cplens/resultant.hpp"
#include "cplens/roots.hpp"
#include "cplens/newton2d.hpp"
#include "cplens/model.hpp"
#include "cplens/lens_map.hpp"
#include "cplens/solver.hpp"
#include "cplens/lefschetz.hpp"
#include "cplens/caustics.hpp"
#include "cplens/oracle.hpp"
#include "cplens/config.hpp"
#include "cplens/report_io.hpp"
#include "cplens/cli.hpp"
