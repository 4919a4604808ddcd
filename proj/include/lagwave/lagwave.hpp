#pragma once

#include "lagwave/errors.hpp"
#include "lagwave/eos.hpp"
#include "lagwave/expr.hpp"
#include "lagwave/numerics.hpp"
#include "lagwave/fields.hpp"
#include "lagwave/diagnostics.hpp"
#include "lagwave/solver.hpp"
#include "lagwave/charpath.hpp"
#include "lagwave/riccati.hpp"
#include "lagwave/detector.hpp"
#include "lagwave/config.hpp"
#include "lagwave/io.hpp"
#include "lagwave/app.hpp"
