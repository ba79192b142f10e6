#pragma once

#include "beable.hpp"
#include "bohm.hpp"
#include "entanglement.hpp"
#include "errors.hpp"
#include "fockspace.hpp"
#include "integrator.hpp"
#include "oracles.hpp"
#include "parallel.hpp"
#include "random.hpp"
#include "types.hpp"
#include "version.hpp"
#include "werner.hpp"
