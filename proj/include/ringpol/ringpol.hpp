// Umbrella include.
#pragma once

#include "io.hpp"
#include "linsolve.hpp"
#include "oracle.hpp"
#include "polarization.hpp"
#include "random.hpp"
#include "ring.hpp"
#include "search.hpp"
#include "spin.hpp"
#include "transport.hpp"
#include "version.hpp"
