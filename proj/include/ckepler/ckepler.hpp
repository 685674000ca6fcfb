/// Umbrella header for the whole library.
#pragma once

#include "ckepler/conics.hpp"
#include "ckepler/dynamics.hpp"
#include "ckepler/effective_potential.hpp"
#include "ckepler/errors.hpp"
#include "ckepler/geometry.hpp"
#include "ckepler/kappa_trig.hpp"
#include "ckepler/ode.hpp"
#include "ckepler/orbit.hpp"
#include "ckepler/trajectory.hpp"
