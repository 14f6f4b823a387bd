#pragma once

#include "partialwave/effective_curve.hpp"
#include "partialwave/errors.hpp"
#include "partialwave/grid.hpp"
#include "partialwave/photo.hpp"
#include "partialwave/potential.hpp"
#include "partialwave/radial.hpp"
#include "partialwave/resonance.hpp"
#include "partialwave/scattering.hpp"
#include "partialwave/special.hpp"
#include "partialwave/timedelay.hpp"
#include "partialwave/units.hpp"
#include "partialwave/wkb.hpp"
