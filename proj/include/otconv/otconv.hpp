#pragma once

// Discrete optimal transport, Wasserstein geodesics and convexity
// certification along acceleration-free curves.

#include "convexity.hpp"
#include "curve.hpp"
#include "errors.hpp"
#include "functional.hpp"
#include "geometry.hpp"
#include "measure.hpp"
#include "sampler.hpp"
#include "serialization.hpp"
#include "transport.hpp"
