#ifndef MBSTEREO_MBSTEREO_HPP
#define MBSTEREO_MBSTEREO_HPP

// Umbrella header for the multi-baseline stereo toolkit.

#include "core.hpp"
#include "geometry.hpp"
#include "imageio.hpp"
#include "masks.hpp"
#include "matcher.hpp"
#include "metrics.hpp"
#include "photometric.hpp"
#include "reference.hpp"
#include "synth.hpp"
#include "validate.hpp"

#endif
