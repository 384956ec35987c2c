#pragma once

// Umbrella header: pulls in the whole saliency pipeline.

#include "fgsal/connectivity.hpp"
#include "fgsal/error.hpp"
#include "fgsal/eval.hpp"
#include "fgsal/image.hpp"
#include "fgsal/image_io.hpp"
#include "fgsal/objectness.hpp"
#include "fgsal/optimize.hpp"
#include "fgsal/parallel.hpp"
#include "fgsal/pipeline.hpp"
#include "fgsal/superpixel.hpp"
