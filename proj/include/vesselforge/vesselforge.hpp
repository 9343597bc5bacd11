#pragma once

#include "vesselforge/core.hpp"
#include "vesselforge/geometry.hpp"
#include "vesselforge/graph.hpp"
#include "vesselforge/bezier.hpp"
#include "vesselforge/mask.hpp"
#include "vesselforge/perlin.hpp"
#include "vesselforge/imaging.hpp"
#include "vesselforge/presets.hpp"
#include "vesselforge/sample.hpp"
#include "vesselforge/shard.hpp"
#include "vesselforge/eval.hpp"
#include "vesselforge/projection.hpp"
