#pragma once

#include "unmix/cost_volume.hpp"
#include "unmix/image.hpp"
#include "unmix/image_io.hpp"
#include "unmix/image_ops.hpp"
#include "unmix/losses.hpp"
#include "unmix/metrics.hpp"
#include "unmix/mixture.hpp"
#include "unmix/postprocess.hpp"
#include "unmix/solver.hpp"
#include "unmix/warp.hpp"
