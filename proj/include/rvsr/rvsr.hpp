// Copyright 2026 The rvsr Authors
// SPDX-License-Identifier: Apache-2.0

// Umbrella header for the range-view super-resolution library. libpng is
// only needed by rvsr/io/png.hpp, which is not included here.

#pragma once

#include "rvsr/error.hpp"
#include "rvsr/geometry/hole_compensation.hpp"
#include "rvsr/geometry/projection.hpp"
#include "rvsr/geometry/scan_io.hpp"
#include "rvsr/geometry/types.hpp"
#include "rvsr/io/calibration.hpp"
#include "rvsr/io/ply.hpp"
#include "rvsr/io/rimg.hpp"
#include "rvsr/metrics/metrics.hpp"
#include "rvsr/model/config.hpp"
#include "rvsr/model/network.hpp"
#include "rvsr/model/weight_io.hpp"
#include "rvsr/model/weights.hpp"
#include "rvsr/nn/blocks.hpp"
#include "rvsr/nn/ops.hpp"
#include "rvsr/ssm/discretize.hpp"
#include "rvsr/ssm/scan.hpp"
#include "rvsr/ssm/ss2d.hpp"
#include "rvsr/tensor.hpp"
