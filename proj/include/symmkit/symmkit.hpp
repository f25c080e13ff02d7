#pragma once

#include "symmkit/errors.hpp"
#include "symmkit/hyperplane.hpp"
#include "symmkit/grid.hpp"
#include "symmkit/polygon.hpp"
#include "symmkit/contraction.hpp"
#include "symmkit/rearrangements.hpp"
#include "symmkit/chord_maps.hpp"
#include "symmkit/io.hpp"
#include "symmkit/sampling.hpp"
#include "symmkit/harness.hpp"
#include "symmkit/experiments.hpp"
