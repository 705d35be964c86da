#pragma once

#include "gaitse/error.hpp"
#include "gaitse/experiment.hpp"
#include "gaitse/mann_whitney.hpp"
#include "gaitse/sample_entropy.hpp"
#include "gaitse/skeleton.hpp"
#include "gaitse/svg.hpp"
#include "gaitse/synthesis.hpp"
#include "gaitse/tilt.hpp"
