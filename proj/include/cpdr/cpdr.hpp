#pragma once

// Umbrella header: robust-scatter contour projection and sliced inverse
// regression toolkit — estimators, dimension selection, evaluation metric,
// simulation benchmarks, and fit/report plumbing.

#include "cpdr/types.hpp"
#include "cpdr/rng.hpp"
#include "cpdr/robust_scatter.hpp"
#include "cpdr/projection.hpp"
#include "cpdr/slicing.hpp"
#include "cpdr/kernels.hpp"
#include "cpdr/subspace.hpp"
#include "cpdr/evaluation.hpp"
#include "cpdr/simulation.hpp"
#include "cpdr/fit.hpp"
#include "cpdr/io.hpp"
