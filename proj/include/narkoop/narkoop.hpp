#pragma once

// Umbrella header for the narkoop library: Koopman-operator identification
// of nonlinear autoregressive time series (causal-jump and Hankel DMD),
// forecasting, model selection, and growth-curve data tooling.

#include "narkoop/dictionary.hpp"
#include "narkoop/dmd.hpp"
#include "narkoop/embedding.hpp"
#include "narkoop/errors.hpp"
#include "narkoop/forecast.hpp"
#include "narkoop/growth_data.hpp"
#include "narkoop/linalg.hpp"
#include "narkoop/model_io.hpp"
#include "narkoop/model_selection.hpp"
#include "narkoop/monod.hpp"
#include "narkoop/types.hpp"
