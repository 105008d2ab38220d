#pragma once

// Near-field multi-antenna range estimation: signal model, ambiguity
// functions, Cramer-Rao bounds and the Monte Carlo validation harness.

#include "nfre/ambiguity.hpp"
#include "nfre/array_geometry.hpp"
#include "nfre/common.hpp"
#include "nfre/crb.hpp"
#include "nfre/estimator.hpp"
#include "nfre/io.hpp"
#include "nfre/scenario.hpp"
#include "nfre/special_functions.hpp"
#include "nfre/waveform.hpp"
