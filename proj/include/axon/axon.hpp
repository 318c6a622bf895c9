#pragma once

// Umbrella header for the whole library.

#include "axon/activation.hpp"
#include "axon/baseline.hpp"
#include "axon/csv.hpp"
#include "axon/errors.hpp"
#include "axon/experiment.hpp"
#include "axon/inner_opt.hpp"
#include "axon/matrix.hpp"
#include "axon/model.hpp"
#include "axon/parallel.hpp"
#include "axon/problems.hpp"
#include "axon/qr.hpp"
#include "axon/rng.hpp"
#include "axon/svg_plot.hpp"
#include "axon/train.hpp"
#include "axon/yarotsky.hpp"
