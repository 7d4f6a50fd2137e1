#pragma once

// Umbrella header for the whole library.

#include "flawnet/adam.hpp"
#include "flawnet/csv.hpp"
#include "flawnet/datapipe.hpp"
#include "flawnet/dataset.hpp"
#include "flawnet/error.hpp"
#include "flawnet/experiments.hpp"
#include "flawnet/featurize.hpp"
#include "flawnet/graph.hpp"
#include "flawnet/init.hpp"
#include "flawnet/loss.hpp"
#include "flawnet/matrix.hpp"
#include "flawnet/metrics.hpp"
#include "flawnet/model.hpp"
#include "flawnet/nn.hpp"
#include "flawnet/objectives.hpp"
#include "flawnet/report.hpp"
#include "flawnet/rng.hpp"
#include "flawnet/serialize.hpp"
#include "flawnet/synthetic.hpp"
#include "flawnet/training.hpp"
