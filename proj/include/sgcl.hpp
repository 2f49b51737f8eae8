#pragma once

#include "sgcl/errors.hpp"
#include "sgcl/dense.hpp"
#include "sgcl/rng.hpp"
#include "sgcl/graph.hpp"
#include "sgcl/datasets.hpp"
#include "sgcl/samplers.hpp"
#include "sgcl/augment.hpp"
#include "sgcl/smoothing.hpp"
#include "sgcl/encoder.hpp"
#include "sgcl/objective.hpp"
#include "sgcl/training.hpp"
#include "sgcl/evaluation.hpp"
#include "sgcl/config.hpp"
#include "sgcl/metrics.hpp"
