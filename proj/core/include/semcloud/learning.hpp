#pragma once

#include "semcloud/learning/dataset.hpp"
#include "semcloud/learning/knn.hpp"
#include "semcloud/learning/learned_function.hpp"
#include "semcloud/learning/metrics.hpp"
#include "semcloud/learning/mlp.hpp"
#include "semcloud/learning/model_io.hpp"
#include "semcloud/learning/polyr.hpp"
#include "semcloud/learning/registry.hpp"
#include "semcloud/learning/search.hpp"
