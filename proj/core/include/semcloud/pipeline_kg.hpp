#pragma once

#include "semcloud/pipeline_kg/document.hpp"
#include "semcloud/pipeline_kg/facts.hpp"
#include "semcloud/pipeline_kg/graph.hpp"
#include "semcloud/pipeline_kg/validate.hpp"
