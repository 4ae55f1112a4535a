#pragma once

#include "semcloud/etl/generator.hpp"
#include "semcloud/etl/ingest.hpp"
#include "semcloud/etl/mapping.hpp"
#include "semcloud/etl/reference.hpp"
#include "semcloud/etl/schema.hpp"
#include "semcloud/etl/slicing.hpp"
#include "semcloud/etl/store.hpp"
