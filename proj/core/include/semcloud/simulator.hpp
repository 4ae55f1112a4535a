#pragma once

#include "semcloud/simulator/cluster.hpp"
#include "semcloud/simulator/deploy.hpp"
#include "semcloud/simulator/pilot.hpp"
#include "semcloud/simulator/run.hpp"
#include "semcloud/simulator/trace.hpp"
