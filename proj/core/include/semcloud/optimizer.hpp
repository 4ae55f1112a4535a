#pragma once

#include "semcloud/optimizer/optimizer.hpp"
#include "semcloud/optimizer/slicing_externals.hpp"
