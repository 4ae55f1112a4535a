#pragma once

#include "semcloud/datalog/ast.hpp"
#include "semcloud/datalog/engine.hpp"
#include "semcloud/datalog/externals.hpp"
#include "semcloud/datalog/fact_set.hpp"
#include "semcloud/datalog/program.hpp"
#include "semcloud/datalog/value.hpp"
