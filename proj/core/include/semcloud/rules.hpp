#pragma once

#include "semcloud/rules/configurator.hpp"
#include "semcloud/rules/corpus.hpp"
