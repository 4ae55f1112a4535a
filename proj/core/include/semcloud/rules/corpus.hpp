#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>

#include "semcloud/datalog/fact_set.hpp"
#include "semcloud/datalog/program.hpp"

namespace semcloud::rules {

/// The four configuration rules, one per cell of the (memory, storage)
/// threshold partition.
enum class Strategy { FastUnsliced, FastSliced, CloudUnsliced, CloudSliced };

inline constexpr std::array<Strategy, 4> kStrategies{Strategy::FastUnsliced, Strategy::FastSliced,
                                                     Strategy::CloudUnsliced, Strategy::CloudSliced};

std::string_view to_string(Strategy strategy);
/// Label of the corpus rule implementing `strategy`.
std::string_view rule_label(Strategy strategy);
std::optional<Strategy> strategy_of_label(std::string_view label);

/// Graph extraction, cloud attributes, estimation and the four
/// configuration rules, as program text.
const std::string& corpus_text();

/// corpus_text() parsed once.
const datalog::Program& corpus();

inline constexpr int kDefaultRange = 10;

/// range(1) .. range(count). Throws InvalidInput when count < 1.
datalog::FactSet range_facts(int count = kDefaultRange);

}  // namespace semcloud::rules
