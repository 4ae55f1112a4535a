#pragma once

#include <string>
#include <string_view>

#include "semcloud/learning/learned_function.hpp"

namespace semcloud::learn {

inline constexpr std::string_view kModelFormat = "semcloud-model/1";

/// JSON with format tag, method, target, features, hyper-parameters and all
/// weights; doubles are written in shortest round-trip form.
std::string serialize_model(const LearnedFunction& function);
/// Throws SchemaError on malformed input.
LearnedFunction parse_model(std::string_view text);

void save_model(const std::string& path, const LearnedFunction& function);
LearnedFunction load_model(const std::string& path);

}  // namespace semcloud::learn
