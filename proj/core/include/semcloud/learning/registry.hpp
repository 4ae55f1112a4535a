#pragma once

#include <map>
#include <string>
#include <vector>

#include "semcloud/datalog/externals.hpp"
#include "semcloud/learning/learned_function.hpp"

namespace semcloud::learn {

/// Call signature of an external used by the rule corpus.
struct ExternalSignature {
  std::string name;  // without '@'
  std::vector<std::string> params;
  std::string target;  // pilot column the model predicts
  RunKind kind = RunKind::Estimation;
};

/// func_ms(n,v), func_mp(n,v,ms,i), func_ssl(n,v), func_spr(n,v,ssl,i),
/// func_sst(n,v,ssl,spr), func_ss(n,v,nc,ns), func_pn(n,v,nc,ns).
const std::vector<ExternalSignature>& model_signatures();
const ExternalSignature* find_signature(std::string_view name);

/// Binds each model to its external. A model's features must be distinct
/// names drawn from the signature's parameters; arguments are picked by
/// name at call time. Throws SignatureMismatch.
datalog::ExternalRegistry register_externals(const std::map<std::string, LearnedFunction>& models,
                                             datalog::ExternalRegistry base = {});

}  // namespace semcloud::learn
