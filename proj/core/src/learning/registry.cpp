#include "semcloud/learning/registry.hpp"

#include <algorithm>
#include <memory>

#include "semcloud/errors.hpp"

namespace semcloud::learn {

const std::vector<ExternalSignature>& model_signatures() {
  static const std::vector<ExternalSignature> signatures{
      {"func_ms", {"n", "v"}, "ms", RunKind::Estimation},
      {"func_mp", {"n", "v", "ms", "i"}, "mp", RunKind::Estimation},
      {"func_ssl", {"n", "v"}, "ssl", RunKind::Estimation},
      {"func_spr", {"n", "v", "ssl", "i"}, "spr", RunKind::Estimation},
      {"func_sst", {"n", "v", "ssl", "spr"}, "sst", RunKind::Estimation},
      {"func_ss", {"n", "v", "nc", "ns"}, "ms", RunKind::Configuration},
      {"func_pn", {"n", "v", "nc", "ns"}, "mp", RunKind::Configuration},
  };
  return signatures;
}

const ExternalSignature* find_signature(std::string_view name) {
  if (!name.empty() && name.front() == '@') name.remove_prefix(1);
  for (const auto& s : model_signatures()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

datalog::ExternalRegistry register_externals(const std::map<std::string, LearnedFunction>& models,
                                             datalog::ExternalRegistry base) {
  for (const auto& [name, model] : models) {
    const ExternalSignature* sig = find_signature(name);
    if (!sig) throw SignatureMismatch("no external signature named '" + name + "'");
    if (!model.target().empty() && model.target() != sig->target) {
      throw SignatureMismatch("@" + sig->name + " predicts " + sig->target + ", model predicts " + model.target());
    }

    // Position of each model input within the call's arguments.
    std::vector<std::size_t> picks;
    const auto& features = model.features();
    if (features.empty()) {
      const std::size_t dim = std::visit([](const auto& m) { return m.input_dim(); }, model.model());
      if (dim != sig->params.size()) {
        throw SignatureMismatch("@" + sig->name + " takes " + std::to_string(sig->params.size()) +
                                " arguments, unnamed model has " + std::to_string(dim) + " inputs");
      }
      for (std::size_t i = 0; i < dim; ++i) picks.push_back(i);
    } else {
      for (const auto& f : features) {
        const auto it = std::find(sig->params.begin(), sig->params.end(), f);
        if (it == sig->params.end()) {
          throw SignatureMismatch("@" + sig->name + " has no argument '" + f + "'");
        }
        const auto pos = static_cast<std::size_t>(it - sig->params.begin());
        if (std::find(picks.begin(), picks.end(), pos) != picks.end()) {
          throw SignatureMismatch("@" + sig->name + ": feature '" + f + "' repeated");
        }
        picks.push_back(pos);
      }
    }

    auto shared = std::make_shared<const LearnedFunction>(model);
    base.add(sig->name, sig->params.size(), [shared, picks](std::span<const double> args) {
      std::vector<double> x(picks.size());
      for (std::size_t i = 0; i < picks.size(); ++i) x[i] = args[picks[i]];
      return shared->predict(x);
    });
  }
  return base;
}

}  // namespace semcloud::learn
