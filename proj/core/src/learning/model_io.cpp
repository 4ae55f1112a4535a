#include "semcloud/learning/model_io.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "semcloud/errors.hpp"

namespace semcloud::learn {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json rows = ordered_json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) rows.push_back(vector_json(m.row(r).transpose()));
  return rows;
}

const json& member(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw SchemaError(std::string("model file: missing '") + key + "'");
  return j[key];
}

double number(const json& j, const char* what) {
  if (!j.is_number()) throw SchemaError(std::string("model file: ") + what + " must be a number");
  return j.get<double>();
}

Eigen::VectorXd vector_of(const json& j, const char* what) {
  if (!j.is_array()) throw SchemaError(std::string("model file: ") + what + " must be a list");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = number(j[i], what);
  return v;
}

Eigen::MatrixXd matrix_of(const json& j, Eigen::Index cols, const char* what) {
  if (!j.is_array()) throw SchemaError(std::string("model file: ") + what + " must be a list of rows");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), cols);
  for (std::size_t r = 0; r < j.size(); ++r) {
    const Eigen::VectorXd row = vector_of(j[r], what);
    if (row.size() != cols) throw SchemaError(std::string("model file: ragged ") + what);
    m.row(static_cast<Eigen::Index>(r)) = row.transpose();
  }
  return m;
}

void expect_size(Eigen::Index got, std::size_t want, const char* what) {
  if (static_cast<std::size_t>(got) != want) throw SchemaError(std::string("model file: wrong length of ") + what);
}

}  // namespace

std::string serialize_model(const LearnedFunction& f) {
  ordered_json doc;
  doc["format"] = kModelFormat;
  doc["method"] = to_string(f.method());
  doc["target"] = f.target();
  doc["features"] = f.features();

  ordered_json m;
  if (const auto* p = std::get_if<PolyRModel>(&f.model())) {
    m["degree"] = p->degree;
    m["cross_terms"] = p->cross_terms;
    m["rank_deficient"] = p->rank_deficient;
    m["scale"] = vector_json(p->scale);
    m["weights"] = vector_json(p->weights);
  } else if (const auto* n = std::get_if<MLPModel>(&f.model())) {
    m["widths"] = n->widths;
    m["input_mean"] = vector_json(n->input_mean);
    m["input_scale"] = vector_json(n->input_scale);
    m["target_scale"] = n->target_scale;
    ordered_json layers = ordered_json::array();
    for (std::size_t l = 0; l < n->W.size(); ++l) {
      ordered_json layer;
      layer["W"] = matrix_json(n->W[l]);
      layer["b"] = vector_json(n->b[l]);
      layers.push_back(layer);
    }
    m["layers"] = layers;
    m["loss_history"] = n->loss_history;
  } else {
    const auto& k = std::get<KNNModel>(f.model());
    m["k"] = k.k;
    m["input_mean"] = vector_json(k.input_mean);
    m["input_scale"] = vector_json(k.input_scale);
    m["samples"] = matrix_json(k.samples);
    m["targets"] = vector_json(k.targets);
  }
  doc["model"] = m;
  return doc.dump(2) + "\n";
}

LearnedFunction parse_model(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError(std::string("model file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("format") || doc["format"] != kModelFormat) {
    throw SchemaError("model file must declare format " + std::string(kModelFormat));
  }
  const json& method_j = member(doc, "method");
  const json& target_j = member(doc, "target");
  const json& features_j = member(doc, "features");
  if (!method_j.is_string() || !target_j.is_string() || !features_j.is_array()) {
    throw SchemaError("model file: method/target must be strings and features a list");
  }
  Method method;
  try {
    method = parse_method(method_j.get<std::string>());
  } catch (const ConfigError& e) {
    throw SchemaError(std::string("model file: ") + e.what());
  }
  std::vector<std::string> features;
  for (const auto& f : features_j) {
    if (!f.is_string()) throw SchemaError("model file: feature names must be strings");
    features.push_back(f.get<std::string>());
  }
  const std::string target = target_j.get<std::string>();
  const json& m = member(doc, "model");

  try {
    switch (method) {
      case Method::PolyR: {
        PolyRModel p;
        p.degree = member(m, "degree").get<int>();
        p.cross_terms = member(m, "cross_terms").get<bool>();
        p.rank_deficient = member(m, "rank_deficient").get<bool>();
        p.scale = vector_of(member(m, "scale"), "scale");
        p.weights = vector_of(member(m, "weights"), "weights");
        p.features = std::move(features);
        if (p.degree < 1) throw SchemaError("model file: degree must be at least 1");
        expect_size(p.weights.size(), polyr_weight_count(p.input_dim(), p.degree, p.cross_terms), "weights");
        if (!p.features.empty()) expect_size(p.scale.size(), p.features.size(), "features");
        return {target, std::move(p)};
      }
      case Method::MLP: {
        MLPModel n;
        n.widths = member(m, "widths").get<std::vector<int>>();
        if (n.widths.size() < 3 || n.widths.back() != 1) throw SchemaError("model file: bad mlp widths");
        for (int w : n.widths) {
          if (w < 1) throw SchemaError("model file: mlp widths must be positive");
        }
        n.input_mean = vector_of(member(m, "input_mean"), "input_mean");
        n.input_scale = vector_of(member(m, "input_scale"), "input_scale");
        n.target_scale = number(member(m, "target_scale"), "target_scale");
        expect_size(n.input_mean.size(), n.input_dim(), "input_mean");
        expect_size(n.input_scale.size(), n.input_dim(), "input_scale");
        const json& layers = member(m, "layers");
        if (!layers.is_array() || layers.size() + 1 != n.widths.size()) {
          throw SchemaError("model file: mlp layer count does not match widths");
        }
        for (std::size_t l = 0; l < layers.size(); ++l) {
          Eigen::MatrixXd W = matrix_of(member(layers[l], "W"), n.widths[l], "W");
          Eigen::VectorXd b = vector_of(member(layers[l], "b"), "b");
          expect_size(W.rows(), static_cast<std::size_t>(n.widths[l + 1]), "W");
          expect_size(b.size(), static_cast<std::size_t>(n.widths[l + 1]), "b");
          n.W.push_back(std::move(W));
          n.b.push_back(std::move(b));
        }
        if (m.contains("loss_history")) n.loss_history = m["loss_history"].get<std::vector<double>>();
        n.features = std::move(features);
        if (!n.features.empty()) expect_size(n.input_mean.size(), n.features.size(), "features");
        return {target, std::move(n)};
      }
      case Method::KNN: {
        KNNModel k;
        k.k = member(m, "k").get<int>();
        k.input_mean = vector_of(member(m, "input_mean"), "input_mean");
        k.input_scale = vector_of(member(m, "input_scale"), "input_scale");
        expect_size(k.input_scale.size(), k.input_dim(), "input_scale");
        k.samples = matrix_of(member(m, "samples"), k.input_mean.size(), "samples");
        k.targets = vector_of(member(m, "targets"), "targets");
        expect_size(k.targets.size(), k.size(), "targets");
        if (k.k < 1 || static_cast<std::size_t>(k.k) > k.size()) throw SchemaError("model file: k out of range");
        k.features = std::move(features);
        if (!k.features.empty()) expect_size(k.input_mean.size(), k.features.size(), "features");
        return {target, std::move(k)};
      }
    }
  } catch (const json::exception& e) {
    throw SchemaError(std::string("model file: ") + e.what());
  }
  throw SchemaError("model file: unknown method");
}

void save_model(const std::string& path, const LearnedFunction& function) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model " + path);
  out << serialize_model(function);
}

LearnedFunction load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str());
}

}  // namespace semcloud::learn
