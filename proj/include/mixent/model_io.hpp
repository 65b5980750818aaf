#ifndef MIXENT_MODEL_IO_HPP
#define MIXENT_MODEL_IO_HPP

#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mixent/bounds.hpp"
#include "mixent/density.hpp"
#include "mixent/quadrature.hpp"

// JSON model files and report serialization.
//
// Model schema:
//   {
//     "dim": d,
//     "weights": [w_1, ..., w_n],
//     "components": [
//       {"type": "gaussian", "mean": [...], "sigma": s},
//       {"type": "pushforward", "base": "gaussian", "base_sigma": s,
//        "A": [[...], ...], "b": [...]}
//     ]
//   }

namespace mixent {

using json = nlohmann::json;

namespace detail {

inline void reject_unknown_keys(const json &obj, const std::set<std::string> &allowed,
                                const std::string &where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw input_error("model json: unknown key '" + it.key() + "' in " +
                        where);
}

inline Vec parse_vec(const json &j, int dim, const std::string &what) {
  if (!j.is_array() || static_cast<int>(j.size()) != dim)
    throw input_error("model json: " + what + " must be an array of length " +
                      std::to_string(dim));
  Vec v;
  for (const auto &x : j) v.push_back(x.get<double>());
  return v;
}

inline ComponentDensity parse_component(const json &c, int dim) {
  if (!c.is_object())
    throw input_error("model json: component must be an object");
  const std::string type = c.at("type").get<std::string>();
  if (type == "gaussian") {
    reject_unknown_keys(c, {"type", "mean", "sigma"}, "gaussian component");
    return ComponentDensity(IsotropicGaussian(
        dim, parse_vec(c.at("mean"), dim, "mean"), c.at("sigma").get<double>()));
  }
  if (type == "pushforward") {
    reject_unknown_keys(c, {"type", "base", "base_sigma", "A", "b"},
                        "pushforward component");
    const std::string base = c.at("base").get<std::string>();
    if (base != "gaussian")
      throw input_error("model json: unsupported base '" + base + "'");
    const double bs = c.value("base_sigma", 1.0);
    const json &a = c.at("A");
    if (!a.is_array() || static_cast<int>(a.size()) != dim)
      throw input_error("model json: A must be a " + std::to_string(dim) +
                        "-row matrix");
    Matrix mat;
    mat.d = dim;
    for (const auto &row : a) {
      const Vec r = parse_vec(row, dim, "A row");
      mat.m.insert(mat.m.end(), r.begin(), r.end());
    }
    AffineMap map(mat, parse_vec(c.at("b"), dim, "b"));
    return ComponentDensity(
        Pushforward(RadialProfile::std_gaussian(dim, bs), std::move(map)));
  }
  throw input_error("model json: unknown component type '" + type + "'");
}

} // namespace detail

inline MixtureModel model_from_json(const json &j) {
  if (!j.is_object()) throw input_error("model json: top level must be object");
  detail::reject_unknown_keys(j, {"dim", "weights", "components"}, "model");
  const int dim = j.at("dim").get<int>();
  if (dim < 1) throw input_error("model json: dim must be >= 1");
  const json &w = j.at("weights");
  const json &cs = j.at("components");
  if (!w.is_array() || !cs.is_array() || w.size() != cs.size())
    throw input_error("model json: weights/components must be equal-length arrays");
  Vec weights;
  for (const auto &x : w) weights.push_back(x.get<double>());
  std::vector<ComponentDensity> components;
  for (const auto &c : cs) components.push_back(detail::parse_component(c, dim));
  return MixtureModel(std::move(weights), std::move(components));
}

inline MixtureModel load_model(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw input_error("load_model: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error &e) {
    throw input_error("load_model: parse failure in " + path + ": " +
                      e.what());
  }
  return model_from_json(j);
}

inline json to_json(const Estimate &e) {
  json j;
  j["value"] = e.value;
  j["error"] = e.error;
  j["method"] =
      e.method == EstimateMethod::quadrature ? "quadrature" : "monte_carlo";
  if (e.method == EstimateMethod::monte_carlo) j["seed"] = e.seed;
  return j;
}

inline json to_json(const BoundReport &r) {
  json j;
  j["value"] = r.value;
  j["kind"] = bound_kind_name(r.kind);
  j["binding"] = r.binding();
  j["clamped"] = r.clamped;
  json pre = json::object();
  for (const auto &p : r.preconditions) pre[p.first] = p.second;
  j["preconditions"] = pre;
  json echo = json::object();
  for (const auto &kv : r.inputs_echo) echo[kv.first] = kv.second;
  j["inputs"] = echo;
  return j;
}

} // namespace mixent

#endif
