#include "bfix/multivalued.hpp"

#include <json.hpp>

#include <istream>
#include <map>
#include <memory>

namespace bfix {

FiniteMultiMap read_finite_multimap_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParameterError(std::string("multimap JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("points") || !doc.contains("images"))
    throw ParameterError("multimap JSON needs \"points\" and \"images\"");
  for (const auto& [key, _] : doc.items())
    if (key != "points" && key != "images" && key != "alpha")
      throw ParameterError("multimap JSON has unknown key \"" + key + "\"");

  FiniteMultiMap out;
  std::map<std::string, std::size_t> index;
  for (const auto& p : doc.at("points")) {
    if (!p.is_string()) throw ParameterError("multimap point ids must be strings");
    const auto name = p.get<std::string>();
    if (!index.emplace(name, out.names.size()).second) throw ParameterError("duplicate point id \"" + name + "\"");
    out.names.push_back(name);
  }
  const std::size_t n = out.names.size();
  if (n == 0) throw ParameterError("multimap JSON has no points");

  auto lookup = [&](const nlohmann::json& id) {
    if (!id.is_string() || !index.contains(id.get<std::string>()))
      throw ParameterError("unknown point id " + id.dump());
    return index.at(id.get<std::string>());
  };

  auto images = std::make_shared<std::vector<std::vector<Label>>>(n);
  const auto& img = doc.at("images");
  if (!img.is_object()) throw ParameterError("\"images\" must map point ids to id lists");
  for (const auto& [key, targets] : img.items()) {
    const std::size_t i = lookup(nlohmann::json(key));
    if (!targets.is_array() || targets.empty()) throw ParameterError("image of \"" + key + "\" must be a non-empty list");
    for (const auto& t : targets) (*images)[i].push_back(Label{lookup(t)});
  }
  for (std::size_t i = 0; i < n; ++i)
    if ((*images)[i].empty()) throw ParameterError("point \"" + out.names[i] + "\" has no image");

  out.map = MultiMap<Label>{[images](const Label& x) { return images->at(x.index); }, "finite"};

  if (doc.contains("alpha")) {
    const auto& a = doc.at("alpha");
    auto table = std::make_shared<Eigen::MatrixXd>(n, n);
    if (!a.is_array() || a.size() != n) throw ParameterError("\"alpha\" must be an n x n array");
    for (std::size_t i = 0; i < n; ++i) {
      if (!a[i].is_array() || a[i].size() != n) throw ParameterError("\"alpha\" must be an n x n array");
      for (std::size_t j = 0; j < n; ++j) {
        if (!a[i][j].is_number() || !(a[i][j].get<double>() >= 0.0))
          throw ParameterError("\"alpha\" entries must be non-negative numbers");
        (*table)(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a[i][j].get<double>();
      }
    }
    out.alpha = AlphaFunction<Label>{[table](const Label& x, const Label& y) {
                                       return (*table)(static_cast<Eigen::Index>(x.index),
                                                       static_cast<Eigen::Index>(y.index));
                                     },
                                     "table"};
  } else {
    out.alpha = AlphaFunction<Label>::constant(1.0);
  }
  return out;
}

}  // namespace bfix
