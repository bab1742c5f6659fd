#include "monowrap/json_io.hpp"

namespace monowrap {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  fail(ErrorKind::kInvalidConfig, where + ": " + what);
}

}  // namespace

DiscreteDistribution distribution_from_json(const json& doc) {
  if (!doc.is_object()) bad("/", "distribution must be an object");
  if (!doc.contains("k") || !doc["k"].is_number_integer()) {
    bad("/k", "missing or non-integer label count");
  }
  const int k = doc["k"].get<int>();
  if (!doc.contains("support") || !doc["support"].is_array()) {
    bad("/support", "missing support array");
  }

  Domain domain;
  std::vector<WeightedExample> support;
  bool saw_named = false;
  bool saw_euclidean = false;
  std::size_t dim = 0;
  const auto& entries = doc["support"];
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const std::string where = "/support/" + std::to_string(i);
    const auto& e = entries[i];
    if (!e.is_object() || !e.contains("point") || !e.contains("label") ||
        !e.contains("p")) {
      bad(where, "entries need point, label and p");
    }
    if (!e["label"].is_number_integer()) bad(where + "/label", "not an integer");
    if (!e["p"].is_number()) bad(where + "/p", "not a number");

    Point point;
    if (e["point"].is_string()) {
      saw_named = true;
      point = domain.intern(e["point"].get<std::string>());
    } else if (e["point"].is_array()) {
      EuclideanPoint p;
      for (const auto& c : e["point"]) {
        if (!c.is_number()) bad(where + "/point", "coordinates must be numbers");
        p.coords.push_back(c.get<double>());
      }
      if (p.coords.empty()) bad(where + "/point", "empty coordinate vector");
      if (saw_euclidean && p.coords.size() != dim) {
        bad(where + "/point", "dimension mismatch");
      }
      dim = p.coords.size();
      saw_euclidean = true;
      point = std::move(p);
    } else {
      bad(where + "/point", "must be a string or an array of numbers");
    }
    support.push_back(
        {Example{std::move(point), e["label"].get<int>()}, e["p"].get<double>()});
  }
  if (saw_named && saw_euclidean) {
    bad("/support", "named and Euclidean points cannot be mixed");
  }
  try {
    return DiscreteDistribution(k, std::move(support), std::move(domain));
  } catch (const Error& err) {
    bad("/support", err.what());
  }
}

json distribution_to_json(const DiscreteDistribution& dist) {
  json support = json::array();
  for (const auto& w : dist.support()) {
    json point;
    if (const auto* id = std::get_if<PointId>(&w.example.point)) {
      point = dist.domain().name(*id);
    } else {
      point = std::get<EuclideanPoint>(w.example.point).coords;
    }
    support.push_back(
        {{"point", point}, {"label", w.example.label}, {"p", w.probability}});
  }
  return {{"k", dist.num_labels()}, {"support", support}};
}

Hypothesis hypothesis_from_json(const json& table, const Domain& domain,
                                int num_labels) {
  if (!table.is_object()) bad("table", "hypothesis table must be an object");
  std::vector<Label> labels(domain.size(), -1);
  for (const auto& [name, value] : table.items()) {
    auto id = domain.find(name);
    if (!id) bad("table/" + name, "point is not in the distribution's domain");
    if (!value.is_number_integer()) bad("table/" + name, "label must be an integer");
    labels[id->value] = value.get<int>();
  }
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= num_labels) {
      bad("table/" + domain.name(PointId{static_cast<std::uint32_t>(i)}),
          "missing or out-of-range label");
    }
  }
  return Hypothesis::table(std::move(labels), num_labels);
}

json hypothesis_to_json(const Hypothesis& h, const Domain& domain) {
  json out = json::object();
  for (std::uint32_t i = 0; i < domain.size(); ++i) {
    out[domain.name(PointId{i})] = h(PointId{i});
  }
  return out;
}

}  // namespace monowrap
