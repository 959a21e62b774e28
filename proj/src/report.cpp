#include "ccqm/report.hpp"

#include <json.hpp>
#include <stdexcept>

namespace ccqm {

void ConstraintReport::input(const std::string& name, double value, const std::string& unit) {
  inputs_.push_back({name, value, unit, "input"});
}

void ConstraintReport::input(const std::string& name, const std::string& value) {
  text_inputs_.emplace_back(name, value);
}

void ConstraintReport::result(const std::string& name, double value, const std::string& unit,
                              const std::string& formula) {
  results_.push_back({name, value, unit, formula});
}

void ConstraintReport::note(const std::string& text) { notes_.push_back(text); }

const ConstraintReport::Entry& ConstraintReport::at(const std::string& name) const {
  for (const auto& e : results_)
    if (e.name == name) return e;
  throw std::out_of_range("no report entry named " + name);
}

void ConstraintReport::write_json(std::ostream& out) const {
  using json = nlohmann::ordered_json;
  json j;
  j["report"] = title_;
  json inputs = json::object();
  for (const auto& e : inputs_) inputs[e.name] = {{"value", e.value}, {"unit", e.unit}};
  for (const auto& [k, v] : text_inputs_) inputs[k] = {{"value", v}};
  j["inputs"] = std::move(inputs);
  json results = json::object();
  for (const auto& e : results_)
    results[e.name] = {{"value", e.value}, {"unit", e.unit}, {"formula", e.formula}};
  j["results"] = std::move(results);
  j["notes"] = notes_;
  out << j.dump(2) << '\n';
}

}  // namespace ccqm
