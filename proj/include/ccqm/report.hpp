#pragma once

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace ccqm {

/// Named scalar results, each tagged with its unit and the formula that produced it.
class ConstraintReport {
 public:
  struct Entry {
    std::string name;
    double value = 0.0;
    std::string unit;
    std::string formula;
  };

  explicit ConstraintReport(std::string title) : title_(std::move(title)) {}

  void input(const std::string& name, double value, const std::string& unit);
  void input(const std::string& name, const std::string& value);
  void result(const std::string& name, double value, const std::string& unit, const std::string& formula);
  void note(const std::string& text);

  const Entry& at(const std::string& name) const;
  const std::vector<Entry>& results() const noexcept { return results_; }

  /// Pretty-printed JSON with keys in insertion order.
  void write_json(std::ostream& out) const;

 private:
  std::string title_;
  std::vector<Entry> inputs_;
  std::vector<std::pair<std::string, std::string>> text_inputs_;
  std::vector<Entry> results_;
  std::vector<std::string> notes_;
};

}  // namespace ccqm
