#pragma once

#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <string>
#include <string_view>

namespace ccqm {

/// Shortest decimal representation that round-trips; identical on every run.
std::string format_double(double x);
double parse_double(std::string_view text);
std::uint64_t parse_u64(std::string_view text);

/// Minimal CSV row writer. Fields are numbers or identifier-like strings,
/// so no quoting is performed.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void header(std::initializer_list<std::string_view> names);
  CsvWriter& field(double x);
  CsvWriter& field(std::uint64_t x);
  CsvWriter& field(std::string_view s);
  void end_row();

 private:
  void separator();

  std::ostream& out_;
  bool row_started_ = false;
};

}  // namespace ccqm
