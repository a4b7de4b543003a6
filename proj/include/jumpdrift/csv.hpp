#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace jumpdrift {

/// Shortest decimal representation that round-trips.
std::string format_double(double value);

/// Comma separated, '.' decimal, LF line ends, mandatory header.
class CsvWriter {
 public:
  using Cell = std::variant<double, std::string>;

  CsvWriter(std::ostream& out, std::vector<std::string> header);

  void row(std::initializer_list<Cell> cells);
  void row(const std::vector<Cell>& cells);

 private:
  std::ostream& out_;
  std::size_t columns_;
};

}  // namespace jumpdrift
