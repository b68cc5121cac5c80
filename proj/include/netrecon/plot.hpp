#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "netrecon/topology.hpp"

namespace netrecon {

/// Comma separated table with a header row. Fields are kept as text.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Column index by name; throws if absent.
  int column(std::string_view name) const;
  double number(std::size_t row, int col) const;
};

CsvTable parse_csv(std::string_view text);

struct LinePlotSpec {
  std::string title;
  std::string x_column;
  std::string y_column;
  std::string std_column;    // shaded mean +- std band when non-empty
  std::string group_column;  // one line per distinct value when non-empty
  std::string x_label;
  std::string y_label;
  bool log_x = false;
};

/// Line chart drawn from the table alone.
std::string line_chart_svg(const CsvTable& table, const LinePlotSpec& spec);

/// Nodes on a circle. Correct edges are black, spurious ones thin red and
/// missing ones dotted grey.
std::string network_svg(const Network& truth, const Network& recovered, const std::string& title);

}  // namespace netrecon
