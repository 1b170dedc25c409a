#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace sinebeta::cli {

using Cell = std::variant<std::int64_t, double, std::string, bool>;

// One result table. Column order is fixed per subcommand.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

// 17 significant digits, so a row read back reproduces the doubles exactly.
std::string format_double(double x);

void write_csv(std::ostream& os, const Table& t);
void write_json(std::ostream& os, const Table& t, const nlohmann::ordered_json& metadata);

}  // namespace sinebeta::cli
