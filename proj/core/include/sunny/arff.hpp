#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace sunny {

enum class AttributeKind { numeric, text, nominal };

struct Attribute {
  std::string name;
  AttributeKind kind = AttributeKind::numeric;
  std::vector<std::string> nominal_values;  // only for nominal

  friend bool operator==(const Attribute&, const Attribute&) = default;
};

struct Missing {
  friend bool operator==(Missing, Missing) { return true; }
};

using Cell = std::variant<Missing, double, std::string>;

inline bool is_missing(const Cell& c) { return std::holds_alternative<Missing>(c); }

// In-memory form of the dense ARFF subset ASlib uses.
struct RelationTable {
  std::string relation_name;
  std::vector<Attribute> attributes;
  std::vector<std::vector<Cell>> rows;

  // Case-insensitive lookup.
  [[nodiscard]] std::optional<std::size_t> attribute_index(std::string_view name) const;

  friend bool operator==(const RelationTable&, const RelationTable&) = default;
};

// Throws ParseError naming the offending line.
RelationTable parse_arff(std::istream& in);
RelationTable parse_arff(std::string_view text);
RelationTable read_arff_file(const std::filesystem::path& path);

void write_arff(std::ostream& out, const RelationTable& table);
std::string write_arff(const RelationTable& table);

}  // namespace sunny
