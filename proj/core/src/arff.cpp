#include "sunny/arff.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "sunny/error.hpp"
#include "sunny/report_io.hpp"

namespace sunny {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

bool starts_with_keyword(std::string_view line, std::string_view keyword) {
  if (line.size() < keyword.size() || !iequals(line.substr(0, keyword.size()), keyword)) return false;
  return line.size() == keyword.size() || std::isspace(static_cast<unsigned char>(line[keyword.size()]));
}

// Reads one possibly-quoted token from the front of `s`. Quotes may be ' or ".
std::string read_token(std::string_view& s, std::size_t line_no) {
  s = trim(s);
  if (s.empty()) throw ParseError(line_no, "expected a token");
  std::string out;
  if (s.front() == '\'' || s.front() == '"') {
    const char quote = s.front();
    std::size_t i = 1;
    for (; i < s.size(); ++i) {
      if (s[i] == '\\' && i + 1 < s.size()) {
        out.push_back(s[++i]);
      } else if (s[i] == quote) {
        break;
      } else {
        out.push_back(s[i]);
      }
    }
    if (i >= s.size()) throw ParseError(line_no, "unterminated quoted token");
    s.remove_prefix(i + 1);
    return out;
  }
  std::size_t i = 0;
  while (i < s.size() && !std::isspace(static_cast<unsigned char>(s[i])) && s[i] != '{') ++i;
  out.assign(s.substr(0, i));
  s.remove_prefix(i);
  return out;
}

// Splits a data row or nominal list on commas outside quotes; returns raw
// fields with quotes removed and a flag telling whether each was quoted.
std::vector<std::pair<std::string, bool>> split_fields(std::string_view s, std::size_t line_no) {
  std::vector<std::pair<std::string, bool>> fields;
  std::size_t i = 0;
  while (true) {
    while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    std::string value;
    bool quoted = false;
    if (i < s.size() && (s[i] == '\'' || s[i] == '"')) {
      const char quote = s[i++];
      quoted = true;
      bool closed = false;
      for (; i < s.size(); ++i) {
        if (s[i] == '\\' && i + 1 < s.size()) {
          value.push_back(s[++i]);
        } else if (s[i] == quote) {
          closed = true;
          ++i;
          break;
        } else {
          value.push_back(s[i]);
        }
      }
      if (!closed) throw ParseError(line_no, "unterminated quoted value");
      while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && s[i] != ',') throw ParseError(line_no, "unexpected text after quoted value");
    } else {
      const std::size_t start = i;
      while (i < s.size() && s[i] != ',') ++i;
      value.assign(trim(s.substr(start, i - start)));
    }
    fields.emplace_back(std::move(value), quoted);
    if (i >= s.size()) break;
    ++i;  // comma
  }
  return fields;
}

Attribute parse_attribute(std::string_view rest, std::size_t line_no) {
  Attribute attr;
  attr.name = read_token(rest, line_no);
  if (attr.name.empty()) throw ParseError(line_no, "attribute without a name");
  rest = trim(rest);
  if (rest.empty()) throw ParseError(line_no, "attribute '" + attr.name + "' has no type");
  if (rest.front() == '{') {
    const auto close = rest.rfind('}');
    if (close == std::string_view::npos) throw ParseError(line_no, "unterminated nominal list");
    attr.kind = AttributeKind::nominal;
    for (auto& [value, quoted] : split_fields(rest.substr(1, close - 1), line_no)) {
      if (value.empty() && !quoted) continue;
      attr.nominal_values.push_back(std::move(value));
    }
    return attr;
  }
  const std::string type = read_token(rest, line_no);
  if (iequals(type, "numeric") || iequals(type, "real") || iequals(type, "integer")) {
    attr.kind = AttributeKind::numeric;
  } else if (iequals(type, "string")) {
    attr.kind = AttributeKind::text;
  } else {
    throw ParseError(line_no, "unsupported attribute type '" + type + "'");
  }
  return attr;
}

bool needs_quotes(std::string_view s) {
  if (s.empty() || s == "?") return true;
  return std::any_of(s.begin(), s.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c)) || c == ',' || c == '\'' || c == '"' || c == '%' ||
           c == '{' || c == '}' || c == '\\';
  });
}

std::string quote(std::string_view s) {
  if (!needs_quotes(s)) return std::string(s);
  std::string out = "'";
  for (char c : s) {
    if (c == '\'' || c == '\\') out.push_back('\\');
    out.push_back(c);
  }
  out.push_back('\'');
  return out;
}

}  // namespace

std::optional<std::size_t> RelationTable::attribute_index(std::string_view name) const {
  for (std::size_t i = 0; i < attributes.size(); ++i) {
    if (iequals(attributes[i].name, name)) return i;
  }
  return std::nullopt;
}

RelationTable parse_arff(std::istream& in) {
  RelationTable table;
  bool have_relation = false;
  bool in_data = false;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty() || line.front() == '%') continue;

    if (!in_data) {
      if (line.front() != '@') throw ParseError(line_no, "expected a header declaration");
      if (starts_with_keyword(line, "@relation")) {
        std::string_view rest = line.substr(9);
        table.relation_name = trim(rest).empty() ? std::string() : read_token(rest, line_no);
        have_relation = true;
      } else if (starts_with_keyword(line, "@attribute")) {
        if (!have_relation) throw ParseError(line_no, "@ATTRIBUTE before @RELATION");
        table.attributes.push_back(parse_attribute(line.substr(10), line_no));
      } else if (starts_with_keyword(line, "@data")) {
        if (!have_relation) throw ParseError(line_no, "@DATA before @RELATION");
        if (table.attributes.empty()) throw ParseError(line_no, "@DATA without attributes");
        in_data = true;
      } else {
        throw ParseError(line_no, "unknown declaration '" + std::string(line.substr(0, line.find(' '))) + "'");
      }
      continue;
    }

    if (line.front() == '{') throw ParseError(line_no, "sparse ARFF rows are not supported");
    auto fields = split_fields(line, line_no);
    if (fields.size() != table.attributes.size()) {
      throw ParseError(line_no, "row has " + std::to_string(fields.size()) + " cells, expected " +
                                    std::to_string(table.attributes.size()));
    }
    std::vector<Cell> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      auto& [value, quoted] = fields[c];
      if (!quoted && value == "?") {
        row.emplace_back(Missing{});
        continue;
      }
      if (table.attributes[c].kind == AttributeKind::numeric) {
        double x = 0.0;
        const char* first = value.data();
        const char* last = value.data() + value.size();
        if (!value.empty() && *first == '+') ++first;
        auto [ptr, ec] = std::from_chars(first, last, x);
        if (ec != std::errc() || ptr != last || !std::isfinite(x)) {
          throw ParseError(line_no, "cannot parse '" + value + "' as a number for attribute '" +
                                        table.attributes[c].name + "'");
        }
        row.emplace_back(x);
      } else {
        row.emplace_back(std::move(value));
      }
    }
    table.rows.push_back(std::move(row));
  }
  if (!have_relation) throw ParseError(line_no, "missing @RELATION");
  if (!in_data) throw ParseError(line_no, "missing @DATA");
  return table;
}

RelationTable parse_arff(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_arff(in);
}

RelationTable read_arff_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return parse_arff(in);
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path.filename().string() + ": " + e.what());
  }
}

void write_arff(std::ostream& out, const RelationTable& table) {
  out << "@RELATION " << quote(table.relation_name) << "\n\n";
  for (const auto& attr : table.attributes) {
    out << "@ATTRIBUTE " << quote(attr.name) << ' ';
    switch (attr.kind) {
      case AttributeKind::numeric: out << "NUMERIC"; break;
      case AttributeKind::text: out << "STRING"; break;
      case AttributeKind::nominal: {
        out << '{';
        for (std::size_t i = 0; i < attr.nominal_values.size(); ++i) {
          if (i) out << ',';
          out << quote(attr.nominal_values[i]);
        }
        out << '}';
        break;
      }
    }
    out << '\n';
  }
  out << "\n@DATA\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      if (is_missing(row[c])) {
        out << '?';
      } else if (const double* x = std::get_if<double>(&row[c])) {
        out << format_number(*x);
      } else {
        out << quote(std::get<std::string>(row[c]));
      }
    }
    out << '\n';
  }
}

std::string write_arff(const RelationTable& table) {
  std::ostringstream out;
  write_arff(out, table);
  return out.str();
}

}  // namespace sunny
