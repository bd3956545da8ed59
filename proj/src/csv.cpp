#include "flockcert/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <ostream>

#include "flockcert/errors.hpp"
#include "flockcert/numfmt.hpp"

namespace flockcert {

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

std::string format_shortest(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

double parse_double(std::string_view token) {
  if (token == "inf" || token == "+inf") return HUGE_VAL;
  if (token == "-inf") return -HUGE_VAL;
  if (token == "nan") return std::nan("");
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto* first = token.data();
  const auto* last = token.data() + token.size();
  const auto res = std::from_chars(first, last, value);
  if (token.empty() || res.ec != std::errc() || res.ptr != last)
    throw ParseError("not a number: '" + std::string(token) + "'");
  return value;
}

namespace csv {

Cell::Cell(double v) : text_(format_double(v)) {}
Cell::Cell(int v) : text_(std::to_string(v)) {}
Cell::Cell(bool v) : text_(v ? "true" : "false") {}
Cell::Cell(std::string v) : text_(std::move(v)) {}
Cell::Cell(const char* v) : text_(v) {}

std::string escape(std::string_view field) {
  if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

void Writer::row(const std::vector<Cell>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out_ << ',';
    out_ << escape(cells[i].text());
  }
  out_ << "\r\n";
}

void Writer::header(const std::vector<std::string>& names) {
  std::vector<Cell> cells(names.begin(), names.end());
  row(cells);
}

std::size_t Table::column(std::string_view name) const {
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == name) return i;
  throw ParseError("missing CSV column '" + std::string(name) + "'");
}

Table parse(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;

  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(record));
    record.clear();
  };

  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    switch (c) {
      case '"':
        if (field_started && !field.empty()) throw ParseError("stray quote inside CSV field");
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        end_field();
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_record();
        break;
      case '\n':
        end_record();
        break;
      default:
        field += c;
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted CSV field");
  if (field_started || !record.empty()) end_record();

  Table table;
  if (records.empty()) throw ParseError("empty CSV input (header row is mandatory)");
  table.header = std::move(records.front());
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size())
      throw ParseError("CSV row " + std::to_string(r) + " has " +
                       std::to_string(records[r].size()) + " fields, header has " +
                       std::to_string(table.header.size()));
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

}  // namespace csv
}  // namespace flockcert
