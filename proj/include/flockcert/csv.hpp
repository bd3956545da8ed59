#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace flockcert::csv {

/// A cell is either text (quoted when needed) or a number (17 significant
/// digits, `inf` for unbounded values).
class Cell {
 public:
  Cell(double v);                  // NOLINT(google-explicit-constructor)
  Cell(int v);                     // NOLINT(google-explicit-constructor)
  Cell(bool v);                    // NOLINT(google-explicit-constructor)
  Cell(std::string v);             // NOLINT(google-explicit-constructor)
  Cell(const char* v);             // NOLINT(google-explicit-constructor)

  const std::string& text() const { return text_; }

 private:
  std::string text_;
};

/// RFC-4180 writer: CRLF line endings, fields quoted when they contain
/// a separator, quote or line break.
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(out) {}

  void row(const std::vector<Cell>& cells);
  void header(const std::vector<std::string>& names);

 private:
  std::ostream& out_;
};

std::string escape(std::string_view field);

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws ParseError if absent.
  std::size_t column(std::string_view name) const;
};

/// Parses RFC-4180 text (CRLF or LF line endings). The first record is the
/// header. Throws ParseError on unbalanced quotes or ragged rows.
Table parse(std::string_view text);

}  // namespace flockcert::csv
