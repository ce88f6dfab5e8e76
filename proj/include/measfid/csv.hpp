#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace measfid {

// Shortest decimal that parses back to the same double (std::to_chars).
std::string format_double(double value);
double      parse_double(std::string_view text);

/// Comma-separated table with a header row and LF line endings. Fields are
/// written verbatim; callers only emit numbers and simple identifiers.
class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> fields);
    void write(std::ostream &out) const;
    std::string str() const;

    static CsvTable parse(std::istream &in);

    const std::vector<std::string>              &header() const { return header_; }
    const std::vector<std::vector<std::string>> &rows() const { return rows_; }

  private:
    std::vector<std::string>              header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace measfid
