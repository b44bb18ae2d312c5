#ifndef DOICLEAN_CSV_HPP
#define DOICLEAN_CSV_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace doiclean {

// Minimal RFC 4180 reader: quoted fields, doubled quotes, CRLF tolerance.
// Invalid DOIs routinely contain commas, so quoting is not optional here.
class CsvReader {
public:
  explicit CsvReader(std::istream& in) : in_(in) {}

  // Next row, or nullopt at end of input. Empty lines are skipped.
  std::optional<std::vector<std::string>> next_row();
  std::uint64_t line() const { return line_; }

private:
  std::istream& in_;
  std::uint64_t line_ = 0;
};

std::string csv_escape(const std::string& field);
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace doiclean

#endif
