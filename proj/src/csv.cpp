#include "doiclean/csv.hpp"

#include <istream>

namespace doiclean {

std::optional<std::vector<std::string>> CsvReader::next_row() {
  for (;;) {
    if (in_.peek() == std::char_traits<char>::eof()) return std::nullopt;
    ++line_;

    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool any = false;
    int ch;
    while ((ch = in_.get()) != std::char_traits<char>::eof()) {
      char c = static_cast<char>(ch);
      if (quoted) {
        if (c == '"') {
          if (in_.peek() == '"') {
            in_.get();
            field.push_back('"');
          } else {
            quoted = false;
          }
        } else {
          if (c == '\n') ++line_;
          field.push_back(c);
        }
        any = true;
        continue;
      }
      if (c == '\r') continue;
      if (c == '\n') break;
      any = true;
      if (c == '"' && field.empty()) {
        quoted = true;
      } else if (c == ',') {
        fields.push_back(std::move(field));
        field.clear();
      } else {
        field.push_back(c);
      }
    }
    if (!any) continue;  // blank line
    fields.push_back(std::move(field));
    return fields;
  }
}

std::string csv_escape(const std::string& field) {
  bool needs_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i != 0) out.push_back(',');
    out += csv_escape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

}  // namespace doiclean
