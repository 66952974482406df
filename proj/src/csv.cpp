#include "micromob/csv.hpp"

#include <istream>
#include <ostream>

namespace micromob::csv {

bool Reader::next(std::vector<std::string>& fields) {
  fields.clear();
  std::streambuf* buf = in_->rdbuf();
  int ch = buf->sbumpc();
  if (ch == std::streambuf::traits_type::eof()) return false;

  std::string field;
  bool in_quotes = false;
  bool record_has_data = false;

  while (true) {
    if (ch == std::streambuf::traits_type::eof()) {
      fields.push_back(std::move(field));
      break;
    }
    const char c = static_cast<char>(ch);
    if (in_quotes) {
      if (c == '"') {
        const int peek = buf->sgetc();
        if (peek == '"') {
          buf->sbumpc();
          field.push_back('"');
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty()) {
      in_quotes = true;
      record_has_data = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      record_has_data = true;
    } else if (c == '\n' || c == '\r') {
      if (c == '\r' && buf->sgetc() == '\n') buf->sbumpc();
      // A bare newline with nothing before it is a blank line, not a record.
      if (!record_has_data && field.empty()) {
        ch = buf->sbumpc();
        if (ch == std::streambuf::traits_type::eof()) return false;
        continue;
      }
      fields.push_back(std::move(field));
      break;
    } else {
      field.push_back(c);
      record_has_data = true;
    }
    ch = buf->sbumpc();
  }

  ++records_;
  return true;
}

std::string escape_field(const std::string& field) {
  const bool needs_quotes =
      field.find_first_of(",\"\r\n") != std::string::npos;
  if (!needs_quotes) return field;
  std::string out;
  out.reserve(field.size() + 2);
  out.push_back('"');
  for (const char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void Writer::write_record(const std::vector<std::string>& fields) {
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out_->put(',');
    *out_ << escape_field(fields[i]);
  }
  out_->put('\n');
}

}  // namespace micromob::csv
