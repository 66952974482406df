#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace micromob::csv {

/// RFC 4180 record reader: comma-delimited, double-quote escaping, quoted
/// fields may contain commas, quotes, and line breaks. Accepts LF and CRLF
/// row endings.
class Reader {
 public:
  explicit Reader(std::istream& in) : in_(&in) {}

  /// Reads the next record into `fields`. Returns false at end of input.
  bool next(std::vector<std::string>& fields);

  size_t records_read() const { return records_; }

 private:
  std::istream* in_;
  size_t records_ = 0;
};

/// Writer that quotes only when a field requires it.
class Writer {
 public:
  explicit Writer(std::ostream& out) : out_(&out) {}

  void write_record(const std::vector<std::string>& fields);

 private:
  std::ostream* out_;
};

/// Quotes and escapes a single field if it contains a delimiter, quote, or
/// line break; returns it unchanged otherwise.
std::string escape_field(const std::string& field);

}  // namespace micromob::csv
