#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace qscope::csv {

/// Quotes a field only when it contains a comma, quote, CR or LF (RFC 4180).
std::string escape(std::string_view field);

void write_row(std::ostream& out, const std::vector<std::string>& fields);

/// Reads one logical record, honouring quoted fields that span lines.
/// Returns false at end of input. Throws ParseError on an unterminated quote.
bool read_row(std::istream& in, std::vector<std::string>& fields);

}  // namespace qscope::csv
