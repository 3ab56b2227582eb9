#pragma once

// Minimal RFC-4180 reader/writer used for annotations and reports.

#include <iosfwd>
#include <string>
#include <vector>

namespace mindful::csv {

using Row = std::vector<std::string>;

std::string escape(const std::string& field);
std::string format_row(const Row& row);
void write_row(std::ostream& out, const Row& row);

// Parses the full document. Quoted fields may contain commas, quotes ("")
// and line breaks. Accepts LF and CRLF line endings.
std::vector<Row> parse(const std::string& text);
std::vector<Row> read_file(const std::string& path);

// Shortest round-trip decimal representation.
std::string number(double value);

}  // namespace mindful::csv
