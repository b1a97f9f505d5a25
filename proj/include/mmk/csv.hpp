#pragma once

#include <string>
#include <vector>

namespace mmk {

// Double formatted with 17 significant digits so parsing the text back
// recovers the exact value.
std::string csv_double(double v);

// RFC-4180-style escaping: fields containing commas, quotes or newlines
// are quoted, embedded quotes doubled.
std::string csv_escape(const std::string& field);

// Write header + rows. I/O failures raise std::runtime_error naming the
// path.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);

}  // namespace mmk
