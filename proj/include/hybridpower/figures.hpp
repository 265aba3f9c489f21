#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hybridpower::figures {

/// One CSV file: name (e.g. "fig4_curves.csv") and full content.
struct CsvFile {
  std::string name;
  std::string content;
};

/// "fig2" ... "fig7".
const std::vector<std::string>& ids();

/// Data behind one figure. Throws Error(InvalidArgument) for an unknown id.
/// Output is a pure function of the id.
std::vector<CsvFile> generate(std::string_view id);

/// Fixed 10-significant-digit formatting used in every CSV.
std::string format_number(double x);

}  // namespace hybridpower::figures
