#pragma once

#include <fstream>
#include <initializer_list>
#include <string>

namespace hopf {

/// Comma-separated output; doubles are printed with 17 significant digits so
/// files round-trip exactly.
class CsvWriter {
 public:
  CsvWriter(const std::string& filename, std::initializer_list<const char*> header);
  explicit CsvWriter(const std::string& filename);

  void header(const std::string& line) { out_ << line << '\n'; }

  CsvWriter& operator<<(double value);
  void end_row();

 private:
  std::ofstream out_;
  bool first_ = true;
};

}  // namespace hopf
