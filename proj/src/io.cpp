#include "hopf/io.hpp"

#include "hopf/common.hpp"

namespace hopf {

CsvWriter::CsvWriter(const std::string& filename) : out_(filename) {
  if (!out_) throw Error(ErrorKind::configuration, "cannot write " + filename);
  out_.precision(17);
}

CsvWriter::CsvWriter(const std::string& filename, std::initializer_list<const char*> header)
    : CsvWriter(filename) {
  bool first = true;
  for (const char* h : header) {
    out_ << (first ? "" : ",") << h;
    first = false;
  }
  out_ << '\n';
}

CsvWriter& CsvWriter::operator<<(double value) {
  if (!first_) out_ << ',';
  out_ << value;
  first_ = false;
  return *this;
}

void CsvWriter::end_row() {
  out_ << '\n';
  first_ = true;
}

}  // namespace hopf
