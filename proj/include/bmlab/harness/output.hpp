#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

// CSV / plot-data emission with crash-only semantics: rows stream into a .tmp
// file (any prefix of which is valid CSV) and the final name appears by atomic
// rename on close. Doubles are printed in shortest round-trip form so reruns
// are bit-identical.

namespace bmlab::harness {

std::string format_double(double v);

uint64_t fnv1a64(const void* data, std::size_t n);
uint64_t fnv1a64_file(const std::string& path);
std::string hex64(uint64_t v);

class CsvWriter {
 public:
  // comment_lines go first, prefixed with "# "; then the header row.
  CsvWriter(std::string dir, std::string name, const std::vector<std::string>& comment_lines,
            const std::vector<std::string>& columns);
  ~CsvWriter();

  void row(const std::vector<std::string>& cells);
  // final filename (relative to dir)
  std::string close();

 private:
  std::string dir_, name_;
  std::ofstream out_;
  bool closed_ = false;
};

struct OutputFileInfo {
  std::string name;
  uint64_t digest = 0;
  std::uint64_t bytes = 0;
};

OutputFileInfo describe_file(const std::string& dir, const std::string& name);

// atomic small-file write (manifests)
void write_file_atomic(const std::string& dir, const std::string& name,
                       const std::string& content);

// Space-separated plot data with '#' header comments naming the axes and the
// quantity each plot checks.
OutputFileInfo write_plotdata(const std::string& dir, const std::string& name,
                              const std::vector<std::string>& comment_lines,
                              const std::vector<std::string>& columns,
                              const std::vector<std::vector<double>>& rows);

}  // namespace bmlab::harness
