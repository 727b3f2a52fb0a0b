#include "bmlab/harness/output.hpp"

#include <fmt/format.h>

#include <cstdio>
#include <filesystem>
#include <stdexcept>

namespace bmlab::harness {

namespace fs = std::filesystem;

std::string format_double(double v) { return fmt::format("{}", v); }

uint64_t fnv1a64(const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xCBF29CE484222325ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001B3ull;
  }
  return h;
}

uint64_t fnv1a64_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for digest: " + path);
  uint64_t h = 0xCBF29CE484222325ull;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof(buf));
    const std::streamsize got = in.gcount();
    for (std::streamsize i = 0; i < got; ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001B3ull;
    }
  }
  return h;
}

std::string hex64(uint64_t v) { return fmt::format("{:016x}", v); }

CsvWriter::CsvWriter(std::string dir, std::string name,
                     const std::vector<std::string>& comment_lines,
                     const std::vector<std::string>& columns)
    : dir_(std::move(dir)), name_(std::move(name)) {
  fs::create_directories(dir_);
  out_.open(fs::path(dir_) / (name_ + ".tmp"), std::ios::binary | std::ios::trunc);
  if (!out_) throw std::runtime_error("cannot open output file " + name_);
  for (const auto& c : comment_lines) out_ << "# " << c << "\n";
  for (std::size_t i = 0; i < columns.size(); ++i)
    out_ << columns[i] << (i + 1 < columns.size() ? "," : "");
  out_ << "\n";
}

CsvWriter::~CsvWriter() {
  if (!closed_) {
    out_.close();
    std::error_code ec;
    fs::remove(fs::path(dir_) / (name_ + ".tmp"), ec);
  }
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < cells.size(); ++i)
    out_ << cells[i] << (i + 1 < cells.size() ? "," : "");
  out_ << "\n";
}

std::string CsvWriter::close() {
  out_.flush();
  out_.close();
  fs::rename(fs::path(dir_) / (name_ + ".tmp"), fs::path(dir_) / name_);
  closed_ = true;
  return name_;
}

OutputFileInfo describe_file(const std::string& dir, const std::string& name) {
  const auto path = (fs::path(dir) / name).string();
  OutputFileInfo info;
  info.name = name;
  info.digest = fnv1a64_file(path);
  info.bytes = static_cast<uint64_t>(fs::file_size(path));
  return info;
}

void write_file_atomic(const std::string& dir, const std::string& name,
                       const std::string& content) {
  fs::create_directories(dir);
  const auto tmp = fs::path(dir) / (name + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
  }
  fs::rename(tmp, fs::path(dir) / name);
}

OutputFileInfo write_plotdata(const std::string& dir, const std::string& name,
                              const std::vector<std::string>& comment_lines,
                              const std::vector<std::string>& columns,
                              const std::vector<std::vector<double>>& rows) {
  std::string content;
  for (const auto& c : comment_lines) content += "# " + c + "\n";
  content += "# columns:";
  for (const auto& c : columns) content += " " + c;
  content += "\n";
  for (const auto& r : rows) {
    for (std::size_t i = 0; i < r.size(); ++i)
      content += format_double(r[i]) + (i + 1 < r.size() ? " " : "");
    content += "\n";
  }
  write_file_atomic(dir, name, content);
  return describe_file(dir, name);
}

}  // namespace bmlab::harness
