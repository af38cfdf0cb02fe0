#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace ulab::cli {

// Report files buffered in memory and written together by commit(): each file goes
// to a temporary name in the target directory and is renamed into place.
class OutputSet {
 public:
  void add(const std::string& name, std::string content) { files_[name] = std::move(content); }
  const std::map<std::string, std::string>& files() const { return files_; }
  bool empty() const { return files_.empty(); }
  void commit(const std::filesystem::path& dir) const;

 private:
  std::map<std::string, std::string> files_;
};

// Shortest round-trip decimal form, so reruns produce identical bytes.
std::string format_double(double x);

}  // namespace ulab::cli
