#include "output.hpp"

#include <fmt/format.h>

#include <fstream>
#include <stdexcept>
#include <vector>

#include <unistd.h>

namespace ulab::cli {

namespace fs = std::filesystem;

void OutputSet::commit(const fs::path& dir) const {
  fs::create_directories(dir);
  std::vector<std::pair<fs::path, fs::path>> staged;
  const std::string suffix = ".tmp." + std::to_string(::getpid());
  try {
    for (const auto& [name, content] : files_) {
      const fs::path target = dir / name;
      const fs::path tmp = dir / (name + suffix);
      staged.emplace_back(tmp, target);
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write " + tmp.string());
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      out.close();
      if (!out) throw std::runtime_error("short write to " + tmp.string());
    }
  } catch (...) {
    std::error_code ec;
    for (const auto& [tmp, target] : staged) fs::remove(tmp, ec);
    throw;
  }
  for (const auto& [tmp, target] : staged) fs::rename(tmp, target);
}

std::string format_double(double x) { return fmt::format("{}", x); }

}  // namespace ulab::cli
