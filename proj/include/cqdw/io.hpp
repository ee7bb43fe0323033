#pragma once

#include "cqdw/grid.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace cqdw::io {

/// Raised on unreadable or malformed input files.
class IoError : public std::runtime_error {
 public:
  IoError(const std::string& what, std::filesystem::path path)
      : std::runtime_error(what), path_(std::move(path)) {}
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

/// Columns x, re, im; 17 significant digits so values round-trip exactly.
void write_csv(const GridFunction& f, const std::filesystem::path& path);
std::string to_csv(const GridFunction& f);

/// Envelope {n_points, spacing, x_min, re: [...], im: [...]}.
nlohmann::json to_json(const GridFunction& f);
GridFunction grid_function_from_json(const nlohmann::json& j);

/// Simple table writer: header row followed by numeric/text rows.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);
  CsvTable& row(const std::vector<std::string>& cells);
  std::string str() const;
  void write(const std::filesystem::path& path) const;
  std::size_t rows() const { return rows_.size(); }

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Shortest exact decimal rendering of a double.
std::string fmt(double v);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace cqdw::io
