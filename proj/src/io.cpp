#include "cqdw/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace cqdw::io {

std::string fmt(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

std::string to_csv(const GridFunction& f) {
  std::string out = "x,re,im\n";
  for (int i = 0; i < f.grid.n_points; ++i) {
    out += fmt(f.grid.points[i]);
    out += ',';
    out += fmt(f.values[i].real());
    out += ',';
    out += fmt(f.values[i].imag());
    out += '\n';
  }
  return out;
}

void write_csv(const GridFunction& f, const std::filesystem::path& path) {
  write_text(path, to_csv(f));
}

nlohmann::json to_json(const GridFunction& f) {
  nlohmann::json j;
  j["n_points"] = f.grid.n_points;
  j["spacing"] = f.grid.spacing;
  j["x_min"] = f.grid.x_min;
  std::vector<double> re(f.grid.n_points), im(f.grid.n_points);
  for (int i = 0; i < f.grid.n_points; ++i) {
    re[i] = f.values[i].real();
    im[i] = f.values[i].imag();
  }
  j["re"] = re;
  j["im"] = im;
  return j;
}

GridFunction grid_function_from_json(const nlohmann::json& j) {
  const int n = j.at("n_points").get<int>();
  const double spacing = j.at("spacing").get<double>();
  const double x_min = j.at("x_min").get<double>();
  Grid grid = build_grid(-x_min, spacing);
  if (grid.n_points != n) throw InvalidArgument("grid function envelope: inconsistent n_points");
  const auto re = j.at("re").get<std::vector<double>>();
  const auto im = j.contains("im") ? j.at("im").get<std::vector<double>>()
                                   : std::vector<double>(re.size(), 0.0);
  if (static_cast<int>(re.size()) != n || static_cast<int>(im.size()) != n) {
    throw InvalidArgument("grid function envelope: value count does not match n_points");
  }
  ComplexVector v(n);
  for (int i = 0; i < n; ++i) v[i] = {re[i], im[i]};
  return GridFunction(std::move(grid), std::move(v));
}

CsvTable::CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

CsvTable& CsvTable::row(const std::vector<std::string>& cells) {
  if (cells.size() != header_.size()) throw InvalidArgument("CsvTable: row width mismatch");
  rows_.push_back(cells);
  return *this;
}

std::string CsvTable::str() const {
  std::ostringstream os;
  auto emit = [&os](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) os << ',';
      os << cells[i];
    }
    os << '\n';
  };
  emit(header_);
  for (const auto& r : rows_) emit(r);
  return os.str();
}

void CsvTable::write(const std::filesystem::path& path) const { write_text(path, str()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open file for writing", path);
  os << text;
  if (!os) throw IoError("write failed", path);
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open file for reading", path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace cqdw::io
