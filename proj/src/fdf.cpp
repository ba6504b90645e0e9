#include "ftcy/fdf.hpp"

#include <fstream>
#include <sstream>

#include "ftcy/errors.hpp"

namespace ftcy {

namespace {

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(std::stoi(tok));
  }
  return out;
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

void write_header(std::ostream& os, const std::string& kind, const TorusGeometry& g) {
  os << "FDF1\n";
  os << "kind = " << kind << "\n";
  os << "n = " << g.n << "\n";
  os << "active_axes = " << join(g.active_axes) << "\n";
  os << "grid_shape = " << join(g.grid_shape) << "\n";
  os << "end_header\n";
}

void write_plane(std::ostream& os, const Eigen::ArrayXcd& v) {
  for (std::int64_t i = 0; i < v.size(); ++i) {
    double re = v[i].real(), im = v[i].imag();
    os.write(reinterpret_cast<const char*>(&re), sizeof(double));
    os.write(reinterpret_cast<const char*>(&im), sizeof(double));
  }
}

Eigen::ArrayXcd read_plane(std::istream& is, std::int64_t count) {
  Eigen::ArrayXcd v(count);
  for (std::int64_t i = 0; i < count; ++i) {
    double re = 0, im = 0;
    is.read(reinterpret_cast<char*>(&re), sizeof(double));
    is.read(reinterpret_cast<char*>(&im), sizeof(double));
    v[i] = Complex(re, im);
  }
  if (!is) throw io_error("FDF payload truncated");
  return v;
}

FdfHeader parse_header(std::istream& is, const std::string& path) {
  std::string line;
  if (!std::getline(is, line) || line != "FDF1")
    throw io_error(path + ": missing FDF1 magic");
  FdfHeader h;
  while (std::getline(is, line)) {
    if (line == "end_header") return h;
    auto eq = line.find('=');
    if (eq == std::string::npos) throw io_error(path + ": malformed header line: " + line);
    auto trim = [](std::string s) {
      s.erase(0, s.find_first_not_of(" \t"));
      s.erase(s.find_last_not_of(" \t") + 1);
      return s;
    };
    std::string key = trim(line.substr(0, eq)), val = trim(line.substr(eq + 1));
    if (key == "kind")
      h.kind = val;
    else if (key == "n")
      h.n = std::stoi(val);
    else if (key == "active_axes")
      h.active_axes = parse_int_list(val);
    else if (key == "grid_shape")
      h.grid_shape = parse_int_list(val);
    else
      throw io_error(path + ": unknown header key: " + key);
  }
  throw io_error(path + ": header not terminated");
}

}  // namespace

FdfHeader read_fdf_header(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open " + path);
  return parse_header(is, path);
}

void write_fdf(const std::string& path, const ScalarField& f) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot write " + path);
  write_header(os, "scalar", f.geom);
  write_plane(os, f.values);
  if (!os) throw io_error("write failed: " + path);
}

void write_fdf(const std::string& path, const HermitianField& f, const std::string& kind) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error("cannot write " + path);
  write_header(os, kind, f.geom);
  for (const auto& p : f.planes) write_plane(os, p);
  if (!os) throw io_error("write failed: " + path);
}

ScalarField read_fdf_scalar(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open " + path);
  FdfHeader h = parse_header(is, path);
  if (h.kind != "scalar") throw io_error(path + ": expected scalar field, got " + h.kind);
  TorusGeometry g = TorusGeometry::make(h.n, h.active_axes, h.grid_shape);
  return {g, read_plane(is, g.total_points())};
}

HermitianField read_fdf_matrix(const std::string& path, FdfHeader* header) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error("cannot open " + path);
  FdfHeader h = parse_header(is, path);
  if (h.kind != "hermitian" && h.kind != "psi" && h.kind != "metric")
    throw io_error(path + ": expected matrix field, got " + h.kind);
  TorusGeometry g = TorusGeometry::make(h.n, h.active_axes, h.grid_shape);
  HermitianField f(g, h.n);
  for (auto& p : f.planes) p = read_plane(is, g.total_points());
  if (header) *header = h;
  return f;
}

}  // namespace ftcy
