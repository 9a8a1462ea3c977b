#include "entbound/io.hpp"

#include <algorithm>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <unistd.h>

#include "entbound/error.hpp"

namespace entbound {

namespace {

namespace fs = std::filesystem;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, sep)) out.push_back(trim(cell));
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

std::string where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

double parse_number(const std::string& cell, const std::string& source, std::size_t line) {
  if (cell.empty()) throw Error(ErrorCode::format, where(source, line) + ": empty numeric cell");
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(cell.c_str(), &end);
  if (end != cell.c_str() + cell.size() || errno == ERANGE) {
    throw Error(ErrorCode::format, where(source, line) + ": not a number: '" + cell + "'");
  }
  return v;
}

std::optional<double> parse_optional(const std::string& cell, const std::string& source,
                                     std::size_t line) {
  if (cell.empty()) return std::nullopt;
  return parse_number(cell, source, line);
}

long parse_index(const std::string& cell, const std::string& source, std::size_t line) {
  char* end = nullptr;
  const long v = std::strtol(cell.c_str(), &end, 10);
  if (cell.empty() || end != cell.c_str() + cell.size() || v < 0) {
    throw Error(ErrorCode::format, where(source, line) + ": not a site index: '" + cell + "'");
  }
  return v;
}

/// Reads comment lines and the column header. Returns the header cells;
/// comment text (after "# ") goes to `comments`.
struct CsvReader {
  std::istream& in;
  std::string source;
  std::size_t line_no = 0;

  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (trim(line).empty()) continue;
      return true;
    }
    return false;
  }
};

std::string comment_text(const std::string& line) {
  std::string_view v(line);
  v.remove_prefix(1);
  if (!v.empty() && v.front() == ' ') v.remove_prefix(1);
  return std::string(v);
}

std::vector<std::string> read_header(CsvReader& reader, std::vector<std::string>& comments) {
  std::string line;
  while (reader.next(line)) {
    if (line.front() == '#') {
      comments.push_back(comment_text(line));
      continue;
    }
    return split(line);
  }
  throw Error(ErrorCode::format, reader.source + ": missing column header");
}

void drop_version(std::vector<std::string>& comments) {
  if (!comments.empty() && comments.front() == kFormatVersion) comments.erase(comments.begin());
}

void write_header(std::ostringstream& out, const std::vector<std::string>& comments) {
  out << "# " << kFormatVersion << "\n";
  for (const auto& c : comments) out << "# " << c << "\n";
}

std::uint32_t read_u32_le(std::string_view bytes, std::size_t offset) {
  std::uint32_t v = 0;
  for (int b = 3; b >= 0; --b) v = (v << 8) | static_cast<unsigned char>(bytes[offset + b]);
  return v;
}

void write_u32_le(std::string& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
}

void write_f64_le(std::string& out, double d) {
  const auto bits = std::bit_cast<std::uint64_t>(d);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<char>((bits >> (8 * b)) & 0xff));
}

double read_f64_le(std::string_view bytes, std::size_t offset) {
  std::uint64_t bits = 0;
  for (int b = 7; b >= 0; --b) bits = (bits << 8) | static_cast<unsigned char>(bytes[offset + b]);
  return std::bit_cast<double>(bits);
}

std::vector<double> detector_axis(std::pair<double, double> range, std::size_t n) {
  return linspace(range.first, range.second, static_cast<int>(n));
}

void check_against_detector(const TofImage& image, const TofCalibration& calib) {
  if (!calib.detector) return;
  const auto& d = *calib.detector;
  if (d.k_space != image.k_space || detector_axis(d.x_range, image.nx) != image.xs ||
      detector_axis(d.y_range, image.ny) != image.ys) {
    throw Error(ErrorCode::grid_mismatch,
                "image coordinates do not match the calibration detector grid");
  }
}

constexpr std::string_view kMeanKey = "mean_atom_number=";

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::io, "read failed for '" + path.string() + "'");
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view content) {
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io, "cannot write '" + tmp.string() + "'");
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw Error(ErrorCode::io, "write failed for '" + path.string() + "'");
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(ErrorCode::io, "cannot move output into '" + path.string() + "'");
  }
}

nlohmann::json load_json(const fs::path& path) {
  const auto text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::format, path.string() + ": " + e.what());
  }
}

LatticeSpec load_lattice_spec(const fs::path& path) {
  return lattice_spec_from_json(load_json(path));
}

TofCalibration load_calibration(const fs::path& path) {
  return calibration_from_json(load_json(path));
}

// structure factor -----------------------------------------------------------

SqDataset parse_sq_csv(std::istream& in, const std::string& source) {
  CsvReader reader{in, source};
  SqDataset data;
  const auto header = read_header(reader, data.comments);
  drop_version(data.comments);

  const auto s_col = std::find(header.begin(), header.end(), "S");
  if (s_col == header.end()) {
    throw Error(ErrorCode::format,
                where(source, reader.line_no) + ": header must be qx[,qy[,qz]],S[,sigma]");
  }
  const int dim = static_cast<int>(s_col - header.begin());
  static const std::vector<std::string> axes{"qx", "qy", "qz"};
  bool ok = dim >= 1 && dim <= 3;
  for (int k = 0; ok && k < dim; ++k) ok = header[k] == axes[k];
  const bool has_sigma = header.size() == static_cast<std::size_t>(dim) + 2;
  ok = ok && (header.size() == static_cast<std::size_t>(dim) + 1 ||
              (has_sigma && header.back() == "sigma"));
  if (!ok) {
    throw Error(ErrorCode::format,
                where(source, reader.line_no) + ": header must be qx[,qy[,qz]],S[,sigma]");
  }
  data.dimension = dim;

  std::string line;
  while (reader.next(line)) {
    if (line.front() == '#') continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::format, where(source, reader.line_no) + ": expected " +
                                         std::to_string(header.size()) + " cells");
    }
    Vec3 q{0.0, 0.0, 0.0};
    for (int k = 0; k < dim; ++k) q[k] = parse_number(cells[k], source, reader.line_no);
    const double s = parse_number(cells[dim], source, reader.line_no);
    if (!std::isfinite(s) || !std::isfinite(q[0]) || !std::isfinite(q[1]) || !std::isfinite(q[2])) {
      throw Error(ErrorCode::validation, where(source, reader.line_no) + ": non-finite value");
    }
    data.q.push_back(q);
    data.s.push_back(s);
    if (has_sigma) data.sigma.push_back(parse_number(cells[dim + 1], source, reader.line_no));
    data.lines.push_back(reader.line_no);
  }

  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return data.q[a] < data.q[b] || (data.q[a] == data.q[b] && a < b);
  });
  for (std::size_t k = 1; k < order.size(); ++k) {
    const auto& a = data.q[order[k - 1]];
    const auto& b = data.q[order[k]];
    if (std::abs(a[0] - b[0]) <= 1e-12 && std::abs(a[1] - b[1]) <= 1e-12 &&
        std::abs(a[2] - b[2]) <= 1e-12) {
      const auto l1 = std::min(data.lines[order[k - 1]], data.lines[order[k]]);
      const auto l2 = std::max(data.lines[order[k - 1]], data.lines[order[k]]);
      throw Error(ErrorCode::validation, source + ": duplicate q on lines " + std::to_string(l1) +
                                             " and " + std::to_string(l2));
    }
  }
  return data;
}

SqDataset load_sq_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  return parse_sq_csv(in, path.string());
}

std::string format_sq_csv(const SqDataset& data) {
  std::ostringstream out;
  write_header(out, data.comments);
  static const char* axes[] = {"qx", "qy", "qz"};
  for (int k = 0; k < data.dimension; ++k) out << axes[k] << ",";
  out << "S" << (data.sigma.empty() ? "" : ",sigma") << "\n";
  for (std::size_t r = 0; r < data.size(); ++r) {
    for (int k = 0; k < data.dimension; ++k) out << format_double(data.q[r][k]) << ",";
    out << format_double(data.s[r]);
    if (!data.sigma.empty()) out << "," << format_double(data.sigma[r]);
    out << "\n";
  }
  return out.str();
}

SqDataset to_dataset(const StructureFactorGrid& grid, std::vector<std::string> comments) {
  SqDataset data;
  data.dimension = grid.dimension;
  data.q = grid.q;
  data.s = grid.s;
  data.comments = std::move(comments);
  return data;
}

// time-of-flight images ------------------------------------------------------

TofImage parse_tof_csv(std::istream& in, const TofCalibration& calib, const std::string& source) {
  CsvReader reader{in, source};
  TofImage image;
  std::vector<std::string> comments;
  const auto header = read_header(reader, comments);
  drop_version(comments);
  for (auto& c : comments) {
    if (c.rfind(kMeanKey, 0) == 0) {
      image.mean_atom_number = parse_number(trim(c.substr(kMeanKey.size())), source, 0);
    } else {
      image.comments.push_back(c);
    }
  }
  if (header == std::vector<std::string>{"kx", "ky", "n"}) {
    image.k_space = true;
  } else if (header != std::vector<std::string>{"x", "y", "n"}) {
    throw Error(ErrorCode::format, where(source, reader.line_no) + ": header must be x,y,n or kx,ky,n");
  }

  struct Row {
    double x, y, n;
  };
  std::vector<Row> rows;
  std::string line;
  while (reader.next(line)) {
    if (line.front() == '#') continue;
    const auto cells = split(line);
    if (cells.size() != 3) {
      throw Error(ErrorCode::format, where(source, reader.line_no) + ": expected 3 cells");
    }
    rows.push_back({parse_number(cells[0], source, reader.line_no),
                    parse_number(cells[1], source, reader.line_no),
                    parse_number(cells[2], source, reader.line_no)});
    if (!std::isfinite(rows.back().n)) {
      throw Error(ErrorCode::validation, where(source, reader.line_no) + ": non-finite density");
    }
  }

  std::vector<double> xs, ys;
  for (const auto& r : rows) {
    xs.push_back(r.x);
    ys.push_back(r.y);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  if (rows.empty() || xs.size() * ys.size() != rows.size()) {
    throw Error(ErrorCode::grid_mismatch, source + ": pixels do not form a rectangular grid");
  }
  image.nx = xs.size();
  image.ny = ys.size();
  image.values.assign(rows.size(), std::nan(""));
  std::vector<bool> seen(rows.size(), false);
  for (const auto& r : rows) {
    const auto ix = static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(), r.x) - xs.begin());
    const auto iy = static_cast<std::size_t>(std::lower_bound(ys.begin(), ys.end(), r.y) - ys.begin());
    const auto k = iy * image.nx + ix;
    if (seen[k]) throw Error(ErrorCode::grid_mismatch, source + ": duplicate pixel");
    seen[k] = true;
    image.values[k] = r.n;
  }
  image.xs = std::move(xs);
  image.ys = std::move(ys);
  check_against_detector(image, calib);
  return image;
}

TofImage decode_tof_binary(std::string_view bytes, const TofCalibration& calib) {
  if (bytes.size() < 4 || bytes.substr(0, 4) != "ENTB") {
    throw Error(ErrorCode::bad_magic, "binary image does not start with 'ENTB'");
  }
  if (bytes.size() < 12) throw Error(ErrorCode::truncated, "binary image header is truncated");
  const std::size_t nx = read_u32_le(bytes, 4);
  const std::size_t ny = read_u32_le(bytes, 8);
  const std::size_t expected = 12 + 8 * nx * ny;
  if (bytes.size() < expected) {
    throw Error(ErrorCode::truncated, "binary image payload is truncated (" +
                                          std::to_string(bytes.size()) + " of " +
                                          std::to_string(expected) + " bytes)");
  }
  if (bytes.size() > expected || nx == 0 || ny == 0) {
    throw Error(ErrorCode::grid_mismatch, "binary image size does not match its nx*ny header");
  }
  if (!calib.detector) {
    throw Error(ErrorCode::grid_mismatch,
                "binary images need detector ranges (\"detector\") in the calibration");
  }
  TofImage image;
  image.nx = nx;
  image.ny = ny;
  image.k_space = calib.detector->k_space;
  image.xs = detector_axis(calib.detector->x_range, nx);
  image.ys = detector_axis(calib.detector->y_range, ny);
  image.values.resize(nx * ny);
  for (std::size_t k = 0; k < nx * ny; ++k) {
    image.values[k] = read_f64_le(bytes, 12 + 8 * k);
    if (!std::isfinite(image.values[k])) {
      throw Error(ErrorCode::validation, "binary image holds a non-finite value");
    }
  }
  return image;
}

TofImage load_tof(const fs::path& path, const TofCalibration& calib, TofFormat format) {
  const auto bytes = read_file(path);
  if (format == TofFormat::automatic) {
    const auto ext = path.extension().string();
    format = (ext == ".bin" || ext == ".entb" || bytes.rfind("ENTB", 0) == 0) ? TofFormat::binary
                                                                              : TofFormat::csv;
  }
  if (format == TofFormat::binary) return decode_tof_binary(bytes, calib);
  std::istringstream in(bytes);
  return parse_tof_csv(in, calib, path.string());
}

std::string format_tof_csv(const TofImage& image) {
  std::ostringstream out;
  out << "# " << kFormatVersion << "\n";
  if (image.mean_atom_number) out << "# " << kMeanKey << format_double(*image.mean_atom_number) << "\n";
  for (const auto& c : image.comments) out << "# " << c << "\n";
  out << (image.k_space ? "kx,ky,n\n" : "x,y,n\n");
  for (std::size_t iy = 0; iy < image.ny; ++iy)
    for (std::size_t ix = 0; ix < image.nx; ++ix)
      out << format_double(image.xs[ix]) << "," << format_double(image.ys[iy]) << ","
          << format_double(image.at(ix, iy)) << "\n";
  return out.str();
}

std::string encode_tof_binary(const TofImage& image) {
  std::string out = "ENTB";
  write_u32_le(out, static_cast<std::uint32_t>(image.nx));
  write_u32_le(out, static_cast<std::uint32_t>(image.ny));
  for (double v : image.values) write_f64_le(out, v);
  return out;
}

void save_tof(const TofImage& image, const fs::path& path, TofFormat format) {
  if (format == TofFormat::automatic) {
    const auto ext = path.extension().string();
    format = (ext == ".bin" || ext == ".entb") ? TofFormat::binary : TofFormat::csv;
  }
  write_file_atomic(path, format == TofFormat::binary ? encode_tof_binary(image)
                                                      : format_tof_csv(image));
}

std::string tof_integral_warning(const TofImage& image, const TofCalibration& calib,
                                 double mean_number) {
  if (image.nx < 2 || image.ny < 2 || !(mean_number > 0.0)) return {};
  const double scale = image.k_space ? 1.0 / (calib.kappa() * calib.kappa()) : 1.0;
  // trapezoidal rule on a possibly non-uniform rectangular grid
  auto weights = [](const std::vector<double>& axis) {
    std::vector<double> w(axis.size(), 0.0);
    for (std::size_t k = 0; k + 1 < axis.size(); ++k) {
      const double h = 0.5 * (axis[k + 1] - axis[k]);
      w[k] += h;
      w[k + 1] += h;
    }
    return w;
  };
  const auto wx = weights(image.xs);
  const auto wy = weights(image.ys);
  double total = 0.0;
  for (std::size_t iy = 0; iy < image.ny; ++iy)
    for (std::size_t ix = 0; ix < image.nx; ++ix) total += wx[ix] * wy[iy] * image.at(ix, iy);
  total *= scale;
  const double predicted = mean_number * envelope_integral();
  const double deviation = std::abs(total - predicted) / predicted;
  if (deviation <= 0.2) return {};
  return "integrated image " + format_double(total) + " deviates by " +
         std::to_string(static_cast<int>(std::round(100 * deviation))) +
         "% from the kernel-predicted " + format_double(predicted) + "; check the calibration";
}

// bound maps -----------------------------------------------------------------

std::string format_bound_map(const BoundMap& map) {
  std::ostringstream out;
  write_header(out, map.comments);
  if (map.kind == BoundKind::spin) {
    out << "qx,qy" << (map.coord_dim == 3 ? ",qz" : "") << ",S,raw,E,mask\n";
  } else {
    out << "x,y,n,f,raw,E,mask\n";
  }
  for (const auto& p : map.points) {
    for (double c : p.coords) out << format_double(c) << ",";
    out << format_double(p.observable) << ",";
    if (map.kind == BoundKind::boson) out << format_double(p.f) << ",";
    out << (p.raw ? format_double(*p.raw) : "") << "," << (p.value ? format_double(*p.value) : "")
        << "," << to_string(p.mask) << "\n";
  }
  return out.str();
}

BoundMap parse_bound_map(std::istream& in, const std::string& source) {
  CsvReader reader{in, source};
  BoundMap map;
  std::string first;
  if (!reader.next(first) || first != "# " + std::string(kFormatVersion)) {
    throw Error(ErrorCode::format, source + ": missing '# " + std::string(kFormatVersion) + "' header");
  }
  const auto header = read_header(reader, map.comments);
  using Cols = std::vector<std::string>;
  if (header == Cols{"qx", "qy", "S", "raw", "E", "mask"}) {
    map.kind = BoundKind::spin;
    map.coord_dim = 2;
  } else if (header == Cols{"qx", "qy", "qz", "S", "raw", "E", "mask"}) {
    map.kind = BoundKind::spin;
    map.coord_dim = 3;
  } else if (header == Cols{"x", "y", "n", "f", "raw", "E", "mask"}) {
    map.kind = BoundKind::boson;
    map.coord_dim = 2;
  } else {
    throw Error(ErrorCode::format, where(source, reader.line_no) + ": unrecognised bound-map columns");
  }
  const std::size_t cd = static_cast<std::size_t>(map.coord_dim);

  std::string line;
  while (reader.next(line)) {
    if (line.front() == '#') continue;
    const auto cells = split(line);
    if (cells.size() != header.size()) {
      throw Error(ErrorCode::format, where(source, reader.line_no) + ": expected " +
                                         std::to_string(header.size()) + " cells");
    }
    BoundPoint p;
    for (std::size_t k = 0; k < cd; ++k) p.coords.push_back(parse_number(cells[k], source, reader.line_no));
    std::size_t c = cd;
    p.observable = parse_number(cells[c++], source, reader.line_no);
    p.f = map.kind == BoundKind::boson ? parse_number(cells[c++], source, reader.line_no) : std::nan("");
    p.raw = parse_optional(cells[c++], source, reader.line_no);
    p.value = parse_optional(cells[c++], source, reader.line_no);
    const auto mask = mask_reason_from_string(cells[c]);
    if (!mask) {
      throw Error(ErrorCode::format, where(source, reader.line_no) + ": unknown mask code '" + cells[c] + "'");
    }
    p.mask = *mask;
    if ((p.mask == MaskReason::ok) != p.value.has_value()) {
      throw Error(ErrorCode::validation,
                  where(source, reader.line_no) + ": E must be present exactly for unmasked points");
    }
    map.points.push_back(std::move(p));
  }
  return map;
}

void save_bound_map(const BoundMap& map, const fs::path& path) {
  write_file_atomic(path, format_bound_map(map));
}

BoundMap load_bound_map(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open '" + path.string() + "'");
  return parse_bound_map(in, path.string());
}

// correlators and one-body density matrices ------------------------------------

std::string format_correlators_csv(const CorrelatorSet& corr, const std::vector<std::string>& comments) {
  std::ostringstream out;
  write_header(out, comments);
  out << "alpha,i,j,value\n";
  const auto m = static_cast<Eigen::Index>(corr.sites());
  for (Axis a : kAxes)
    for (Eigen::Index i = 0; i < m; ++i)
      for (Eigen::Index j = i; j < m; ++j)
        out << axis_name(a) << "," << i << "," << j << ","
            << format_double(corr.pair[static_cast<int>(a)](i, j)) << "\n";
  return out.str();
}

CorrelatorSet parse_correlators_csv(std::istream& in, const std::string& source) {
  CsvReader reader{in, source};
  std::vector<std::string> comments;
  const auto header = read_header(reader, comments);
  if (header != std::vector<std::string>{"alpha", "i", "j", "value"}) {
    throw Error(ErrorCode::format, where(source, reader.line_no) + ": header must be alpha,i,j,value");
  }
  struct Entry {
    int axis;
    long i, j;
    double value;
    std::size_t line;
  };
  std::vector<Entry> entries;
  long max_index = -1;
  std::string line;
  while (reader.next(line)) {
    if (line.front() == '#') continue;
    const auto cells = split(line);
    if (cells.size() != 4) throw Error(ErrorCode::format, where(source, reader.line_no) + ": expected 4 cells");
    if (cells[0].size() != 1 || std::string_view("xyz").find(cells[0][0]) == std::string_view::npos) {
      throw Error(ErrorCode::format, where(source, reader.line_no) + ": alpha must be x, y or z");
    }
    const int axis = static_cast<int>(std::string_view("xyz").find(cells[0][0]));
    const long i = parse_index(cells[1], source, reader.line_no);
    const long j = parse_index(cells[2], source, reader.line_no);
    if (i > j) throw Error(ErrorCode::format, where(source, reader.line_no) + ": rows need i <= j");
    entries.push_back({axis, i, j, parse_number(cells[3], source, reader.line_no), reader.line_no});
    max_index = std::max(max_index, j);
  }
  const Eigen::Index m = max_index + 1;
  CorrelatorSet corr;
  std::array<Eigen::MatrixXi, 3> seen;
  for (int a = 0; a < 3; ++a) {
    corr.pair[a] = Eigen::MatrixXd::Constant(m, m, std::nan(""));
    corr.bloch[a] = Eigen::VectorXd::Zero(m);
    seen[a] = Eigen::MatrixXi::Zero(m, m);
  }
  for (const auto& e : entries) {
    if (seen[e.axis](e.i, e.j)++) {
      throw Error(ErrorCode::validation, where(source, e.line) + ": duplicate correlator row");
    }
    if (e.i == e.j && e.value != 1.0) {
      throw Error(ErrorCode::validation, where(source, e.line) + ": diagonal correlator must be 1");
    }
    corr.pair[e.axis](e.i, e.j) = e.value;
    corr.pair[e.axis](e.j, e.i) = e.value;
  }
  for (int a = 0; a < 3; ++a) {
    if (corr.pair[a].hasNaN()) {
      throw Error(ErrorCode::missing_data, source + ": correlator table is incomplete");
    }
  }
  corr.validate();
  return corr;
}

std::string format_one_body_csv(const OneBodyDM& g, const std::vector<std::string>& comments) {
  std::ostringstream out;
  write_header(out, comments);
  out << "# mean_number=" << format_double(g.mean_number) << "\n";
  out << "i,j,re,im\n";
  for (Eigen::Index i = 0; i < g.g.rows(); ++i)
    for (Eigen::Index j = 0; j < g.g.cols(); ++j)
      out << i << "," << j << "," << format_double(g.g(i, j).real()) << ","
          << format_double(g.g(i, j).imag()) << "\n";
  return out.str();
}

OneBodyDM parse_one_body_csv(std::istream& in, const std::string& source) {
  CsvReader reader{in, source};
  std::vector<std::string> comments;
  const auto header = read_header(reader, comments);
  if (header != std::vector<std::string>{"i", "j", "re", "im"}) {
    throw Error(ErrorCode::format, where(source, reader.line_no) + ": header must be i,j,re,im");
  }
  std::map<std::pair<long, long>, std::complex<double>> cells_by_index;
  long max_index = -1;
  std::string line;
  while (reader.next(line)) {
    if (line.front() == '#') continue;
    const auto cells = split(line);
    if (cells.size() != 4) throw Error(ErrorCode::format, where(source, reader.line_no) + ": expected 4 cells");
    const long i = parse_index(cells[0], source, reader.line_no);
    const long j = parse_index(cells[1], source, reader.line_no);
    cells_by_index[{i, j}] = {parse_number(cells[2], source, reader.line_no),
                              parse_number(cells[3], source, reader.line_no)};
    max_index = std::max({max_index, i, j});
  }
  const Eigen::Index m = max_index + 1;
  if (static_cast<Eigen::Index>(cells_by_index.size()) != m * m) {
    throw Error(ErrorCode::missing_data, source + ": one-body table is incomplete");
  }
  OneBodyDM g{Eigen::MatrixXcd(m, m), 0.0};
  for (const auto& [ij, v] : cells_by_index) g.g(ij.first, ij.second) = v;
  g.mean_number = g.g.trace().real();
  return g;
}

std::string format_report_json(const OracleReport& report) {
  return to_json(report).dump(2) + "\n";
}

}  // namespace entbound
