#include "siddmd/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace siddmd::io {
namespace {

using json = nlohmann::ordered_json;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

bool parse_double(std::string_view text, double& value) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  if (text.empty()) return false;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  return ec == std::errc() && ptr == text.data() + text.size();
}

bool parse_row(const std::string& line, std::vector<double>& out) {
  out.clear();
  std::string_view rest(line);
  while (true) {
    const auto comma = rest.find(',');
    double v = 0.0;
    if (!parse_double(rest.substr(0, comma), v)) return false;
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return true;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

json matrix_to_json(const Matrix<double>& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix<double> matrix_from_json(const json& j, Index rows, Index cols, const char* field) {
  if (!j.is_array() || static_cast<Index>(j.size()) != rows)
    throw FormatError(std::string("model.json: field '") + field + "' must have " +
                      std::to_string(rows) + " rows");
  Matrix<double> m(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw FormatError(std::string("model.json: field '") + field + "' row " +
                        std::to_string(i) + " must have " + std::to_string(cols) + " entries");
    for (Index k = 0; k < cols; ++k) m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  return m;
}

Vector<double> vector_from_json(const json& j, Index size, const char* field) {
  if (!j.is_array() || static_cast<Index>(j.size()) != size)
    throw FormatError(std::string("model.json: field '") + field + "' must have " +
                      std::to_string(size) + " entries");
  Vector<double> v(size);
  for (Index i = 0; i < size; ++i) v(i) = j[static_cast<std::size_t>(i)].get<double>();
  return v;
}

json vector_to_json(const Vector<double>& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

const json& require(const json& j, const char* key) {
  if (!j.contains(key)) throw FormatError(std::string("model.json: missing field '") + key + "'");
  return j.at(key);
}

// Next header token of a PNM file, skipping comments.
std::string pnm_token(std::istream& in, const fs::path& path) {
  std::string token;
  while (true) {
    const int c = in.get();
    if (c == EOF) throw FormatError(path.string() + ": truncated header");
    if (c == '#') {
      std::string ignored;
      std::getline(in, ignored);
      continue;
    }
    if (std::isspace(c)) {
      if (!token.empty()) return token;
      continue;
    }
    token.push_back(static_cast<char>(c));
  }
}

Index pnm_int(std::istream& in, const fs::path& path, const char* what) {
  const std::string token = pnm_token(in, path);
  Index value = 0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc() || ptr != token.data() + token.size() || value <= 0)
    throw FormatError(path.string() + ": invalid " + what + " '" + token + "'");
  return value;
}

}  // namespace

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

OutputSequence<double> read_csv(const fs::path& path, std::optional<double> dt) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::vector<double> values;
  Index line_no = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (!parse_row(line, values)) {
      if (first) {
        first = false;
        continue;
      }
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": unparseable row");
    }
    first = false;
    if (!rows.empty() && values.size() != rows.front().size())
      throw DimensionMismatch(path.string() + ":" + std::to_string(line_no) + ": expected " +
                              std::to_string(rows.front().size()) + " columns, got " +
                              std::to_string(values.size()));
    rows.push_back(values);
  }
  if (rows.empty()) throw InsufficientData(path.string() + ": no samples");
  const Index m = static_cast<Index>(rows.front().size());
  Matrix<double> samples(m, static_cast<Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k)
    for (Index i = 0; i < m; ++i) samples(i, static_cast<Index>(k)) = rows[k][static_cast<std::size_t>(i)];
  return OutputSequence<double>(std::move(samples), dt);
}

void write_csv(const OutputSequence<double>& seq, const fs::path& path) {
  std::string out;
  for (Index k = 0; k < seq.size(); ++k) {
    for (Index i = 0; i < seq.dim(); ++i) {
      if (i) out.push_back(',');
      out += format_double(seq.samples()(i, k));
    }
    out.push_back('\n');
  }
  write_file_atomic(path, out);
}

GrayImage read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  if (pnm_token(in, path) != "P5") throw FormatError(path.string() + ": not a binary PGM (P5)");
  GrayImage img;
  img.width = pnm_int(in, path, "width");
  img.height = pnm_int(in, path, "height");
  const Index maxval = pnm_int(in, path, "maxval");
  if (maxval > 255) throw FormatError(path.string() + ": only 8-bit PGM is supported");
  img.maxval = static_cast<int>(maxval);
  img.pixels.resize(static_cast<std::size_t>(img.width * img.height));
  in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.pixels.size()))
    throw FormatError(path.string() + ": truncated pixel data");
  return img;
}

void write_pgm(const fs::path& path, const GrayImage& image) {
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) +
                    "\n" + std::to_string(image.maxval) + "\n";
  out.append(image.pixels.begin(), image.pixels.end());
  write_file_atomic(path, out);
}

Ingested read_frames(const fs::path& dir, std::optional<double> dt) {
  if (!fs::is_directory(dir)) throw IoError(dir.string() + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw InsufficientData(dir.string() + ": no .pgm frames");

  const GrayImage first = read_pgm(files.front());
  const Index m = first.width * first.height;
  Matrix<double> samples(m, static_cast<Index>(files.size()));
  for (std::size_t k = 0; k < files.size(); ++k) {
    const GrayImage img = k == 0 ? first : read_pgm(files[k]);
    if (img.width != first.width || img.height != first.height)
      throw DimensionMismatch(files[k].string() + ": frame is " + std::to_string(img.width) + "x" +
                              std::to_string(img.height) + ", expected " +
                              std::to_string(first.width) + "x" + std::to_string(first.height));
    for (Index i = 0; i < m; ++i)
      samples(i, static_cast<Index>(k)) =
          static_cast<double>(img.pixels[static_cast<std::size_t>(i)]) / img.maxval;
  }
  return {OutputSequence<double>(std::move(samples), dt), first.width, first.height};
}

void write_frames(const OutputSequence<double>& seq, Index width, Index height, const fs::path& dir) {
  if (width * height != seq.dim())
    throw DimensionMismatch("write_frames: width*height must equal m");
  fs::create_directories(dir);
  const int digits = static_cast<int>(std::to_string(seq.size()).size());
  for (Index k = 0; k < seq.size(); ++k) {
    GrayImage img;
    img.width = width;
    img.height = height;
    img.pixels.resize(static_cast<std::size_t>(seq.dim()));
    for (Index i = 0; i < seq.dim(); ++i) {
      const double v = std::clamp(seq.samples()(i, k), 0.0, 1.0);
      img.pixels[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(std::lround(v * 255.0));
    }
    std::string name = std::to_string(k);
    name.insert(0, static_cast<std::size_t>(std::max(0, digits - static_cast<int>(name.size()))), '0');
    write_pgm(dir / ("frame_" + name + ".pgm"), img);
  }
}

Ingested ingest(const fs::path& path, InputFormat format, std::optional<double> dt) {
  Ingested out = format == InputFormat::Csv ? Ingested{read_csv(path, dt), {}, {}}
                                            : read_frames(path, dt);
  if (out.sequence.size() < 2)
    throw InsufficientData(path.string() + ": need at least 2 samples, got " +
                           std::to_string(out.sequence.size()));
  return out;
}

void write_ppm(const fs::path& path, Index width, Index height, const std::vector<std::uint8_t>& rgb) {
  if (static_cast<Index>(rgb.size()) != 3 * width * height)
    throw DimensionMismatch("write_ppm: pixel buffer has wrong size");
  std::string out = "P6\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(rgb.begin(), rgb.end());
  write_file_atomic(path, out);
}

std::vector<std::uint8_t> render_signed(const Vector<double>& values, double scale) {
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(3 * values.size()), 0);
  for (Index i = 0; i < values.size(); ++i) {
    const double v = scale > 0.0 ? std::clamp(values(i) / scale, -1.0, 1.0) : 0.0;
    const auto level = static_cast<std::uint8_t>(std::lround(std::abs(v) * 255.0));
    const auto at = static_cast<std::size_t>(3 * i);
    rgb[at] = level;
    if (v > 0.0) rgb[at + 1] = rgb[at + 2] = level;
  }
  return rgb;
}

ModelBundle make_bundle(const IdentifyResult<double>& result, std::optional<Vector<double>> mean) {
  ModelBundle b;
  b.model = result.model;
  b.dt = result.modes.dt;
  b.p = result.map.p;
  b.q = result.map.q;
  b.eigenvalues = result.modes.temporal;
  b.spatial_modes = result.modes.spatial;
  b.residual_frobenius = result.map.residual_frobenius;
  b.relative_residual = result.relative_residual;
  b.mean = std::move(mean);
  return b;
}

std::string model_to_json(const ModelBundle& b) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["m"] = b.model.m;
  j["n"] = b.model.n;
  j["s"] = b.model.s;
  j["dt"] = b.dt;
  j["A"] = matrix_to_json(b.model.a);
  j["C"] = matrix_to_json(b.model.c);
  j["P"] = matrix_to_json(b.p);
  j["Q"] = matrix_to_json(b.q);
  json eigenvalues = json::array();
  for (Index k = 0; k < b.eigenvalues.size(); ++k)
    eigenvalues.push_back({{"re", b.eigenvalues(k).real()}, {"im", b.eigenvalues(k).imag()}});
  j["eigenvalues"] = std::move(eigenvalues);
  json spatial = json::array();
  for (Index k = 0; k < b.spatial_modes.cols(); ++k)
    spatial.push_back({{"re", vector_to_json(b.spatial_modes.col(k).real())},
                       {"im", vector_to_json(b.spatial_modes.col(k).imag())}});
  j["spatial_modes"] = std::move(spatial);
  j["residual_frobenius"] = b.residual_frobenius;
  j["relative_residual"] = b.relative_residual;
  if (b.mean) j["mean"] = vector_to_json(*b.mean);
  return j.dump(1) + "\n";
}

ModelBundle model_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("model.json: ") + e.what());
  }
  try {
    const int version = require(j, "schema_version").get<int>();
    if (version != kSchemaVersion)
      throw FormatError("model.json: unsupported schema_version " + std::to_string(version) +
                        " (expected " + std::to_string(kSchemaVersion) + ")");
    const Index m = require(j, "m").get<Index>();
    const Index n = require(j, "n").get<Index>();
    const Index s = require(j, "s").get<Index>();
    if (m < 1 || n < 0 || s < 1) throw FormatError("model.json: invalid dimensions");

    ModelBundle b;
    b.model = StateSpaceModel<double>(matrix_from_json(require(j, "A"), n, n, "A"),
                                      matrix_from_json(require(j, "C"), m, n, "C"), s);
    b.dt = require(j, "dt").get<double>();
    b.p = matrix_from_json(require(j, "P"), m * s, n, "P");
    b.q = matrix_from_json(require(j, "Q"), m * s, n, "Q");

    const json& eigenvalues = require(j, "eigenvalues");
    if (!eigenvalues.is_array() || static_cast<Index>(eigenvalues.size()) != n)
      throw FormatError("model.json: 'eigenvalues' must have n entries");
    b.eigenvalues.resize(n);
    for (Index k = 0; k < n; ++k) {
      const json& e = eigenvalues[static_cast<std::size_t>(k)];
      b.eigenvalues(k) = {require(e, "re").get<double>(), require(e, "im").get<double>()};
    }
    const json& spatial = require(j, "spatial_modes");
    if (!spatial.is_array() || static_cast<Index>(spatial.size()) != n)
      throw FormatError("model.json: 'spatial_modes' must have n entries");
    b.spatial_modes.resize(m, n);
    for (Index k = 0; k < n; ++k) {
      const json& mode = spatial[static_cast<std::size_t>(k)];
      const Vector<double> re = vector_from_json(require(mode, "re"), m, "spatial_modes.re");
      const Vector<double> im = vector_from_json(require(mode, "im"), m, "spatial_modes.im");
      for (Index i = 0; i < m; ++i) b.spatial_modes(i, k) = {re(i), im(i)};
    }
    b.residual_frobenius = require(j, "residual_frobenius").get<double>();
    b.relative_residual = require(j, "relative_residual").get<double>();
    if (j.contains("mean")) b.mean = vector_from_json(j.at("mean"), m, "mean");
    return b;
  } catch (const json::exception& e) {
    throw FormatError(std::string("model.json: ") + e.what());
  }
}

void save_model(const ModelBundle& bundle, const fs::path& path) {
  write_file_atomic(path, model_to_json(bundle));
}

ModelBundle load_model(const fs::path& path) { return model_from_json(read_file(path)); }

}  // namespace siddmd::io
