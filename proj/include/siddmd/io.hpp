#pragma once

// File formats: CSV samples, binary PGM (P5) frames, PPM (P6) mode images,
// and the versioned model.json.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "siddmd/sysid.hpp"

namespace siddmd::io {

namespace fs = std::filesystem;

enum class InputFormat { Csv, Frames };

struct Ingested {
  OutputSequence<double> sequence;
  std::optional<Index> width;  // frame geometry, frames format only
  std::optional<Index> height;
};

struct GrayImage {
  Index width = 0;
  Index height = 0;
  int maxval = 255;
  std::vector<std::uint8_t> pixels;  // row-major
};

// One sample per row, m columns. A first line that does not parse as numbers
// is treated as a header.
OutputSequence<double> read_csv(const fs::path& path, std::optional<double> dt = std::nullopt);
void write_csv(const OutputSequence<double>& seq, const fs::path& path);

GrayImage read_pgm(const fs::path& path);
void write_pgm(const fs::path& path, const GrayImage& image);

// Lexicographically sorted *.pgm files; each frame flattened row-major and
// scaled by 1/maxval (v/255 for 8-bit frames).
Ingested read_frames(const fs::path& dir, std::optional<double> dt = std::nullopt);

// Writes one frame per sample, clamping to [0, 1] and quantizing to 8 bits.
void write_frames(const OutputSequence<double>& seq, Index width, Index height, const fs::path& dir);

// Needs at least two samples.
Ingested ingest(const fs::path& path, InputFormat format, std::optional<double> dt = std::nullopt);

void write_ppm(const fs::path& path, Index width, Index height,
               const std::vector<std::uint8_t>& rgb);

// Positive values white, negative values red, scaled by `scale`.
std::vector<std::uint8_t> render_signed(const Vector<double>& values, double scale);

// Writes to a temporary sibling, then renames over the destination.
void write_file_atomic(const fs::path& path, const std::string& content);
std::string read_file(const fs::path& path);

inline constexpr int kSchemaVersion = 1;

struct ModelBundle {
  StateSpaceModel<double> model;
  double dt = 1.0;
  Matrix<double> p;
  Matrix<double> q;
  ComplexVector<double> eigenvalues;
  ComplexMatrix<double> spatial_modes;  // m x n
  double residual_frobenius = 0.0;
  double relative_residual = 0.0;
  std::optional<Vector<double>> mean;  // present when the data was centered
};

ModelBundle make_bundle(const IdentifyResult<double>& result,
                        std::optional<Vector<double>> mean = std::nullopt);

std::string model_to_json(const ModelBundle& bundle);
ModelBundle model_from_json(const std::string& text);
void save_model(const ModelBundle& bundle, const fs::path& path);
ModelBundle load_model(const fs::path& path);

}  // namespace siddmd::io
