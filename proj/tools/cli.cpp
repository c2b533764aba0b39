#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <random>
#include <sstream>
#include <string>

#include "siddmd/datagen.hpp"
#include "siddmd/io.hpp"

namespace siddmd::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

struct UsageError : Error {
  explicit UsageError(const std::string& what) : Error("usage", what) {}
};

struct IdentifyOptions {
  std::string input;
  std::string format = "csv";
  long order = 0;
  long delay = 0;
  double dt = 1.0;
  std::string out;
  std::string baseline = "none";
  std::string report = "text";
  long seed = 0;
  bool center = false;
  std::string shape;
};

struct GenerateOptions {
  std::string kind = "lc";
  std::string out;
  std::string format = "csv";
  long width = 34;
  long height = 31;
  long frames = 71;
  double speed = 1.0;
  long order = 3;
  long outputs = 2;
  long steps = 60;
  double noise = 0.0;
  long seed = 0;
};

std::string fmt(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void print_error(std::ostream& err, const std::string& kind, const std::string& message) {
  json j;
  j["error"] = kind;
  j["message"] = message;
  err << j.dump() << "\n";
}

std::pair<Index, Index> parse_shape(const std::string& shape) {
  const auto x = shape.find('x');
  Index w = 0, h = 0;
  const bool ok =
      x != std::string::npos &&
      std::from_chars(shape.data(), shape.data() + x, w).ptr == shape.data() + x &&
      std::from_chars(shape.data() + x + 1, shape.data() + shape.size(), h).ptr ==
          shape.data() + shape.size();
  if (!ok || w < 1 || h < 1) throw UsageError("--shape must look like WIDTHxHEIGHT");
  return {w, h};
}

void write_mode_images(const ModeSet<double>& set, Index width, Index height, const fs::path& dir) {
  fs::create_directories(dir);
  for (Index k = 0; k < set.size(); ++k) {
    const Vector<double> re = set.spatial.col(k).real();
    const Vector<double> im = set.spatial.col(k).imag();
    const double scale = std::max(re.cwiseAbs().maxCoeff(), im.cwiseAbs().maxCoeff());
    const std::string stem = "mode_" + std::to_string(k + 1);
    io::write_ppm(dir / (stem + "_re.ppm"), width, height, io::render_signed(re, scale));
    io::write_ppm(dir / (stem + "_im.ppm"), width, height, io::render_signed(im, scale));
  }
}

std::string trends_csv(const ModeSet<double>& set, Index frames) {
  std::string out = "mode,modulus,argument,frame,time,trend_re,trend_im\n";
  for (Index k = 0; k < set.size(); ++k) {
    const auto lambda = set.temporal(k);
    for (Index f = 0; f < frames; ++f) {
      const double t = static_cast<double>(f) * set.dt;
      const auto trend = set.trend(k, t);
      out += std::to_string(k + 1) + "," + fmt(std::abs(lambda)) + "," + fmt(std::arg(lambda)) + "," +
             std::to_string(f) + "," + fmt(t) + "," + fmt(trend.real()) + "," + fmt(trend.imag()) +
             "\n";
    }
  }
  return out;
}

int run_identify(const IdentifyOptions& opt, std::ostream& out) {
  if (opt.order < 1) throw UsageError("--order must be >= 1");
  if (opt.delay < 1) throw UsageError("--delay must be >= 1");
  if (!(opt.dt > 0.0) || !std::isfinite(opt.dt)) throw UsageError("--dt must be positive");

  const auto format = opt.format == "frames" ? io::InputFormat::Frames : io::InputFormat::Csv;
  io::Ingested data = io::ingest(opt.input, format, opt.dt);

  std::optional<Vector<double>> mean;
  OutputSequence<double> seq = data.sequence;
  if (opt.center) {
    mean = seq.samples().rowwise().mean();
    seq = OutputSequence<double>(seq.samples().colwise() - *mean, opt.dt);
  }

  Index width = seq.dim(), height = 1;
  if (!opt.shape.empty()) {
    std::tie(width, height) = parse_shape(opt.shape);
  } else if (data.width && data.height) {
    width = *data.width;
    height = *data.height;
  }
  if (width * height != seq.dim())
    throw UsageError("--shape " + std::to_string(width) + "x" + std::to_string(height) +
                     " does not match m = " + std::to_string(seq.dim()));

  const Index n = opt.order, s = opt.delay;
  const IdentifyResult<double> result = identify(seq, n, s);

  const fs::path dir(opt.out);
  fs::create_directories(dir);
  io::save_model(io::make_bundle(result, mean), dir / "model.json");
  write_mode_images(result.modes, width, height, dir / "modes");
  io::write_file_atomic(dir / "trends.csv", trends_csv(result.modes, seq.size()));

  json report;
  report["m"] = seq.dim();
  report["samples"] = seq.size();
  report["n"] = n;
  report["s"] = s;
  report["effective_rank"] = result.map.r;
  report["dt"] = opt.dt;
  report["seed"] = opt.seed;
  report["residual_frobenius"] = result.map.residual_frobenius;
  report["relative_residual"] = result.relative_residual;
  report["degenerate_truncation"] = result.map.degenerate_truncation;
  report["real_modes"] = result.modes.real_count();
  report["conjugate_pairs"] = result.modes.pair_count();
  json eigenvalues = json::array();
  for (Index k = 0; k < result.modes.size(); ++k)
    eigenvalues.push_back({{"re", result.modes.temporal(k).real()},
                           {"im", result.modes.temporal(k).imag()}});
  report["eigenvalues"] = std::move(eigenvalues);

  if (opt.baseline != "none") {
    const HankelPair<double> h = hankel_embed(seq, s);
    double baseline_objective = 0.0;
    if (opt.baseline == "upc") {
      const SidSolution<double> upc = upc_identify(h, n);
      baseline_objective = sid_objective(upc.gamma, upc.x, h);
    } else {
      baseline_objective = truncated_dmd(h, n).objective(h);
    }
    json cmp;
    cmp["method"] = opt.baseline;
    cmp["objective_siddmd"] = result.map.residual_frobenius;
    cmp["objective_baseline"] = baseline_objective;
    cmp["difference"] = baseline_objective - result.map.residual_frobenius;
    report["baseline"] = std::move(cmp);
  }

  std::string rendered;
  if (opt.report == "json") {
    rendered = report.dump(2) + "\n";
    io::write_file_atomic(dir / "report.json", rendered);
  } else {
    std::ostringstream ss;
    for (const auto& [key, value] : report.items()) {
      if (key == "eigenvalues") {
        for (const auto& e : value)
          ss << "eigenvalue: " << fmt(e["re"].get<double>()) << " " << fmt(e["im"].get<double>())
             << "i\n";
      } else if (key == "baseline") {
        for (const auto& [k2, v2] : value.items()) ss << "baseline." << k2 << ": " << v2.dump() << "\n";
      } else {
        ss << key << ": " << value.dump() << "\n";
      }
    }
    rendered = ss.str();
    io::write_file_atomic(dir / "report.txt", rendered);
  }
  out << rendered;
  return kOk;
}

int run_generate(const GenerateOptions& opt, std::ostream& out) {
  const fs::path path(opt.out);
  if (opt.kind == "lc") {
    const OutputSequence<double> seq =
        datagen::lc_surrogate(opt.width, opt.height, opt.frames, opt.speed,
                              static_cast<std::uint64_t>(opt.seed));
    if (opt.format == "frames")
      io::write_frames(seq, opt.width, opt.height, path);
    else
      io::write_csv(seq, path);
    out << "wrote " << seq.size() << " samples of dimension " << seq.dim() << " to " << opt.out
        << "\n";
    return kOk;
  }
  if (opt.format == "frames") throw UsageError("--format frames is only available for --kind lc");
  const auto seed = static_cast<std::uint64_t>(opt.seed);
  const auto spectrum = datagen::random_spectrum(opt.order, seed);
  const auto model = datagen::random_observable_system(opt.order, opt.outputs, spectrum, seed);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector<double> x0(opt.order);
  for (Index i = 0; i < x0.size(); ++i) x0(i) = normal(rng);
  const auto seq = datagen::simulate(model, x0, opt.steps, opt.noise, seed + 1);
  io::write_csv(seq, path);
  out << "wrote " << seq.size() << " samples of dimension " << seq.dim() << " to " << opt.out << "\n";
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Low-order linear models and spatiotemporal modes from output-only data", "siddmd"};
  app.require_subcommand(1);

  IdentifyOptions id;
  auto* identify_cmd = app.add_subcommand("identify", "Identify (A, C) and modes from data");
  identify_cmd->add_option("--input", id.input, "CSV file or directory of PGM frames")->required();
  identify_cmd->add_option("--format", id.format)->check(CLI::IsMember({"csv", "frames"}));
  identify_cmd->add_option("--order", id.order, "Model order n")->required();
  identify_cmd->add_option("--delay", id.delay, "Delay order s")->required();
  identify_cmd->add_option("--dt", id.dt, "Sampling interval in seconds");
  identify_cmd->add_option("--out", id.out, "Output directory")->required();
  identify_cmd->add_option("--baseline", id.baseline)->check(CLI::IsMember({"upc", "tdmd", "none"}));
  identify_cmd->add_option("--report", id.report)->check(CLI::IsMember({"json", "text"}));
  identify_cmd->add_option("--seed", id.seed);
  identify_cmd->add_flag("--center", id.center, "Subtract the temporal mean first");
  identify_cmd->add_option("--shape", id.shape, "Mode image geometry WIDTHxHEIGHT");

  GenerateOptions gen;
  auto* generate_cmd = app.add_subcommand("generate", "Write synthetic data");
  generate_cmd->add_option("--kind", gen.kind)->check(CLI::IsMember({"lc", "system"}));
  generate_cmd->add_option("--out", gen.out, "Output CSV file or frame directory")->required();
  generate_cmd->add_option("--format", gen.format)->check(CLI::IsMember({"csv", "frames"}));
  generate_cmd->add_option("--width", gen.width)->check(CLI::PositiveNumber);
  generate_cmd->add_option("--height", gen.height)->check(CLI::PositiveNumber);
  generate_cmd->add_option("--frames", gen.frames)->check(CLI::PositiveNumber);
  generate_cmd->add_option("--speed", gen.speed)->check(CLI::PositiveNumber);
  generate_cmd->add_option("--order", gen.order)->check(CLI::PositiveNumber);
  generate_cmd->add_option("--outputs", gen.outputs)->check(CLI::PositiveNumber);
  generate_cmd->add_option("--steps", gen.steps)->check(CLI::PositiveNumber);
  generate_cmd->add_option("--noise", gen.noise)->check(CLI::NonNegativeNumber);
  generate_cmd->add_option("--seed", gen.seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    print_error(err, "usage", e.what());
    return kUsage;
  }

  try {
    if (*identify_cmd) return run_identify(id, out);
    return run_generate(gen, out);
  } catch (const UsageError& e) {
    print_error(err, e.kind(), e.what());
    return kUsage;
  } catch (const Error& e) {
    print_error(err, e.kind(), e.what());
    return kFailure;
  } catch (const std::exception& e) {
    print_error(err, "runtime", e.what());
    return kFailure;
  }
}

}  // namespace siddmd::cli
