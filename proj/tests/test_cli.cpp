#include <doctest.h>

#include <json.hpp>

#include <sstream>

#include "cli.hpp"
#include "siddmd/io.hpp"
#include "test_support.hpp"

using namespace siddmd;
using json = nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "siddmd");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::filesystem::path surrogate_csv(const std::filesystem::path& dir) {
  const auto path = dir / "lc.csv";
  REQUIRE(run_cli({"generate", "--kind", "lc", "--out", path.string()}).code == cli::kOk);
  return path;
}

}  // namespace

TEST_CASE("identify on the surrogate writes every artifact") {
  const auto dir = testing::temp_dir("cli_identify");
  const auto csv = surrogate_csv(dir);
  const auto out = dir / "run";
  const auto r = run_cli({"identify", "--input", csv.string(), "--order", "3", "--delay", "20", "--dt",
                          "0.0333333", "--out", out.string(), "--report", "json", "--shape", "34x31"});
  REQUIRE(r.code == cli::kOk);
  const auto report = json::parse(io::read_file(out / "report.json"));
  CHECK(report["relative_residual"].get<double>() <= 1e-6);
  CHECK(report["eigenvalues"].size() == 3);
  CHECK(report["real_modes"] == 1);
  CHECK(report["conjugate_pairs"] == 1);
  CHECK(json::parse(r.out) == report);
  for (int k = 1; k <= 3; ++k) {
    CHECK(std::filesystem::exists(out / "modes" / ("mode_" + std::to_string(k) + "_re.ppm")));
    CHECK(std::filesystem::exists(out / "modes" / ("mode_" + std::to_string(k) + "_im.ppm")));
  }
  const auto model = io::load_model(out / "model.json");
  CHECK(model.model.m == 1054);
  CHECK(model.eigenvalues.size() == 3);
  const std::string trends = io::read_file(out / "trends.csv");
  CHECK(trends.rfind("mode,modulus,argument,frame,time,trend_re,trend_im\n", 0) == 0);
  CHECK(std::count(trends.begin(), trends.end(), '\n') == 1 + 3 * 71);
}

TEST_CASE("identify from PGM frames") {
  const auto dir = testing::temp_dir("cli_frames");
  REQUIRE(run_cli({"generate", "--kind", "lc", "--format", "frames", "--out", (dir / "frames").string()}).code ==
          cli::kOk);
  const auto r = run_cli({"identify", "--input", (dir / "frames").string(), "--format", "frames", "--order", "3",
                          "--delay", "20", "--out", (dir / "run").string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("relative_residual: ") != std::string::npos);
  CHECK(std::filesystem::exists(dir / "run" / "report.txt"));
}

TEST_CASE("usage errors exit with 2") {
  const auto dir = testing::temp_dir("cli_usage");
  const auto csv = surrogate_csv(dir);
  const auto r = run_cli({"identify", "--input", csv.string(), "--order", "0", "--delay", "20", "--out",
                          (dir / "x").string()});
  CHECK(r.code == cli::kUsage);
  const auto err = json::parse(r.err);
  CHECK(err["error"] == "usage");
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

  CHECK(run_cli({"identify", "--input", csv.string()}).code == cli::kUsage);
  CHECK(run_cli({"bogus"}).code == cli::kUsage);
  CHECK(run_cli({"identify", "--input", csv.string(), "--order", "3", "--delay", "20", "--out",
                 (dir / "x").string(), "--shape", "3x3"})
            .code == cli::kUsage);
}

TEST_CASE("runtime failures exit with 1") {
  const auto dir = testing::temp_dir("cli_runtime");
  const auto r = run_cli({"identify", "--input", (dir / "missing.csv").string(), "--order", "1", "--delay", "1",
                          "--out", (dir / "x").string()});
  CHECK(r.code == cli::kFailure);
  CHECK(json::parse(r.err)["error"] == "io");

  const auto csv = surrogate_csv(dir);
  const auto short_data = run_cli({"identify", "--input", csv.string(), "--order", "1", "--delay", "80",
                                   "--out", (dir / "y").string(), "--shape", "34x31"});
  CHECK(short_data.code == cli::kFailure);
  CHECK(json::parse(short_data.err)["error"] == "insufficient-data");
}

TEST_CASE("baseline comparison in the report") {
  const auto dir = testing::temp_dir("cli_baseline");
  const auto csv = dir / "sys.csv";
  REQUIRE(run_cli({"generate", "--kind", "system", "--order", "4", "--outputs", "2", "--steps", "60", "--noise",
                   "0.2", "--seed", "3", "--out", csv.string()})
              .code == cli::kOk);
  for (std::string method : {"tdmd", "upc"}) {
    const auto out = dir / method;
    const auto r = run_cli({"identify", "--input", csv.string(), "--order", "2", "--delay", "5", "--out",
                            out.string(), "--baseline", method, "--report", "json"});
    REQUIRE(r.code == cli::kOk);
    const auto b = json::parse(r.out)["baseline"];
    CHECK(b["method"] == method);
    const double ours = b["objective_siddmd"].get<double>(), theirs = b["objective_baseline"].get<double>();
    CHECK(theirs >= ours - 1e-10);
    if (method == "upc") CHECK(std::abs(theirs - ours) <= 1e-8 * ours);
  }
}

TEST_CASE("identical runs give byte-identical artifacts") {
  const auto dir = testing::temp_dir("cli_determinism");
  const auto csv = surrogate_csv(dir);
  for (const char* name : {"a", "b"})
    REQUIRE(run_cli({"identify", "--input", csv.string(), "--order", "3", "--delay", "20", "--center", "--out",
                     (dir / name).string()})
                .code == cli::kOk);
  CHECK(io::read_file(dir / "a" / "model.json") == io::read_file(dir / "b" / "model.json"));
  CHECK(io::read_file(dir / "a" / "trends.csv") == io::read_file(dir / "b" / "trends.csv"));
  CHECK(io::load_model(dir / "a" / "model.json").mean.has_value());
}
