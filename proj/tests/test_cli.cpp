#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <catch2/catch_amalgamated.hpp>
#include <json.hpp>

using nlohmann::json;

namespace {

struct CliRun {
  int exit_code = -1;
  std::string out;
};

// Runs the installed binary and captures stdout; stderr is dropped (the
// contract keeps machine output on stdout only, which is what we test).
CliRun run_cli(const std::string& args) {
  const std::string cmd = std::string(CPLENS_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliRun r;
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, got);
  const int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config_path(const std::string& name) {
  return std::string(CPLENS_CONFIG_DIR) + "/" + name;
}

// Scratch .lens files for failure cases live next to the test binary.
std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream out(path);
  out << text;
  return path.string();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

}  // namespace

TEST_CASE("validate passes shipped models and fails broken ones", "[cli]") {
  const CliRun good = run_cli("validate --model " + config_path("filament.lens"));
  CHECK(good.exit_code == 0);
  CHECK(good.out.find("degree: ok") != std::string::npos);
  CHECK(good.out.find("symmetry: ok") != std::string::npos);
  CHECK(good.out.find("decay: ok") != std::string::npos);

  // deg num == deg den: not a sane deflection, and the report says which
  // invariant broke.
  const std::string bad = write_temp("cplens_bad_degree.lens",
                                     "[model]\ntype = raw\n"
                                     "[alpha1.num]\n0 1 1 0\n0 0 2 0\n"
                                     "[alpha1.den]\n0 1 1 0\n"
                                     "[alpha2.num]\n1 0 1 0\n0 0 2 0\n"
                                     "[alpha2.den]\n1 0 1 0\n");
  const CliRun broken = run_cli("validate --model " + bad);
  CHECK(broken.exit_code == 1);
  CHECK(broken.out.find("degree: FAIL") != std::string::npos);

  const std::string incomplete =
      write_temp("cplens_missing_param.lens", "[model]\ntype = filament\n");
  CHECK(run_cli("validate --model " + incomplete).exit_code == 2);

  CHECK(run_cli("validate --model /does/not/exist.lens").exit_code == 2);
  CHECK(run_cli("images --model " + config_path("filament.lens")).exit_code == 2);  // no --source
}

TEST_CASE("images reports fixed points and the unit sum", "[cli]") {
  const CliRun r = run_cli("images --model " + config_path("filament.lens") + " --source 2,0");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() == 3);  // 2 records + summary
  const json summary = json::parse(lines.back());
  CHECK(summary.at("n_fixed") == 2);
  CHECK(summary.at("n_real") == 2);
  CHECK(summary.at("valid") == true);
  CHECK(std::abs(double(summary.at("complex_sum_re")) - 1.0) < 1e-9);

  const json first = json::parse(lines.front());
  CHECK(first.at("is_real") == true);
  CHECK(std::abs(double(first.at("z1_re")) - 0.1339745962) < 1e-9);
}

TEST_CASE("images separates real from spurious fixed points", "[cli]") {
  const std::string model = "--model " + config_path("binary.lens");

  const CliRun inside = run_cli("images " + model + " --source 0.05,0");
  REQUIRE(inside.exit_code == 0);
  auto lines = lines_of(inside.out);
  REQUIRE(lines.size() == 6);  // 5 records + summary
  for (std::size_t k = 0; k + 1 < lines.size(); ++k)
    CHECK(json::parse(lines[k]).at("is_real") == true);
  CHECK(json::parse(lines.back()).at("n_real") == 5);

  const CliRun outside = run_cli("images " + model + " --source 2,0");
  REQUIRE(outside.exit_code == 0);
  lines = lines_of(outside.out);
  REQUIRE(lines.size() == 6);
  const json summary = json::parse(lines.back());
  CHECK(summary.at("n_fixed") == 5);
  CHECK(summary.at("n_real") == 3);
  CHECK(std::abs(double(summary.at("complex_sum_re")) - 1.0) < 1e-8);
  CHECK(std::abs(double(summary.at("complex_sum_im"))) < 1e-8);
}

TEST_CASE("images exits 1 when the source sits on a caustic", "[cli]") {
  const CliRun r = run_cli("images --model " + config_path("filament.lens") + " --source 1,0");
  CHECK(r.exit_code == 1);
  const auto lines = lines_of(r.out);
  REQUIRE(!lines.empty());
  CHECK(json::parse(lines.back()).at("valid") == false);
}

TEST_CASE("invariant sweep honors seeds, files, and tolerance", "[cli]") {
  const std::string model = "--model " + config_path("filament.lens");
  const CliRun sweep = run_cli("invariant " + model + " --random 100 --seed 42");
  CHECK(sweep.exit_code == 0);
  const auto lines = lines_of(sweep.out);
  REQUIRE(lines.size() == 101);  // header + one row per source
  CHECK(lines.front() == "zeta_re,zeta_im,n_fixed,n_real,sum_re,sum_im,real_sum,valid");

  // Byte-stable reruns.
  CHECK(run_cli("invariant " + model + " --random 100 --seed 42").out == sweep.out);
  CHECK(run_cli("invariant " + model + " --random 100 --seed 43").out != sweep.out);

  // A degenerate row (Einstein-ring source) is reported invalid but does not
  // fail the sweep.
  const std::string sources = write_temp("cplens_sources.csv",
                                         "# three probes\n"
                                         "0, 0\n"
                                         "0.5, 0\n"
                                         "0.25, 0.1\n");
  const CliRun file_run =
      run_cli("invariant --model " + config_path("point.lens") + " --sources " + sources);
  CHECK(file_run.exit_code == 0);
  const auto rows = lines_of(file_run.out);
  REQUIRE(rows.size() == 4);
  CHECK(rows[1].rfind("0,0,0,0,", 0) == 0);  // solve refused: no fixed points listed
  CHECK(rows[1].back() == '0');              // valid = 0
  CHECK(rows[2].back() == '1');
  CHECK(rows[3].back() == '1');

  // An unreachable tolerance turns the same healthy rows into violations.
  CHECK(run_cli("invariant --model " + config_path("point.lens") + " --sources " + sources +
                " --tol 1e-18")
            .exit_code == 1);

  CHECK(run_cli("invariant " + model).exit_code == 2);  // neither --sources nor --random
}

TEST_CASE("scan emits the count grid and is identical across job counts", "[cli]") {
  const std::string model = "--model " + config_path("filament.lens");
  const std::string window = " --window 0,0,2,1,41,9";
  const CliRun serial = run_cli("scan " + model + window + " --jobs 1");
  REQUIRE(serial.exit_code == 0);
  const auto lines = lines_of(serial.out);
  REQUIRE(lines.size() == std::size_t(41) * 9 + 1);
  CHECK(lines.front() == "y1,y2,count");

  const CliRun threaded = run_cli("scan " + model + window + " --jobs 4");
  CHECK(threaded.out == serial.out);

  CHECK(run_cli("scan " + model + " --window 0,0,2,1,4,9").exit_code == 2);   // nx too small
  CHECK(run_cli("scan " + model + " --window 0,0,2,1,41").exit_code == 2);    // malformed
  CHECK(run_cli("scan " + model + window + " --jobs 0").exit_code == 2);
}

TEST_CASE("scan renders an SVG when asked", "[cli]") {
  const auto svg_path = std::filesystem::temp_directory_path() / "cplens_scan.svg";
  std::filesystem::remove(svg_path);
  const CliRun r = run_cli("scan --model " + config_path("filament.lens") +
                           " --window 0,0,2,1,21,9 --svg " + svg_path.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream svg(svg_path);
  REQUIRE(svg.good());
  std::string first_line;
  std::getline(svg, first_line);
  CHECK(first_line.rfind("<svg", 0) == 0);
}

TEST_CASE("caustics produces polylines in both planes", "[cli]") {
  const CliRun r = run_cli("caustics --model " + config_path("point.lens") +
                           " --window 0,0,1.5,1.5,101,101");
  REQUIRE(r.exit_code == 0);
  const auto lines = lines_of(r.out);
  REQUIRE(lines.size() > 10);
  CHECK(lines.front() == "kind,polyline_id,re,im");
  bool saw_critical = false;
  for (std::size_t k = 1; k < lines.size(); ++k) {
    const auto cols = lines[k];
    if (cols.rfind("critical,", 0) == 0) {
      saw_critical = true;
    } else {
      REQUIRE(cols.rfind("caustic,", 0) == 0);
      // Point-mass caustic degenerates to the origin.
      std::size_t c1 = cols.find(',', 8);
      std::size_t c2 = cols.find(',', c1 + 1);
      const double re = std::strtod(cols.c_str() + c1 + 1, nullptr);
      const double im = std::strtod(cols.c_str() + c2 + 1, nullptr);
      CHECK(std::abs(re) < 0.06);
      CHECK(std::abs(im) < 0.06);
    }
  }
  CHECK(saw_critical);

  // A window buried inside the pole is a usage error.
  CHECK(run_cli("caustics --model " + config_path("point.lens") +
                " --window 0,0,1e-9,1e-9,9,9")
            .exit_code == 2);
}

TEST_CASE("verify cross-checks pass for shipped models", "[cli]") {
  const CliRun filament = run_cli("verify --model " + config_path("filament.lens"));
  CHECK(filament.exit_code == 0);
  CHECK(filament.out.find("PASS validation") != std::string::npos);
  CHECK(filament.out.find("PASS oracle-agreement") != std::string::npos);
  CHECK(filament.out.find("PASS jacobian-identity") != std::string::npos);
  CHECK(filament.out.find("PASS closed-form") != std::string::npos);
  CHECK(filament.out.find("FAIL") == std::string::npos);

  const CliRun point = run_cli("verify --model " + config_path("point.lens"));
  CHECK(point.exit_code == 0);
  CHECK(point.out.find("PASS closed-form") != std::string::npos);

  // Symmetry deliberately broken: alpha2 is not the mirror of alpha1.
  const std::string crooked = write_temp("cplens_crooked.lens",
                                         "[model]\ntype = raw\n"
                                         "[alpha1.num]\n0 0 1 0\n"
                                         "[alpha1.den]\n0 1 1 0\n"
                                         "[alpha2.num]\n0 0 2 0\n"
                                         "[alpha2.den]\n1 0 1 0\n");
  const CliRun broken = run_cli("verify --model " + crooked);
  CHECK(broken.exit_code == 1);
  CHECK(broken.out.find("FAIL validation: symmetry") != std::string::npos);
}

TEST_CASE("machine output lands in --out files untouched", "[cli]") {
  const auto out_path = std::filesystem::temp_directory_path() / "cplens_images.jsonl";
  std::filesystem::remove(out_path);
  const CliRun r = run_cli("images --model " + config_path("filament.lens") +
                           " --source 2,0 --out " + out_path.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.empty());  // stdout stays silent when --out is given
  std::ifstream in(out_path);
  REQUIRE(in.good());
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  CHECK(lines_of(text).size() == 3);

  const CliRun direct = run_cli("images --model " + config_path("filament.lens") + " --source 2,0");
  CHECK(direct.out == text);
}

TEST_CASE("usage errors exit with 2", "[cli]") {
  CHECK(run_cli("").exit_code == 2);
  CHECK(run_cli("frobnicate").exit_code == 2);
  CHECK(run_cli("images --source 1,0").exit_code == 2);  // --model is required
  CHECK(run_cli("images --model " + config_path("point.lens") + " --source nope").exit_code == 2);
  CHECK(run_cli("--help").exit_code == 0);

  // A file that parses but describes an unusable lens is a config error too,
  // not a failed check.
  const auto bad = write_temp("cplens_negative_mass.lens",
                              "[model]\ntype = point\nmasses = -1\npositions = 0, 0\n");
  const CliRun r = run_cli("validate --model " + bad);
  CHECK(r.exit_code == 2);
}
