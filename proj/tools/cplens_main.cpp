// Command-line front end: model files in, CSV/JSON-lines/SVG out.
// Exit codes: 0 all checks pass, 1 a check failed, 2 usage or config error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "cplens/cplens.hpp"

namespace {

cplens::Cx parse_pair(const std::string& text, const std::string& what) {
  const auto parts = cplens::detail::split(text, ',');
  if (parts.size() != 2) throw cplens::ConfigError(what + " must be RE,IM");
  return {cplens::detail::parse_double(parts[0], what),
          cplens::detail::parse_double(parts[1], what)};
}

cplens::Window parse_window(const std::string& text) {
  const auto parts = cplens::detail::split(text, ',');
  if (parts.size() != 6)
    throw cplens::ConfigError("--window must be CX,CY,HW,HH,NX,NY");
  cplens::Window w;
  w.center = {cplens::detail::parse_double(parts[0], "window center"),
              cplens::detail::parse_double(parts[1], "window center")};
  w.half_width = cplens::detail::parse_double(parts[2], "window half width");
  w.half_height = cplens::detail::parse_double(parts[3], "window half height");
  w.nx = cplens::detail::parse_int(parts[4], "window nx");
  w.ny = cplens::detail::parse_int(parts[5], "window ny");
  return w;
}

struct Flags {
  std::string model_path;
  std::string source;
  std::string sources_file;
  int random_n = 0;
  unsigned seed = 42;
  std::string window;
  double tol = 1e-8;
  int jobs = 1;
  std::string out_path;
  std::string svg_path;
};

void add_common(CLI::App* cmd, Flags& f) {
  cmd->add_option("--model", f.model_path, "model file (.lens)")->required();
  cmd->add_option("--out", f.out_path, "write machine output here instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"rational lens models: images, magnification sums, caustics"};
  app.require_subcommand(1);
  Flags f;

  CLI::App* validate = app.add_subcommand("validate", "structural model checks");
  add_common(validate, f);

  CLI::App* images = app.add_subcommand("images", "all complex fixed points of one source");
  add_common(images, f);
  images->add_option("--source", f.source, "source position RE,IM")->required();

  CLI::App* invariant = app.add_subcommand("invariant", "magnification-sum sweep");
  add_common(invariant, f);
  invariant->add_option("--sources", f.sources_file, "file with one re,im per line");
  invariant->add_option("--random", f.random_n, "draw N random sources");
  invariant->add_option("--seed", f.seed, "random seed (default 42)");
  invariant->add_option("--tol", f.tol, "unit-sum tolerance (default 1e-8)");

  CLI::App* scan = app.add_subcommand("scan", "image-count grid over a source window");
  add_common(scan, f);
  scan->add_option("--window", f.window, "CX,CY,HW,HH,NX,NY")->required();
  scan->add_option("--jobs", f.jobs, "worker threads (default 1)");
  scan->add_option("--svg", f.svg_path, "also render the grid as SVG");

  CLI::App* caustics = app.add_subcommand("caustics", "critical curves and caustics");
  add_common(caustics, f);
  caustics->add_option("--window", f.window, "lens-plane window CX,CY,HW,HH,NX,NY")->required();
  caustics->add_option("--svg", f.svg_path, "also render the curves as SVG");

  CLI::App* verify = app.add_subcommand("verify", "cross-check solver against oracles");
  add_common(verify, f);
  verify->add_option("--seed", f.seed, "random seed (default 42)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // CLI11 uses 0 for --help; everything else is a usage error.
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    cplens::RunConfig cfg;
    try {
      cfg.lens = cplens::load_lens_config(f.model_path);
    } catch (const cplens::ConfigError&) {
      throw;
    } catch (const cplens::Error& e) {
      // A file that parses but describes an unusable lens (nonpositive mass,
      // duplicate positions, ...) is still the user's configuration problem,
      // not a failed check: report it as one.
      throw cplens::ConfigError(f.model_path + ": " + e.what());
    }
    if (!f.source.empty()) cfg.source = parse_pair(f.source, "--source");
    cfg.sources_file = f.sources_file;
    cfg.random_n = f.random_n;
    cfg.seed = f.seed;
    if (!f.window.empty()) cfg.window = parse_window(f.window);
    cfg.tol = f.tol;
    cfg.jobs = f.jobs;
    cfg.svg_path = f.svg_path;

    std::ofstream out_file;
    if (!f.out_path.empty()) {
      out_file.open(f.out_path);
      if (!out_file) throw cplens::ConfigError("cannot write to '" + f.out_path + "'");
    }
    std::ostream& out = f.out_path.empty() ? std::cout : out_file;

    if (validate->parsed()) return cplens::cmd_validate(cfg, out, std::cerr);
    if (images->parsed()) return cplens::cmd_images(cfg, out, std::cerr);
    if (invariant->parsed()) return cplens::cmd_invariant(cfg, out, std::cerr);
    if (scan->parsed()) return cplens::cmd_scan(cfg, out, std::cerr);
    if (caustics->parsed()) return cplens::cmd_caustics(cfg, out, std::cerr);
    if (verify->parsed()) return cplens::cmd_verify(cfg, out, std::cerr);
    std::cerr << "no command selected\n";
    return 2;
  } catch (const cplens::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const cplens::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
