#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <thread>

#include "nchodge/cli.hpp"
#include "nchodge/errors.hpp"

using namespace nchodge;

int main(int argc, char** argv) {
  CLI::App app{"Hochschild, cyclic and Hodge computations for linear quotient stacks", "compute"};
  std::string input, op, weight_window, loop_window, out, format = "json", cache_dir;
  std::optional<int> degree_cap, trunc_n;
  unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  bool no_cache = false;
  app.add_option("--input", input, "model description (JSON)")->required();
  app.add_option("--op", op, "hh | hp | hn | degeneration | ss-pages | hodge | mf-hh | oracle-compare | hkr-check")
      ->required();
  app.add_option("--weight-window", weight_window, "keep aux/internal weight pieces in a..b");
  app.add_option("--degree-cap", degree_cap, "aux degree cap D");
  app.add_option("--loop-window", loop_window, "loop degrees -J..J");
  app.add_option("--trunc-n", trunc_n, "u-truncation level / last spectral page");
  app.add_option("--out", out, "write output here instead of stdout");
  app.add_option("--format", format, "json | csv | text");
  app.add_option("--cache-dir", cache_dir, "result cache (default: $NCHODGE_CACHE_DIR)");
  app.add_flag("--no-cache", no_cache, "ignore the result cache");
  app.add_option("--threads", threads, "worker threads");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cli::exit_ok : cli::exit_input;
  }

  try {
    cli::JobSpec job;
    job.model = cli::parse_model(input);
    job.op = cli::parse_op(op);
    job.format = cli::parse_format(format);
    job.threads = std::max(1u, threads);
    if (degree_cap) {
      if (*degree_cap < 0) throw InputError("--degree-cap must be >= 0");
      job.model.degree_cap = degree_cap;
    }
    if (trunc_n) {
      if (*trunc_n < 1) throw InputError("--trunc-n must be >= 1");
      job.model.trunc_n = trunc_n;
    }
    if (!weight_window.empty()) job.model.weight_window = cli::parse_range(weight_window);
    if (!loop_window.empty()) {
      const auto [a, b] = cli::parse_range(loop_window);
      if (a != -b) throw InputError("--loop-window must be symmetric, -J..J");
      job.model.loop_window = b;
    }
    validate(job.model);
    if (cache_dir.empty())
      if (const char* env = std::getenv("NCHODGE_CACHE_DIR")) cache_dir = env;
    if (!cache_dir.empty() && !no_cache) job.cache_dir = cache_dir;

    const cli::RunResult r = cli::run(job);
    for (const auto& d : r.diagnostics) std::cerr << d << "\n";
    const std::string text = cli::render(cli::envelope(r), job.format);
    if (out.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(out, std::ios::binary | std::ios::trunc);
      f << text;
      if (!f) throw InputError("cannot write '" + out + "'");
    }
    return cli::exit_ok;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::exit_input;
  } catch (const InvariantViolation& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return cli::exit_invariant;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return cli::exit_invariant;
  }
}
