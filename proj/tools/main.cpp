#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "cli.hpp"
#include "gks/error.hpp"
#include "gks/io.hpp"
#include "gks/version.hpp"

using namespace gks::cli;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// key = value lines; '#' starts a comment. A JSON manifest is also accepted,
// in which case its "resolved" object supplies the pairs.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config: cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  std::vector<std::pair<std::string, std::string>> out;
  if (trim(text).rfind('{', 0) == 0) {
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded() || !doc.contains("resolved")) throw UsageError("--config: '" + path + "' is not a manifest");
    for (const auto& [k, v] : doc.at("resolved").items()) out.emplace_back(k, v.get<std::string>());
    return out;
  }
  std::istringstream lines(text);
  std::string line;
  int number = 0;
  while (std::getline(lines, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("--config: line " + std::to_string(number) + " of '" + path + "' is not key = value");
    out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

bool is_global(const std::string& key) { return key == "out" || key == "workers" || key == "seed"; }

bool truthy(const std::string& v) { return v == "true" || v == "1" || v == "yes" || v == "on"; }

// Config entries become flags placed ahead of the command line ones so that
// explicit flags win.
std::vector<std::string> merge_config(const std::vector<std::string>& argv, const std::set<std::string>& commands,
                                      const std::set<std::string>& flag_names) {
  std::string config_path;
  std::size_t command_pos = argv.size();
  for (std::size_t i = 1; i < argv.size(); ++i) {
    if (argv[i] == "--config" && i + 1 < argv.size()) config_path = argv[i + 1];
    if (argv[i].rfind("--config=", 0) == 0) config_path = argv[i].substr(9);
    if (command_pos == argv.size() && commands.count(argv[i])) command_pos = i;
  }
  if (config_path.empty()) return argv;
  std::vector<std::string> global, local;
  for (const auto& [key, value] : read_config(config_path)) {
    auto& dest = is_global(key) ? global : local;
    if (flag_names.count(key)) {
      if (truthy(value)) dest.push_back("--" + key);
    } else {
      dest.push_back("--" + key);
      dest.push_back(value);
    }
  }
  std::vector<std::string> merged{argv.front()};
  merged.insert(merged.end(), global.begin(), global.end());
  for (std::size_t i = 1; i < argv.size(); ++i) {
    merged.push_back(argv[i]);
    if (i == command_pos) merged.insert(merged.end(), local.begin(), local.end());
  }
  return merged;
}

nlohmann::json resolve(const CLI::App* app) {
  nlohmann::json out = nlohmann::json::object();
  for (const CLI::Option* opt : app->get_options()) {
    const std::string name = opt->get_single_name();
    if (name == "help" || name == "version" || name == "config" || name.empty()) continue;
    std::string value;
    if (opt->count() > 0) {
      if (opt->get_expected_max() == 0) {
        value = "true";
      } else {
        const auto& r = opt->results();
        value = r.empty() ? "" : r.back();
      }
    } else {
      value = opt->get_expected_max() == 0 ? "false" : opt->get_default_str();
    }
    out[name] = value;
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic traveling waves of the generalized Kuramoto-Sivashinsky equation", "gks"};
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast)->always_capture_default();
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", gks::version());

  RunContext ctx;
  const char* env_out = std::getenv("GKS_OUTPUT_DIR");
  std::string out_dir = env_out && *env_out ? env_out : "gks-out";
  std::string config_path;
  app.add_option("--out", out_dir, "Output directory (default: $GKS_OUTPUT_DIR or ./gks-out)");
  app.add_option("--workers", ctx.workers, "Worker threads for parallel sweeps")->check(CLI::PositiveNumber);
  app.add_option("--seed", ctx.seed, "Seed recorded for randomized inputs");
  app.add_option("--config", config_path, "key = value file; command-line flags take precedence");

  ProfileArgs pa;
  auto* profile = app.add_subcommand("profile", "Solve one traveling wave, seeded at the Hopf point");
  profile->add_option("--epsilon", pa.epsilon, "Third-order coefficient");
  profile->add_option("--delta", pa.delta, "Second-order coefficient");
  profile->add_option("--f", pa.f, "Nonlinearity coefficients, constant term first");
  profile->add_option("--omega", pa.omega, "Spatial frequency 1/X");
  profile->add_option("--c", pa.c, "Wave speed");
  profile->add_option("--u0", pa.u0, "Constant state the branch bifurcates from");
  profile->add_option("--modes", pa.modes, "Initial Fourier modes")->check(CLI::Range(4, 4096));
  profile->add_option("--gauge", pa.gauge, "Phase condition")->check(CLI::IsMember({"cosine", "slope"}));
  profile->add_option("--output", pa.output, "Wave file (default <out>/wave.json)");

  ContinueArgs ca;
  auto* cont = app.add_subcommand("continue", "Continue a wave over a (c, omega) grid");
  cont->add_option("--from", ca.from, "Starting wave file")->required();
  cont->add_option("--omega-range", ca.omega_range, "a:b:n")->required();
  cont->add_option("--c-range", ca.c_range, "a:b:n (default: the wave's speed)");
  cont->add_option("--max-step", ca.max_step, "Largest continuation step")->check(CLI::PositiveNumber);
  cont->add_option("--output", ca.output, "Family directory (default <out>/family)");

  SpectrumArgs sa;
  auto* spectrum = app.add_subcommand("spectrum", "Bloch spectrum and stability verdict of one wave");
  spectrum->add_option("--wave", sa.wave, "Wave file")->required();
  spectrum->add_option("--nxi", sa.nxi, "Uniform Bloch parameters")->check(CLI::Range(2, 100000));
  spectrum->add_option("--ncluster", sa.ncluster, "Geometric points toward xi = 0 per side")->check(CLI::Range(1, 1000));
  spectrum->add_option("--nhill", sa.nhill, "Hill truncation")->check(CLI::Range(1, 2000));
  spectrum->add_option("--track-fraction", sa.track_fraction, "Critical tracking radius over pi/X");
  spectrum->add_option("--re-min", sa.re_min, "Left edge of the plotted window");

  BandArgs ba;
  auto* band = app.add_subcommand("band", "Stability scan across a family");
  band->add_option("--family", ba.family, "Family directory")->required();
  band->add_option("--nxi", ba.nxi, "Uniform Bloch parameters")->check(CLI::Range(2, 100000));
  band->add_option("--ncluster", ba.ncluster, "Geometric points toward xi = 0 per side")->check(CLI::Range(1, 1000));
  band->add_option("--nhill", ba.nhill, "Hill truncation")->check(CLI::Range(1, 2000));
  band->add_option("--panels", ba.panels, "Waves shown as orbit and spectrum panels")->check(CLI::Range(0, 12));

  WhithamArgs wa;
  auto* whitham = app.add_subcommand("whitham", "Whitham characteristics against Bloch coefficients");
  whitham->add_option("--family", wa.family, "Family directory")->required();
  whitham->add_option("--nxi", wa.nxi, "Uniform Bloch parameters")->check(CLI::Range(2, 100000));
  whitham->add_option("--ncluster", wa.ncluster, "Geometric points toward xi = 0 per side")->check(CLI::Range(1, 1000));
  whitham->add_option("--nhill", wa.nhill, "Hill truncation")->check(CLI::Range(1, 2000));
  whitham->add_flag("--richardson", wa.richardson, "Extrapolate the centered differences");
  whitham->add_option("--tolerance", wa.tolerance, "Relative tolerance of the comparison");

  EvolveArgs ea;
  auto* evolve = app.add_subcommand("evolve", "Perturbed wave train by direct simulation");
  evolve->add_option("--wave", ea.wave, "Wave file")->required();
  evolve->add_option("--periods", ea.periods, "Periods in the domain")->check(CLI::Range(1, 1 << 16));
  evolve->add_option("--amplitude", ea.amplitude, "Perturbation amplitude");
  evolve->add_option("--T", ea.T, "Final time")->check(CLI::PositiveNumber);
  evolve->add_option("--dt", ea.dt, "Time step")->check(CLI::PositiveNumber);
  evolve->add_option("--grid", ea.grid, "Fourier points (0: automatic)")->check(CLI::NonNegativeNumber);
  evolve->add_option("--width", ea.width, "Perturbation width (0: two periods)")->check(CLI::NonNegativeNumber);
  evolve->add_option("--kind", ea.kind, "Perturbation shape")->check(CLI::IsMember({"gaussian", "compact"}));
  evolve->add_option("--snapshots", ea.snapshots, "Stored times, spread geometrically")->check(CLI::Range(3, 100000));
  evolve->add_option("--t-fit", ea.t_fit, "Start of the decay-fit window (0: pulse separation time)")
      ->check(CLI::NonNegativeNumber);
  evolve->add_option("--growth-horizon", ea.growth_horizon, "Time up to which residual growth is reported");
  evolve->add_option("--nhill", ea.nhill, "Hill truncation for the critical fit")->check(CLI::Range(1, 2000));
  evolve->add_flag("--dump-snapshots", ea.dump_snapshots, "Write binary snapshots");

  ReportArgs ra;
  auto* report = app.add_subcommand("report", "HTML summary of an output directory");
  report->add_option("--dir", ra.dir, "Directory to summarize (default <out>)");

  std::set<std::string> commands, flags{"richardson", "dump-snapshots"};
  for (const auto* sub : app.get_subcommands({})) commands.insert(sub->get_name());

  try {
    std::vector<std::string> args(argv, argv + argc);
    args = merge_config(args, commands, flags);
    std::vector<std::string> reversed(args.rbegin(), args.rend() - 1);
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  }

  try {
    ctx.out = out_dir;
    const CLI::App* active = app.get_subcommands().front();
    ctx.command = active->get_name();
    ctx.resolved = resolve(&app);
    const nlohmann::json local = resolve(active);
    for (const auto& [k, v] : local.items()) ctx.resolved[k] = v;
    if (ctx.command == "profile") run_profile(ctx, pa);
    else if (ctx.command == "continue") run_continue(ctx, ca);
    else if (ctx.command == "spectrum") run_spectrum(ctx, sa);
    else if (ctx.command == "band") run_band(ctx, ba);
    else if (ctx.command == "whitham") run_whitham(ctx, wa);
    else if (ctx.command == "evolve") run_evolve(ctx, ea);
    else if (ctx.command == "report") run_report(ctx, ra);
    write_manifest(ctx);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const gks::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
