#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace gks::cli {

/// Maps to exit code 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunContext {
  std::string command;
  std::filesystem::path out;
  int workers = 1;
  std::uint64_t seed = 0;
  nlohmann::json resolved;  // flag name -> value as parsed
};

struct ProfileArgs {
  double epsilon = 0.2;
  double delta = 1.0;
  std::string f = "0,0,0.5";
  double omega = 0.13;
  double c = 0.0;
  double u0 = 0.0;
  int modes = 32;
  std::string gauge = "cosine";
  std::string output;
};

struct ContinueArgs {
  std::string from;
  std::string omega_range;
  std::string c_range;
  double max_step = 2e-3;
  std::string output;
};

struct SpectrumArgs {
  std::string wave;
  int nxi = 64;
  int ncluster = 12;
  int nhill = 48;
  double track_fraction = 0.1;
  double re_min = -1.0;
};

struct BandArgs {
  std::string family;
  int nxi = 64;
  int ncluster = 12;
  int nhill = 48;
  int panels = 4;
};

struct WhithamArgs {
  std::string family;
  int nxi = 64;
  int ncluster = 12;
  int nhill = 48;
  bool richardson = false;
  double tolerance = 1e-2;
};

struct EvolveArgs {
  std::string wave;
  int periods = 128;
  double amplitude = 1e-2;
  double T = 500.0;
  double dt = 0.05;
  int grid = 0;
  double width = 0.0;
  std::string kind = "gaussian";
  int snapshots = 60;
  double t_fit = 50.0;
  double growth_horizon = 200.0;
  int nhill = 48;
  bool dump_snapshots = false;
};

struct ReportArgs {
  std::string dir;
};

void run_profile(const RunContext& ctx, const ProfileArgs& a);
void run_continue(const RunContext& ctx, const ContinueArgs& a);
void run_spectrum(const RunContext& ctx, const SpectrumArgs& a);
void run_band(const RunContext& ctx, const BandArgs& a);
void run_whitham(const RunContext& ctx, const WhithamArgs& a);
void run_evolve(const RunContext& ctx, const EvolveArgs& a);
void run_report(const RunContext& ctx, const ReportArgs& a);

/// "a:b:n" -> n equispaced values from a to b.
std::vector<double> parse_range(const std::string& text, const std::string& flag);
/// Comma-separated polynomial coefficients, constant term first.
std::vector<double> parse_coefficients(const std::string& text, const std::string& flag);

/// Writes <out>/<command>.manifest.json.
void write_manifest(const RunContext& ctx);

}  // namespace gks::cli
