#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hetflow/connect.hpp"
#include "hetflow/equilibria.hpp"
#include "hetflow/grid.hpp"
#include "hetflow/model.hpp"

namespace hetflow::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_falsified = 2;

const char* version() noexcept;

/// Every problem found while loading a configuration, one per entry.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

enum class InitialKind { zero, gaussian, random, eigenvector };

struct InitialSpec {
  InitialKind kind = InitialKind::random;
  double amplitude = 1.0;
  double width = 1.0;
  double center = 0.0;
  /// Index of the unstable direction at 0 (eigenvector seeds).
  std::size_t direction = 0;
};

struct ExperimentConfig {
  // [grid]
  double half_width = 20.0;
  std::size_t n_interior = 999;
  DimMode mode = DimMode::line;
  int dimension = 3;

  // [model]
  PotentialSpec alpha;
  PotentialSpec gamma;
  double switch_scale = 1.0;
  Profile forcing;
  DissipativityData dissipativity;

  // [run]
  double dt = 0.05;
  double T = 50.0;
  double r_cap = 1e3;
  std::vector<double> k_list;
  std::uint64_t seed = 1;
  std::size_t series_stride = 1;
  double energy_tol_factor = 1e-8;

  // [spectrum]
  double nu_tilde = 1.0;
  double resonance_tol = 0.0;

  // [evolve]
  InitialSpec initial;

  // [equilibria]
  SeedStrategy seeds;

  // [homotopy]
  std::size_t lambda_points = 11;
  std::size_t homotopy_probes = 4;
  double probe_amplitude = 2.0;
  HomotopyOptions homotopy;

  // [heteroclinic]
  ConnectOptions connect;
  bool write_trajectories = true;

  // [admissibility]
  std::size_t adm_count = 40;
  double adm_R = 0.0;
  double adm_k = 0.0;
  double adm_tau = 1.0;
  double adm_amplitude = 1.0;
  std::size_t adm_window = 10;

  // [convergence]
  double conv_delta = 0.5;
  double conv_T = 5.0;
  std::vector<std::size_t> conv_members{1, 2, 4, 8, 16, 32, 64};
  Well conv_perturbation = Well::gaussian(1.0, 1.0);

  // [certify]
  std::size_t x_samples = 201;
  std::size_t u_samples = 201;
  double u_max = 10.0;
  double u_large_factor = 1e3;

  /// Canonical TOML text after overrides; the source of the config hash.
  std::string canonical;
};

/// Parses TOML text, applies key=value overrides (dotted keys, TOML values;
/// bare words are taken as strings) and validates every field. Throws
/// ConfigError listing all problems, unknown keys included.
ExperimentConfig parse_config(std::string_view text, const std::vector<std::string>& overrides,
                              std::string_view source = "config");
ExperimentConfig load_config(const std::string& path, const std::vector<std::string>& overrides);

/// FNV-1a 64-bit digest of the canonical config, as 16 hex digits.
std::string config_hash(const ExperimentConfig& cfg);

Grid build_grid(const ExperimentConfig& cfg);
NonlinearityModel build_model(const ExperimentConfig& cfg);

struct Invocation {
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::vector<std::string> overrides;
};

const std::vector<std::string>& commands();

/// Runs one subcommand, writing CSV artifacts and summary.txt into out_dir.
/// Returns exit_ok, exit_falsified or exit_error.
int run(const Invocation& inv, std::ostream& out, std::ostream& err);

}  // namespace hetflow::cli
