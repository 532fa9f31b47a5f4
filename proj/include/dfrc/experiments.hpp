#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dfrc/designs.hpp"
#include "dfrc/sim.hpp"

namespace dfrc {

inline constexpr const char* kToolVersion = "dfrc 1.0.0";

/// Experiment settings. Powers are in dBm and converted once by to_scenario.
/// Empty sweeps and a zero trial count fall back to per-experiment defaults.
struct ExperimentConfig {
  std::string experiment = "fig2";  // fig2..fig7 | custom
  int n_tx = 16;
  int n_rx = 20;
  int users = 4;
  double power_dbm = 30.0;
  double noise_comm_dbm = 0.0;
  double noise_radar_dbm = 0.0;
  int frame_len = 30;
  double target_angle_deg = 0.0;
  double sinr_db = 15.0;
  double radar_snr_db = 10.0;         // sets |alpha| wherever CRB(theta) is reported
  std::vector<double> sinr_sweep_db;  // x-axis of fig2/5/6
  std::vector<double> snr_sweep_db;   // x-axis of fig4
  std::vector<int> users_sweep;       // x-axis of fig7
  std::vector<int> users_levels;      // series of fig5/6
  std::vector<double> sinr_levels_db; // series of fig7
  double grid_step_deg = 0.5;         // beampattern grid
  double mle_step_deg = 0.05;
  double mle_half_width_deg = 10.0;
  int trials = 0;
  std::uint64_t seed = 1;
  unsigned threads = 0;
  std::string output;
  std::string format = "csv";

  /// Fills empty sweeps and trial counts with the defaults of `experiment`.
  ExperimentConfig resolved() const;
  void validate() const;  // throws ConfigError
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);
std::string config_to_json(const ExperimentConfig& c);

/// FNV-1a 64-bit hash of the canonical JSON of every field that affects numbers.
std::uint64_t config_hash(const ExperimentConfig& c);

/// Scenario with K users whose channels are nested: user k's channel depends
/// only on (seed, k), so growing K only appends rows.
Scenario make_scenario(const ExperimentConfig& c, int users, double sinr_db);

struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<std::pair<std::string, std::string>> metadata;

  void add_row(std::vector<double> row);
  void set_meta(const std::string& key, const std::string& value);
  std::size_t column(const std::string& name) const;
  std::string to_csv() const;
  std::string to_json() const;
};

ResultTable run_fig2(const ExperimentConfig& c);
ResultTable run_fig3(const ExperimentConfig& c);
ResultTable run_fig4(const ExperimentConfig& c);
ResultTable run_fig5(const ExperimentConfig& c);
ResultTable run_fig6(const ExperimentConfig& c);
ResultTable run_fig7(const ExperimentConfig& c);
ResultTable run_custom(const ExperimentConfig& c);

/// Dispatches on c.experiment after resolving defaults.
ResultTable run_experiment(const ExperimentConfig& c);

/// Saved design: scenario, solution and (for the point SDR) multipliers.
std::string solution_to_json(const Scenario& s, const DesignSolution& sol, const std::string& kind);
struct SavedSolution {
  std::string kind;  // "point" | "extended"
  Scenario scenario;
  DesignSolution solution;
};
SavedSolution solution_from_json(const std::string& text);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace dfrc
