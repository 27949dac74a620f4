#pragma once

// Experiment runners behind the CLI subcommands. Each returns a process exit
// status: 0 success/locked, 1 I/O or configuration error, 2 completed but unlocked.

#include "tanlock/scenario.hpp"

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string_view>
#include <vector>

namespace tanlock {

inline constexpr std::string_view tool_version = "tanlock 1.0.0";

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_unlocked = 2;

/// Column order is part of the file format.
inline constexpr std::string_view trace_csv_header = "k,t,ratio,edge,f_dco,s_sin,s_cos,phi,v_filter,saturated,degenerate";
inline constexpr std::string_view phase_plane_csv_header = "phi_k,phi_k1";
inline constexpr std::string_view jitter_sweep_csv_header = "snr_db,tdtl_rms_s,ndtl_rms_s,ratio";
inline constexpr std::string_view lockrange_csv_header = "variant,W,locked,acquisition_samples";

void write_trace_csv(std::ostream& out, const Trace& trace);
void write_phase_plane_csv(std::ostream& out, const Trace& trace);

/// trace.csv, phase_plane.csv and report.json.
int run_scenario(const Scenario& scenario, const std::filesystem::path& out_dir, std::ostream& log);

/// TDTL and NDTL over the scenario's SNR grid: jitter_sweep.csv and compare.json.
int run_compare(const Scenario& scenario, const std::filesystem::path& out_dir, std::ostream& log);

/// Linear W grid of `steps` points in [w_min, w_max]; a single step yields {w_min}.
std::vector<double> linear_grid(double w_min, double w_max, std::size_t steps);

/// Both variants over the W grid: lockrange.csv and lockrange.json.
int run_lockrange(const Scenario& scenario, const std::vector<double>& w_grid, const std::filesystem::path& out_dir,
                  std::ostream& log);

/// First `count` DIV values of the carry accumulator.
std::vector<int> divider_sequence(const DividerConfig& config, std::size_t count);

} // namespace tanlock
