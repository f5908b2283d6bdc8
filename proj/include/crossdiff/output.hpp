#pragma once

// Flat-file outputs: bit-exact CSV (17 significant digits), standalone SVG
// line plots, and JSON serializations of reports and run summaries.

#include <filesystem>
#include <string>

#include "crossdiff/conditions.hpp"
#include "crossdiff/config.hpp"
#include "crossdiff/solver.hpp"

namespace crossdiff {

/// Round-trip-exact decimal form with 17 significant digits (%.17g).
std::string format_float(double v);

/// Columns: step,t,entropy_raw,entropy_normalized,mass1,mass2,min_u3,dissipation,newton_iters,tau
/// One row for the initial state (step 0, tau 0), then every cadence-th step
/// and always the final step.
void write_diagnostics_csv(const std::filesystem::path& file, const RunResult& result,
                           int cadence);

/// Columns: x,u1,u2,w1,w2 at cell centers.
void write_snapshot_csv(const std::filesystem::path& file, const GridState& state);

/// Entropy (raw) versus time, as a standalone SVG line plot.
void write_entropy_plot_svg(const std::filesystem::path& file, const RunResult& result);

/// Final density profiles u1, u2 versus x.
void write_profiles_plot_svg(const std::filesystem::path& file, const GridState& state);

std::string margin_kind_name(MarginKind kind);

/// JSON object text for a single report.
std::string report_to_json(const ConditionReport& report);

/// Machine-readable run summary (status, step counts, conservation figures).
void write_run_summary(const std::filesystem::path& file, const SimConfig& cfg,
                       const RunResult& result, double wall_seconds);

} // namespace crossdiff
