#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mmpos/imaging.hpp"
#include "mmpos/mapping.hpp"
#include "mmpos/metrics.hpp"
#include "mmpos/scenario.hpp"
#include "mmpos/sync.hpp"

namespace mmpos {

struct RunReport {
    double sigma_true = 0.0;
    double sigma_hat = 0.0;
    std::vector<double> rep_a_error;  // per path, meters vs true virtual reps
    std::vector<double> rep_b_error;
    double objective = 0.0;  // angle-search spread, meters
    double hausdorff = 0.0;
    double directed_hausdorff = 0.0;  // mapped -> ground truth
    double t_simulate = 0.0, t_sync = 0.0, t_image = 0.0, t_map = 0.0;  // seconds
    std::vector<std::string> warnings;

    std::string to_json() const;
};

struct RunArtifacts {
    RunReport report;
    std::vector<std::vector<Vec3>> vp_occupancy;  // per path
    std::vector<Vec3> mapped;                     // fused real-position set
    std::vector<Vec3> ground_truth;               // TV lattice
    SyncEstimate sync;
    MappedPosition mapping;
};

// Full pipeline: simulate -> synchronize -> image each path -> recover the
// mirror geometry -> map and fuse -> score against the TV lattice.
RunArtifacts run_scenario(const ScenarioConfig& cfg);

// Writes point clouds and the JSON report under out_dir (created if needed).
void write_artifacts(const std::string& out_dir, const RunArtifacts& art,
                     bool dump_signals, const ScenarioConfig& cfg);

struct SweepResult {
    std::vector<SweepRow> rows;
    std::vector<SweepStats> stats;
    std::string csv;
    // For aperture-size sweeps: empirical vs analytic location covariance.
    std::vector<double> empirical_trace;
    std::vector<double> analytic_trace;
};

// Monte-Carlo sweep over tv_distance, num_mirrors, or M.
SweepResult run_sweep(const ScenarioConfig& base, const std::string& parameter,
                      const std::vector<double>& values, std::size_t seeds);

// Resolution and sampling report for a configuration.
std::string resolve_report(const ScenarioConfig& cfg);

}  // namespace mmpos
