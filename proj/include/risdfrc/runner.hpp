#pragma once

#include <string>
#include <vector>

#include "risdfrc/config.hpp"
#include "risdfrc/penalty.hpp"
#include "risdfrc/phase.hpp"

namespace risdfrc {

enum class Scheme { Proposed, Random, ComOnly };

std::string scheme_name(Scheme s);

/// Outcome of one alternating-optimization run on one channel realization.
struct TrialResult {
    std::vector<double> sum_rate_trace;  // Eq.-(5) rate after each AO iteration
    double sum_rate_nat = 0.0;           // final, re-evaluated at the feasible point
    double radar_snr_db = 0.0;
    double power = 0.0;
    bool feasible = false;
    int iters_used = 0;
    double wall_time_s = 0.0;
    BeamformerSet beams;
    PhaseVector theta;
};

struct SweepPoint {
    double axis_value = 0.0;
    Scheme scheme = Scheme::Proposed;
    std::uint64_t seed = 0;
    TrialResult trial;
    bool failed = false;
    std::string error;
};

struct SweepResult {
    std::string axis;
    std::vector<SweepPoint> points;
};

/// Per-(axis value, scheme) aggregate of the final sum rate over seeds.
struct SweepSummaryRow {
    double axis_value = 0.0;
    Scheme scheme = Scheme::Proposed;
    int n_seeds = 0;
    double mean_rate = 0.0;
    double std_rate = 0.0;
};

namespace runner {

/// Feasible starting point: best of up to 50 unit-modulus phase draws with
/// right-singular-space beams at full power. `feasible` in the result flags
/// whether the SNR threshold was met.
struct InitResult {
    BeamformerSet beams;
    PhaseVector theta;
    double snr = 0.0;
    bool feasible = false;
};
InitResult init_feasible(const ScenarioConfig& config, const ChannelSet& channels,
                         RngStream& rng);

/// Full alternating optimization (decoders, weights, penalty beamforming,
/// phase step) for one scheme.
TrialResult run_ao(const ScenarioConfig& config, const ChannelSet& channels, Scheme scheme,
                   PenaltyTrace* penalty_trace = nullptr);

/// Axis sweep over all three schemes with paired per-seed channels.
SweepResult sweep(const ScenarioConfig& config, const std::string& axis,
                  const std::vector<double>& values, int n_seeds,
                  const std::vector<Scheme>& schemes);

/// CSV serialization of a sweep (header + one row per point, sorted).
std::string sweep_csv(const SweepResult& result, bool include_wall_time = true);

/// Seed-aggregated view of a sweep (failed points are skipped).
std::vector<SweepSummaryRow> summarize(const SweepResult& result);

/// Beampattern rows for optimized solutions on a half-degree grid.
struct BeampatternSeries {
    double gamma0_db = 0.0;
    int l_elems = 0;
    std::uint64_t seed = 0;
    std::vector<double> theta_deg;
    std::vector<double> gain_db_normalized;
};
std::vector<BeampatternSeries> beampattern_study(const ScenarioConfig& config,
                                                 const std::vector<double>& gamma0_list,
                                                 const std::vector<int>& l_list,
                                                 int n_seeds);
std::string beampattern_csv(const std::vector<BeampatternSeries>& series);

/// Per-iteration AO trace CSV (sum rate vs iteration per L and seed).
std::string ao_trace_csv(const ScenarioConfig& config, const std::vector<int>& l_list,
                         int n_seeds);

/// Penalty convergence trace CSV for the convergence experiment.
std::string penalty_trace_csv(const ScenarioConfig& config, const std::vector<int>& l_list);

/// Quantization sweep: proposed solution per seed, phases quantized to each
/// bit depth and the rate re-evaluated without re-optimization.
SweepResult sweep_bits(const ScenarioConfig& config, const std::vector<int>& bits_list,
                       int n_seeds);

}  // namespace runner
}  // namespace risdfrc
