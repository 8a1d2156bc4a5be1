#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddpole/baselines.hpp"
#include "ddpole/plant.hpp"
#include "ddpole/synthesis.hpp"

namespace ddpole {

struct ExperimentConfig {
    std::vector<Index> T_values{10, 15, 20, 25, 30, 40, 50};
    std::vector<Index> n_values{4, 6, 8, 10};
    std::vector<double> noise_variances{1.0, 10.0, 100.0};
    int trials = 100;
    int seeds_per_T = 10;
    Index mc_T = 150; // data length per Monte Carlo trial, clamped to n + m + 2
    std::uint64_t master_seed = 1;

    void validate() const;
};

struct TrialRecord {
    int trial_id = 0;
    Index n = 0;
    Index T = 0;
    double sigma_e2 = 0.0;
    std::string method; // data_driven | model_based | raw_unstable | prestabilized
    double placement_error = 0.0;
    double wall_time = 0.0; // seconds; in-memory only, not emitted (determinism)
    std::string status = "ok"; // "ok" or "failed:<reason>"

    bool ok() const { return status == "ok"; }
};

struct ReactorReport {
    Matrix K;
    CVector desired;
    CVector achieved_spectrum; // of the true closed loop A - B K
    double placement_error = 0.0;
    double final_state_norm = 0.0; // norm of the last recorded state
    GainResult gain;
};

namespace bench {

// Reactor stabilization: T = 10 Gaussian-input open-loop data, place
// {0.5, 0.3, 0.0002, 0.0065}, errors measured against the exact plant.
ReactorReport run_reactor(std::uint64_t master_seed = 1);

// Accuracy vs. trajectory length, with a raw-unstable arm and an arm fed by a
// pre-stabilized closed loop (gain from the T = 10 raw run of the same seed).
std::vector<TrialRecord> run_vary_t(const ExperimentConfig& cfg);

// Noisy-data comparison of the data-driven formula against model-based
// placement on a least-squares identified model.
std::vector<TrialRecord> run_montecarlo(const ExperimentConfig& cfg);

// Writes <dir>/records.csv and <dir>/summary.json; byte-stable for identical
// records and config.
void emit_results(const std::vector<TrialRecord>& records, const ExperimentConfig& cfg,
                  const std::string& experiment, const std::string& out_dir);

nlohmann::json summarize(const std::vector<TrialRecord>& records, const ExperimentConfig& cfg,
                         const std::string& experiment);

} // namespace bench

} // namespace ddpole
