// Batch experiment harness behind the CLI: synthetic dataset generation,
// repeated seeded runs with mean/std aggregation, and parameter sweeps.

#ifndef DMCLUSTS_HARNESS_HPP
#define DMCLUSTS_HARNESS_HPP

#include "dmclusts/metrics.hpp"
#include "dmclusts/solver.hpp"

#include <filesystem>

namespace dmclusts {

enum class Method { DMClusts, Dmf, SemiNmf };

struct SynthConfig {
    int n = 500;
    int structures = 2;
    int views_per = 2;
    int clusters = 3;
    int dim = 100;
    double separation = 20.0;
    double sigma = 1.0;
    int noise_view = 0; // dimension of an appended standard-Gaussian view; 0 = none
    std::uint64_t seed = 0;
    std::filesystem::path out;
};

struct ExperimentConfig {
    std::filesystem::path dataset;     // manifest path
    Method method = Method::DMClusts;
    SolverConfig solver;
    int repeats = 10;
    bool zscore = false;
    std::filesystem::path out;
    std::string sweep;                 // "lambda" | "r" | "beta", empty = no sweep
    std::vector<double> sweep_values;
};

struct RunOutcome {
    EvaluationReport report;
    Matrix alpha;            // M x V (uniform for baselines)
    std::vector<ObjectiveBreakdown> history;
    bool diverged = false;
    int iterations = 0;
    double wall_seconds = 0.0;
};

/// One seeded solve + k-means extraction + evaluation.
RunOutcome run_once(const MultiViewDataset& ds, const PlantedTruth* truth,
                    Method method, const SolverConfig& cfg);

/// Writes manifest + view/label CSVs; returns the manifest path.
std::filesystem::path cmd_synth(const SynthConfig& cfg);

/// Per-run report JSON, aggregate JSON, alpha.csv and objective.csv under cfg.out.
/// Returns 0 on success, 3 when every repeat diverged.
int cmd_run(const ExperimentConfig& cfg);

/// sweep.csv: one row per value with mean/std DI and mean/std (1-NMI).
int cmd_sweep(const ExperimentConfig& cfg);

/// Metrics on existing label files against a dataset manifest.
int cmd_eval(const std::filesystem::path& manifest,
             const std::vector<std::filesystem::path>& label_files,
             const std::filesystem::path& out_json, bool zscore);

} // namespace dmclusts

#endif
