// Command-line harness: synth | run | sweep | eval.

#include "dmclusts/harness.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

using namespace dmclusts;

void add_solver_flags(CLI::App* cmd, ExperimentConfig& cfg, std::string& method) {
    cmd->add_option("--dataset", cfg.dataset, "dataset manifest path")->required();
    cmd->add_option("--method", method, "dmclusts | dmf | seminmf")
        ->check(CLI::IsMember({"dmclusts", "dmf", "seminmf"}));
    cmd->add_option("--clusterings", cfg.solver.num_clusterings, "number of alternative clusterings M");
    cmd->add_option("--layers", cfg.solver.layer_sizes, "layer sizes K1,K2,...")->delimiter(',');
    cmd->add_option("--clusters", cfg.solver.clusters, "clusters per clustering k");
    cmd->add_option("--lambda", cfg.solver.lambda, "diversity weight");
    cmd->add_option("--beta", cfg.solver.beta, "balance coefficient in [0,1]");
    cmd->add_option("--r", cfg.solver.r, "weight-distribution exponent");
    cmd->add_option("--max-iter", cfg.solver.max_iter, "maximum sweeps");
    cmd->add_option("--tol", cfg.solver.tol, "relative objective tolerance");
    cmd->add_option("--repeats", cfg.repeats, "seeded runs to aggregate");
    cmd->add_option("--seed", cfg.solver.seed, "base RNG seed");
    cmd->add_option("--out", cfg.out, "output directory")->required();
    cmd->add_flag("--zscore", cfg.zscore, "per-feature z-score at load");
    cmd->add_flag("--no-pretrain", [&cfg](std::int64_t) { cfg.solver.pretrain = false; },
                  "skip layer-wise pretraining");
}

Method parse_method(const std::string& name) {
    if (name == "dmf")
        return Method::Dmf;
    if (name == "seminmf")
        return Method::SemiNmf;
    return Method::DMClusts;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"multi-view multiple clusterings via layer-wise weighted deep semi-NMF"};
    app.require_subcommand(1);
    app.set_config("--config");

    SynthConfig synth;
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate a synthetic multi-view dataset");
    synth_cmd->add_option("--n", synth.n, "sample count");
    synth_cmd->add_option("--structures", synth.structures, "number of planted labelings");
    synth_cmd->add_option("--views-per", synth.views_per, "views encoding each labeling");
    synth_cmd->add_option("--clusters", synth.clusters, "clusters per labeling");
    synth_cmd->add_option("--d", synth.dim, "features per view");
    synth_cmd->add_option("--separation", synth.separation, "cluster-mean separation");
    synth_cmd->add_option("--sigma", synth.sigma, "per-coordinate noise");
    synth_cmd->add_option("--noise-view", synth.noise_view, "dimension of an appended Gaussian noise view");
    synth_cmd->add_option("--seed", synth.seed, "RNG seed");
    synth_cmd->add_option("--out", synth.out, "output directory")->required();

    ExperimentConfig run_cfg;
    std::string run_method = "dmclusts";
    CLI::App* run_cmd = app.add_subcommand("run", "repeated seeded runs with aggregation");
    add_solver_flags(run_cmd, run_cfg, run_method);

    ExperimentConfig sweep_cfg;
    std::string sweep_method = "dmclusts";
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "parameter sweep emitting plot-ready CSV");
    add_solver_flags(sweep_cmd, sweep_cfg, sweep_method);
    sweep_cmd->add_option("--sweep", sweep_cfg.sweep, "parameter to sweep: lambda | r | beta")->required();
    sweep_cmd->add_option("--values", sweep_cfg.sweep_values, "sweep values")->delimiter(',')->required();

    std::filesystem::path eval_manifest, eval_out = "report.json";
    std::vector<std::filesystem::path> eval_labels;
    bool eval_zscore = false;
    CLI::App* eval_cmd = app.add_subcommand("eval", "metrics on existing label files");
    eval_cmd->add_option("--dataset", eval_manifest, "dataset manifest path")->required();
    eval_cmd->add_option("--labels", eval_labels, "label files, one clustering each")->required();
    eval_cmd->add_option("--out", eval_out, "output report path");
    eval_cmd->add_flag("--zscore", eval_zscore, "per-feature z-score at load");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*synth_cmd) {
            std::cout << cmd_synth(synth).string() << '\n';
            return 0;
        }
        if (*run_cmd) {
            run_cfg.method = parse_method(run_method);
            return cmd_run(run_cfg);
        }
        if (*sweep_cmd) {
            sweep_cfg.method = parse_method(sweep_method);
            return cmd_sweep(sweep_cfg);
        }
        return cmd_eval(eval_manifest, eval_labels, eval_out, eval_zscore);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
