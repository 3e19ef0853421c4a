#include "dmclusts/harness.hpp"

#include "dmclusts/dmf.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

namespace dmclusts {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

const char* method_name(Method m) {
    switch (m) {
    case Method::DMClusts: return "dmclusts";
    case Method::Dmf: return "dmf";
    case Method::SemiNmf: return "seminmf";
    }
    return "?";
}

std::string meta_json(Method method, const SolverConfig& cfg, int iterations, double wall_seconds,
                      bool diverged) {
    ordered_json m;
    m["method"] = method_name(method);
    m["seed"] = cfg.seed;
    m["clusterings"] = cfg.num_clusterings;
    m["layers"] = cfg.layer_sizes;
    m["clusters"] = cfg.clusters;
    m["lambda"] = cfg.lambda;
    m["beta"] = cfg.beta;
    m["r"] = cfg.r;
    m["max_iter"] = cfg.max_iter;
    m["tol"] = cfg.tol;
    m["iterations"] = iterations;
    m["wall_seconds"] = wall_seconds;
    m["diverged"] = diverged;
    m["quality_space"] = "concatenated_raw_features";
    return m.dump();
}

struct Stats {
    double mean = 0, std_dev = 0;
};

Stats mean_std(const std::vector<double>& xs) {
    Stats s;
    if (xs.empty())
        return s;
    for (double x : xs)
        s.mean += x;
    s.mean /= static_cast<double>(xs.size());
    double var = 0;
    for (double x : xs)
        var += (x - s.mean) * (x - s.mean);
    s.std_dev = std::sqrt(var / static_cast<double>(xs.size()));
    return s;
}

} // namespace

RunOutcome run_once(const MultiViewDataset& ds, const PlantedTruth* truth, Method method,
                    const SolverConfig& cfg) {
    RunOutcome out;
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<Matrix> reps;
    try {
        if (method == Method::DMClusts) {
            FitResult res = fit(ds, cfg);
            reps = res.state.H;
            out.alpha = res.state.alpha;
            out.history = std::move(res.history);
            out.iterations = res.iterations;
        } else if (method == Method::Dmf) {
            DmfResult res = dmf_fit(ds, cfg);
            reps = res.state.H;
            out.alpha = Matrix::Constant(cfg.num_clusterings, ds.num_views(),
                                         1.0 / static_cast<double>(ds.num_views()));
            for (double total : res.history) {
                ObjectiveBreakdown o;
                o.total = total;
                o.reconstruction = Matrix::Constant(1, 1, total);
                out.history.push_back(o);
            }
            out.iterations = res.iterations;
        } else {
            SemiNmfResult res =
                seminmf_fit(concat_views(ds), cfg.layer_sizes.front(), cfg.max_iter, cfg.tol, cfg.seed);
            reps = {res.H};
            out.alpha = Matrix::Constant(1, ds.num_views(), 1.0 / static_cast<double>(ds.num_views()));
            out.iterations = cfg.max_iter;
        }
    } catch (const std::runtime_error& e) {
        out.diverged = true;
        out.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        out.report.meta_json = meta_json(method, cfg, out.iterations, out.wall_seconds, true);
        return out;
    }
    std::vector<Clustering> clusterings = extract_clusterings(reps, cfg.clusters, cfg.seed);
    out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.report = evaluate(ds, clusterings, truth);
    out.report.meta_json = meta_json(method, cfg, out.iterations, out.wall_seconds, false);
    return out;
}

fs::path cmd_synth(const SynthConfig& cfg) {
    std::vector<StructureSpec> spec(static_cast<std::size_t>(cfg.structures),
                                    StructureSpec{cfg.clusters, cfg.views_per, cfg.dim,
                                                  cfg.separation, cfg.sigma});
    auto [ds, truth] = generate_synthetic(cfg.n, spec, cfg.seed);
    if (cfg.noise_view > 0)
        ds = add_noise_view(ds, cfg.noise_view, cfg.seed + 0x9e3779b97f4a7c15ULL);
    return save_dataset(ds, cfg.out, &truth);
}

namespace {

struct RunBatch {
    std::vector<RunOutcome> completed;
    int attempted = 0;
};

RunBatch run_repeats(const MultiViewDataset& ds, const PlantedTruth* truth, const ExperimentConfig& cfg) {
    RunBatch batch;
    batch.attempted = cfg.repeats;
    for (int i = 0; i < cfg.repeats; ++i) {
        SolverConfig sc = cfg.solver;
        sc.seed = cfg.solver.seed + static_cast<std::uint64_t>(i);
        RunOutcome run = run_once(ds, truth, cfg.method, sc);
        if (!run.diverged)
            batch.completed.push_back(std::move(run));
    }
    return batch;
}

void write_text(const fs::path& file, const std::string& text) {
    std::ofstream out(file);
    out << text;
    if (!out)
        throw std::runtime_error("cannot write " + file.string());
}

ordered_json aggregate_json(const RunBatch& batch) {
    auto collect = [&](auto getter) {
        std::vector<double> xs;
        for (const RunOutcome& r : batch.completed)
            xs.push_back(getter(r));
        return mean_std(xs);
    };
    ordered_json agg;
    agg["completed"] = batch.completed.size();
    agg["repeats"] = batch.attempted;
    ordered_json metrics;
    const std::pair<const char*, Stats> entries[] = {
        {"sc", collect([](const RunOutcome& r) { return r.report.mean_sc; })},
        {"di", collect([](const RunOutcome& r) { return r.report.mean_di; })},
        {"nmi", collect([](const RunOutcome& r) { return r.report.mean_nmi; })},
        {"jc", collect([](const RunOutcome& r) { return r.report.mean_jc; })},
    };
    for (const auto& [name, st] : entries)
        metrics[name] = {{"mean", st.mean}, {"std", st.std_dev}};
    agg["metrics"] = metrics;
    if (!batch.completed.empty() && !batch.completed.front().report.truth_match.empty()) {
        ordered_json truth = ordered_json::array();
        const std::size_t nt = batch.completed.front().report.truth_match.size();
        for (std::size_t t = 0; t < nt; ++t) {
            Stats st = collect([t](const RunOutcome& r) { return r.report.truth_match[t].nmi; });
            truth.push_back({{"labeling", t}, {"nmi_mean", st.mean}, {"nmi_std", st.std_dev}});
        }
        agg["truth_match"] = truth;
    }
    return agg;
}

void write_alpha_csv(const RunBatch& batch, const fs::path& file) {
    if (batch.completed.empty())
        return;
    Matrix mean = Matrix::Zero(batch.completed.front().alpha.rows(), batch.completed.front().alpha.cols());
    for (const RunOutcome& r : batch.completed)
        mean += r.alpha;
    mean /= static_cast<double>(batch.completed.size());
    std::ofstream out(file);
    out << "clustering";
    for (Eigen::Index v = 0; v < mean.cols(); ++v)
        out << ",view" << v;
    out << '\n';
    out.precision(12);
    for (Eigen::Index m = 0; m < mean.rows(); ++m) {
        out << m;
        for (Eigen::Index v = 0; v < mean.cols(); ++v)
            out << ',' << mean(m, v);
        out << '\n';
    }
}

void write_objective_csv(const RunBatch& batch, const fs::path& file) {
    if (batch.completed.empty() || batch.completed.front().history.empty())
        return;
    std::ofstream out(file);
    out << "iteration,total,reconstruction,redundancy\n";
    out.precision(12);
    const auto& history = batch.completed.front().history;
    for (std::size_t t = 0; t < history.size(); ++t)
        out << t << ',' << history[t].total << ',' << history[t].reconstruction.sum() << ','
            << history[t].redundancy << '\n';
}

} // namespace

int cmd_run(const ExperimentConfig& cfg) {
    PlantedTruth truth;
    MultiViewDataset ds = load_dataset(cfg.dataset, &truth);
    if (cfg.zscore)
        ds = zscore(ds);
    cfg.solver.validate(&ds);

    fs::create_directories(cfg.out);
    RunBatch batch = run_repeats(ds, truth.labelings.empty() ? nullptr : &truth, cfg);
    for (std::size_t i = 0; i < batch.completed.size(); ++i)
        write_text(cfg.out / ("run" + std::to_string(i) + ".json"),
                   report_to_json(batch.completed[i].report) + "\n");
    write_text(cfg.out / "aggregate.json", aggregate_json(batch).dump(2) + "\n");
    write_alpha_csv(batch, cfg.out / "alpha.csv");
    write_objective_csv(batch, cfg.out / "objective.csv");
    if (batch.completed.empty()) {
        std::cerr << "all " << cfg.repeats << " repeats diverged\n";
        return 3;
    }
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
    if (cfg.sweep != "lambda" && cfg.sweep != "r" && cfg.sweep != "beta")
        throw std::invalid_argument("sweep parameter must be one of lambda, r, beta");
    if (cfg.sweep_values.empty())
        throw std::invalid_argument("sweep requires at least one value");

    PlantedTruth truth;
    MultiViewDataset ds = load_dataset(cfg.dataset, &truth);
    if (cfg.zscore)
        ds = zscore(ds);

    fs::create_directories(cfg.out);
    std::ofstream out(cfg.out / "sweep.csv");
    out << cfg.sweep << ",mean_di,std_di,mean_diversity,std_diversity,note\n";
    out.precision(12);
    for (double value : cfg.sweep_values) {
        ExperimentConfig point = cfg;
        if (cfg.sweep == "lambda")
            point.solver.lambda = value;
        else if (cfg.sweep == "r")
            point.solver.r = value;
        else
            point.solver.beta = value;
        try {
            point.solver.validate(&ds);
            RunBatch batch = run_repeats(ds, truth.labelings.empty() ? nullptr : &truth, point);
            if (batch.completed.empty())
                throw std::runtime_error("all repeats diverged");
            std::vector<double> di, div;
            for (const RunOutcome& r : batch.completed) {
                di.push_back(r.report.mean_di);
                div.push_back(1.0 - r.report.mean_nmi);
            }
            Stats sdi = mean_std(di), sdiv = mean_std(div);
            out << value << ',' << sdi.mean << ',' << sdi.std_dev << ',' << sdiv.mean << ','
                << sdiv.std_dev << ",\n";
        } catch (const std::exception& e) {
            out << value << ",nan,nan,nan,nan," << e.what() << '\n';
        }
    }
    if (!out)
        throw std::runtime_error("cannot write sweep.csv");
    return 0;
}

int cmd_eval(const fs::path& manifest, const std::vector<fs::path>& label_files,
             const fs::path& out_json, bool apply_zscore) {
    MultiViewDataset ds = load_dataset(manifest);
    if (apply_zscore)
        ds = zscore(ds);
    std::vector<Clustering> clusterings;
    for (const fs::path& file : label_files) {
        Clustering c;
        c.labels = read_labels(file);
        if (static_cast<Eigen::Index>(c.labels.size()) != ds.n())
            throw std::invalid_argument("label file length mismatch: " + file.string());
        c.k = *std::max_element(c.labels.begin(), c.labels.end()) + 1;
        clusterings.push_back(std::move(c));
    }
    EvaluationReport rep = evaluate(ds, clusterings);
    write_text(out_json, report_to_json(rep) + "\n");
    return 0;
}

} // namespace dmclusts
