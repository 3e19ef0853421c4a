#include "dmclusts/dataset.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace dmclusts {

using json = nlohmann::json;
namespace fs = std::filesystem;

void MultiViewDataset::validate() const {
    if (views.empty())
        throw std::invalid_argument("dataset has no views");
    const Eigen::Index cols = views.front().cols();
    if (cols < 2)
        throw std::invalid_argument("dataset needs at least 2 samples");
    for (std::size_t v = 0; v < views.size(); ++v) {
        const Matrix& X = views[v];
        if (X.rows() < 1)
            throw std::invalid_argument("view " + std::to_string(v) + " is empty");
        if (X.cols() != cols)
            throw std::invalid_argument("sample count mismatch: view " + std::to_string(v) +
                                        " has " + std::to_string(X.cols()) + " columns, expected " +
                                        std::to_string(cols));
        if (!X.allFinite())
            throw std::invalid_argument("view " + std::to_string(v) + " has non-finite entries");
    }
    if (!view_names.empty() && view_names.size() != views.size())
        throw std::invalid_argument("view_names size mismatch");
}

Matrix read_csv_matrix(const fs::path& file) {
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open matrix file: " + file.string());
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t pos = 0;
            double v;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw std::runtime_error("non-numeric cell '" + cell + "' in " + file.string());
            }
            while (pos < cell.size() && std::isspace(static_cast<unsigned char>(cell[pos])))
                ++pos;
            if (pos != cell.size())
                throw std::runtime_error("non-numeric cell '" + cell + "' in " + file.string());
            row.push_back(v);
        }
        if (!rows.empty() && row.size() != rows.front().size())
            throw std::runtime_error("ragged CSV row in " + file.string());
        rows.push_back(std::move(row));
    }
    if (rows.empty() || rows.front().empty())
        throw std::runtime_error("empty matrix file: " + file.string());
    // rows on disk are samples; transpose to d x n
    Matrix m(static_cast<Eigen::Index>(rows.front().size()), static_cast<Eigen::Index>(rows.size()));
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            m(i, j) = rows[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)];
    return m;
}

void write_csv_matrix(const Matrix& m, const fs::path& file) {
    std::ofstream out(file);
    if (!out)
        throw std::runtime_error("cannot write matrix file: " + file.string());
    out.precision(17);
    for (Eigen::Index j = 0; j < m.cols(); ++j) { // one row per sample
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            if (i)
                out << ',';
            out << m(i, j);
        }
        out << '\n';
    }
    if (!out)
        throw std::runtime_error("write failure: " + file.string());
}

std::vector<int> read_labels(const fs::path& file) {
    std::ifstream in(file);
    if (!in)
        throw std::runtime_error("cannot open label file: " + file.string());
    std::vector<int> labels;
    int v;
    while (in >> v)
        labels.push_back(v);
    return labels;
}

void write_labels(const std::vector<int>& labels, const fs::path& file) {
    std::ofstream out(file);
    if (!out)
        throw std::runtime_error("cannot write label file: " + file.string());
    for (int v : labels)
        out << v << '\n';
}

MultiViewDataset load_dataset(const fs::path& manifest_path, PlantedTruth* truth) {
    std::ifstream in(manifest_path);
    if (!in)
        throw std::runtime_error("cannot open manifest: " + manifest_path.string());
    json j;
    in >> j;
    const fs::path dir = manifest_path.parent_path();

    MultiViewDataset ds;
    const Eigen::Index n = j.at("n").get<Eigen::Index>();
    for (const auto& view : j.at("views")) {
        Matrix m = read_csv_matrix(dir / view.at("file").get<std::string>());
        if (view.contains("d") && m.rows() != view.at("d").get<Eigen::Index>())
            throw std::runtime_error("view '" + view.at("name").get<std::string>() +
                                     "' dimension disagrees with manifest");
        ds.views.push_back(std::move(m));
        ds.view_names.push_back(view.at("name").get<std::string>());
    }
    ds.validate();
    if (ds.n() != n)
        throw std::runtime_error("sample count mismatch: manifest says " + std::to_string(n) +
                                 ", views have " + std::to_string(ds.n()));
    if (truth && j.contains("truth")) {
        truth->labelings.clear();
        truth->view_assignment.clear();
        for (const auto& t : j.at("truth")) {
            auto labels = read_labels(dir / t.at("labels_file").get<std::string>());
            if (static_cast<Eigen::Index>(labels.size()) != n)
                throw std::runtime_error("label file length mismatch");
            truth->labelings.push_back(std::move(labels));
            truth->view_assignment.push_back(t.at("views").get<std::vector<int>>());
        }
    }
    return ds;
}

MultiViewDataset load_dataset(const fs::path& manifest_path) {
    return load_dataset(manifest_path, nullptr);
}

fs::path save_dataset(const MultiViewDataset& ds, const fs::path& dir, const PlantedTruth* truth) {
    ds.validate();
    fs::create_directories(dir);
    json j;
    j["n"] = ds.n();
    j["views"] = json::array();
    for (int v = 0; v < ds.num_views(); ++v) {
        std::string name =
            ds.view_names.empty() ? "view" + std::to_string(v) : ds.view_names[static_cast<std::size_t>(v)];
        std::string file = "view" + std::to_string(v) + ".csv";
        write_csv_matrix(ds.views[static_cast<std::size_t>(v)], dir / file);
        j["views"].push_back({{"name", name}, {"file", file}, {"d", ds.views[static_cast<std::size_t>(v)].rows()}});
    }
    if (truth && !truth->labelings.empty()) {
        j["truth"] = json::array();
        for (std::size_t t = 0; t < truth->labelings.size(); ++t) {
            std::string file = "labels" + std::to_string(t) + ".csv";
            write_labels(truth->labelings[t], dir / file);
            j["truth"].push_back({{"labels_file", file}, {"views", truth->view_assignment[t]}});
        }
    }
    fs::path manifest = dir / "manifest.json";
    std::ofstream out(manifest);
    out << j.dump(2) << '\n';
    if (!out)
        throw std::runtime_error("cannot write manifest: " + manifest.string());
    return manifest;
}

namespace {

// k orthonormal directions in R^d via QR of a seeded Gaussian matrix.
Matrix random_orthonormal(int d, int k, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss;
    Matrix g(d, k);
    for (Eigen::Index i = 0; i < g.rows(); ++i)
        for (Eigen::Index j = 0; j < g.cols(); ++j)
            g(i, j) = gauss(rng);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, k);
    return q;
}

} // namespace

std::pair<MultiViewDataset, PlantedTruth> generate_synthetic(int n, const std::vector<StructureSpec>& spec,
                                                             std::uint64_t seed) {
    if (spec.empty())
        throw std::invalid_argument("empty structure spec");
    int total_clusters = 0;
    for (const auto& s : spec) {
        if (s.k < 2)
            throw std::invalid_argument("structure cluster count must be >= 2");
        if (s.num_views < 1)
            throw std::invalid_argument("structure needs at least one view");
        if (s.dim < s.k)
            throw std::invalid_argument("view dimension must be >= cluster count");
        if (s.separation <= 0 || s.sigma < 0)
            throw std::invalid_argument("separation must be > 0 and sigma >= 0");
        total_clusters += s.k;
    }
    if (n < total_clusters)
        throw std::invalid_argument("n smaller than total cluster count");

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    MultiViewDataset ds;
    PlantedTruth truth;
    int view_index = 0;
    for (std::size_t s = 0; s < spec.size(); ++s) {
        const StructureSpec& st = spec[s];
        std::uniform_int_distribution<int> pick(0, st.k - 1);
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (auto& l : labels)
            l = pick(rng);
        std::vector<int> assigned;
        for (int w = 0; w < st.num_views; ++w) {
            // cluster means on scaled orthonormal directions: pairwise
            // distance separation * sqrt(2) / sqrt(2) = separation
            Matrix dirs = random_orthonormal(st.dim, st.k, rng);
            Matrix means = dirs * (st.separation / std::sqrt(2.0));
            Matrix X(st.dim, n);
            for (int j = 0; j < n; ++j) {
                X.col(j) = means.col(labels[static_cast<std::size_t>(j)]);
                for (int i = 0; i < st.dim; ++i)
                    X(i, j) += st.sigma * gauss(rng);
            }
            ds.views.push_back(std::move(X));
            ds.view_names.push_back("s" + std::to_string(s) + "v" + std::to_string(w));
            assigned.push_back(view_index++);
        }
        truth.labelings.push_back(std::move(labels));
        truth.view_assignment.push_back(std::move(assigned));
    }
    ds.validate();
    return {std::move(ds), std::move(truth)};
}

MultiViewDataset add_noise_view(const MultiViewDataset& ds, int d, std::uint64_t seed) {
    ds.validate();
    if (d < 1)
        throw std::invalid_argument("noise view dimension must be >= 1");
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    Matrix X(d, ds.n());
    for (Eigen::Index j = 0; j < X.cols(); ++j)
        for (Eigen::Index i = 0; i < X.rows(); ++i)
            X(i, j) = gauss(rng);
    MultiViewDataset out = ds;
    out.views.push_back(std::move(X));
    if (out.view_names.size() == ds.views.size())
        out.view_names.push_back("noise");
    return out;
}

MultiViewDataset zscore(const MultiViewDataset& ds) {
    ds.validate();
    MultiViewDataset out = ds;
    for (Matrix& X : out.views) {
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const double mean = X.row(i).mean();
            X.row(i).array() -= mean;
            const double sd = std::sqrt(X.row(i).squaredNorm() / static_cast<double>(X.cols()));
            if (sd > 0)
                X.row(i) /= sd;
        }
    }
    return out;
}

} // namespace dmclusts
