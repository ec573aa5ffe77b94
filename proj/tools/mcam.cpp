// mcam: multiway clustering of 3-order tensors from the command line.
//
// Subcommands: generate (synthetic block tensors), cluster (one clustering
// run), sweep (benchmark grid over synthetic data), evaluate (metrics for a
// clustering against a tensor and optional ground truth).
//
// Exit codes: 0 success, 2 configuration error, 3 data error, 4 numeric error.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcam/affinity.hpp"
#include "mcam/error.hpp"
#include "mcam/metrics.hpp"
#include "mcam/pipeline.hpp"
#include "mcam/spectra.hpp"
#include "mcam/synthetic.hpp"
#include "mcam/tensor_io.hpp"

namespace {

int exit_code_for(mcam::ErrorKind kind) {
    switch (kind) {
        case mcam::ErrorKind::Contract: return 2;
        case mcam::ErrorKind::Bounds:
        case mcam::ErrorKind::Format: return 3;
        case mcam::ErrorKind::Numeric:
        case mcam::ErrorKind::Degenerate: return 4;
    }
    return 1;
}

mcam::APParams ap_params_from(double damping, int max_iterations,
                              int convergence_window,
                              const std::string& preference) {
    mcam::APParams params;
    params.damping = damping;
    params.max_iterations = max_iterations;
    params.convergence_window = convergence_window;
    if (preference != "median") {
        try {
            params.preference = std::stod(preference);
        } catch (const std::exception&) {
            throw mcam::Error(mcam::ErrorKind::Contract,
                              "preference must be 'median' or a number, got '" +
                                  preference + "'");
        }
    }
    return params;
}

// Label CSV (mode,index,label) holding one or more modes.
void read_labels_into(const std::filesystem::path& path,
                      std::array<std::vector<int>, 3>& labels) {
    std::ifstream in(path);
    if (!in) {
        throw mcam::Error(mcam::ErrorKind::Format, "cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != "mode,index,label") {
        throw mcam::Error(mcam::ErrorKind::Format,
                          path.string() + ": expected header mode,index,label");
    }
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        int mode, label;
        std::size_t index;
        char c1, c2;
        std::istringstream ss(line);
        if (!(ss >> mode >> c1 >> index >> c2 >> label) || c1 != ',' ||
            c2 != ',' || mode < 1 || mode > 3) {
            throw mcam::Error(mcam::ErrorKind::Format,
                              path.string() + ":" + std::to_string(lineno) +
                                  ": bad label row");
        }
        auto& vec = labels[mode - 1];
        if (vec.size() <= index) vec.resize(index + 1, -1);
        vec[index] = label;
    }
}

struct SilhouetteRange {
    int k_min = 0;
    int k_max = 0;
};

SilhouetteRange parse_range(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw mcam::Error(mcam::ErrorKind::Contract,
                          "silhouette range must look like kmin:kmax");
    }
    try {
        return {std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
    } catch (const std::exception&) {
        throw mcam::Error(mcam::ErrorKind::Contract,
                          "silhouette range must look like kmin:kmax");
    }
}

int run_generate(const std::string& spec_path, std::size_t dim, int clusters,
                 std::size_t block_size, double gamma, bool no_noise,
                 std::uint64_t seed, const std::string& output,
                 const std::string& truth_path) {
    mcam::SyntheticSpec spec;
    if (!spec_path.empty()) {
        spec = mcam::load_spec_json(spec_path);
    } else {
        spec = mcam::uniform_block_spec(dim, clusters, block_size, gamma,
                                        !no_noise, seed);
    }
    const auto [tensor, truth] = mcam::generate(spec);
    mcam::save_tensor(tensor, output);
    std::cout << "wrote " << output << " (" << tensor.dims()[0] << "x"
              << tensor.dims()[1] << "x" << tensor.dims()[2] << ")\n";
    if (!truth_path.empty()) {
        mcam::save_ground_truth_csv(truth, truth_path);
        std::cout << "wrote " << truth_path << "\n";
    }
    return 0;
}

int run_cluster(const mcam::RunConfig& cfg) {
    const mcam::RunReport report = mcam::run_mcam(cfg);
    for (const mcam::ModeRunResult& m : report.modes) {
        std::cout << "mode " << m.mode << ": r=" << m.r
                  << " clusters=" << m.cluster_count
                  << (m.converged ? "" : " (not converged)") << " in "
                  << m.seconds << "s\n";
    }
    if (!cfg.output_dir.empty()) {
        std::cout << "outputs in " << cfg.output_dir.string() << "\n";
    }
    return 0;
}

int run_evaluate(const std::string& tensor_path,
                 const std::vector<std::string>& label_files,
                 const std::string& labels_dir, const std::string& truth_path,
                 const std::string& silhouette_range,
                 const std::string& variant_name, std::optional<int> r_override,
                 std::uint64_t seed, const std::string& output) {
    const mcam::Tensor3 tensor = mcam::load_tensor_any(tensor_path);

    std::array<std::vector<int>, 3> labels;
    if (!labels_dir.empty()) {
        for (int mode = 1; mode <= 3; ++mode) {
            read_labels_into(std::filesystem::path(labels_dir) /
                                 ("labels_mode" + std::to_string(mode) + ".csv"),
                             labels);
        }
    }
    for (const std::string& file : label_files) read_labels_into(file, labels);
    const bool have_labels = !labels[0].empty() || !labels[1].empty() ||
                             !labels[2].empty();
    if (have_labels) {
        for (int mode = 0; mode < 3; ++mode) {
            if (labels[mode].size() != tensor.dims()[mode]) {
                throw mcam::Error(mcam::ErrorKind::Contract,
                                  "labels for mode " + std::to_string(mode + 1) +
                                      " do not cover the tensor extent");
            }
            for (int l : labels[mode]) {
                if (l < 0) {
                    throw mcam::Error(mcam::ErrorKind::Format,
                                      "missing label rows for mode " +
                                          std::to_string(mode + 1));
                }
            }
        }
    }

    nlohmann::json records = nlohmann::json::array();

    if (have_labels && !truth_path.empty()) {
        const mcam::GroundTruth truth = mcam::load_ground_truth_csv(truth_path);
        for (int mode = 0; mode < 3; ++mode) {
            records.push_back({{"metric", "ari"},
                               {"mode", mode + 1},
                               {"value", mcam::ari(labels[mode], truth.labels[mode])},
                               {"params", nlohmann::json::object()}});
            records.push_back(
                {{"metric", "nmi"},
                 {"mode", mode + 1},
                 {"value", mcam::nmi(labels[mode], truth.labels[mode])},
                 {"params", {{"normalization", "arithmetic-mean"}}}});
        }
    }

    if (have_labels) {
        const mcam::MultiwayClustering mc{labels};
        const mcam::BlockRmseResult rmse = mcam::block_rmse(tensor, mc);
        records.push_back({{"metric", "block_rmse_mean"},
                           {"mode", 0},
                           {"value", rmse.mean},
                           {"params", {{"blocks", rmse.per_block.size()}}}});
        for (std::size_t b = 0; b < rmse.per_block.size(); ++b) {
            records.push_back({{"metric", "block_rmse"},
                               {"mode", 0},
                               {"value", rmse.per_block[b]},
                               {"params", {{"block", rmse.block_ids[b]}}}});
        }
    }

    if (!silhouette_range.empty()) {
        const SilhouetteRange range = parse_range(silhouette_range);
        const mcam::Variant variant = mcam::parse_variant(variant_name);
        for (int mode = 1; mode <= 3; ++mode) {
            const mcam::ModeSpectra spectra = mcam::compute_mode_spectra(tensor, mode);
            const int r = r_override ? *r_override
                                     : mcam::effective_dimension(spectra);
            const mcam::AffinityMatrix affinity =
                variant == mcam::Variant::Mcam1 ? mcam::affinity_mcam1(spectra, r)
                                                : mcam::affinity_mcam2(spectra, r);
            const mcam::SilhouetteSelection sel =
                mcam::silhouette_select_k(affinity, range.k_min, range.k_max, seed);
            for (const auto& [k, score] : sel.scores) {
                records.push_back({{"metric", "silhouette"},
                                   {"mode", mode},
                                   {"value", score},
                                   {"params",
                                    {{"k", k},
                                     {"variant", mcam::to_string(variant)},
                                     {"r", r}}}});
            }
            records.push_back({{"metric", "silhouette_best_k"},
                               {"mode", mode},
                               {"value", sel.best_k},
                               {"params", {{"variant", mcam::to_string(variant)}}}});
        }
    }

    const std::string text = records.dump(2);
    if (output.empty() || output == "-") {
        std::cout << text << "\n";
    } else {
        std::ofstream out(output, std::ios::trunc);
        if (!out) {
            throw mcam::Error(mcam::ErrorKind::Format, "cannot write " + output);
        }
        out << text << "\n";
        std::cout << "wrote " << output << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multiway clustering of 3-order tensors via slice affinity "
                 "matrices"};
    app.require_subcommand(1);

    // generate
    auto* generate = app.add_subcommand("generate", "Generate a synthetic block tensor");
    std::string gen_spec, gen_output, gen_truth;
    std::size_t gen_dim = 100, gen_block = 11;
    int gen_clusters = 9;
    double gen_gamma = 55.0;
    bool gen_no_noise = false;
    std::uint64_t gen_seed = 0;
    generate->add_option("--spec", gen_spec, "Spec JSON file (overrides layout flags)");
    generate->add_option("--dim", gen_dim, "Cubic dimension (default 100)");
    generate->add_option("--clusters", gen_clusters, "Blocks per mode (default 9)");
    generate->add_option("--block-size", gen_block, "Indices per block (default 11)");
    generate->add_option("--gamma", gen_gamma, "Signal weight (default 55)");
    generate->add_flag("--no-noise", gen_no_noise, "Skip the Gaussian noise term");
    generate->add_option("--seed", gen_seed, "Noise seed");
    generate->add_option("--output", gen_output, "Output tensor (T3B1)")->required();
    generate->add_option("--truth", gen_truth, "Ground truth CSV path");

    // cluster
    auto* cluster = app.add_subcommand("cluster", "Cluster a tensor along all modes");
    std::string cl_input, cl_variant = "mcam1", cl_engine = "ap",
                cl_preference = "median", cl_output;
    std::vector<int> cl_k;
    std::optional<int> cl_r;
    double cl_damping = 0.5;
    int cl_max_iter = 200, cl_window = 15;
    std::uint64_t cl_seed = 0;
    cluster->add_option("--input", cl_input, "Tensor file (T3B1, or CSV triples)")
        ->required();
    cluster->add_option("--variant", cl_variant, "mcam1 (cross terms) or mcam2");
    cluster->add_option("--engine", cl_engine, "ap (no k needed) or sc");
    cluster->add_option("--k", cl_k, "Cluster counts k1,k2,k3 (sc only)")
        ->delimiter(',');
    cluster->add_option("--r", [&cl_r](const std::vector<std::string>& v) {
        cl_r = std::stoi(v.front());
        return true;
    }, "Override the effective dimension r");
    cluster->add_option("--damping", cl_damping, "AP damping in [0.5, 1)");
    cluster->add_option("--max-iterations", cl_max_iter, "AP iteration budget");
    cluster->add_option("--convergence-window", cl_window,
                        "AP stable-exemplar window");
    cluster->add_option("--preference", cl_preference,
                        "AP preference: 'median' or a number");
    cluster->add_option("--seed", cl_seed, "Seed for k-means restarts");
    cluster->add_option("--output", cl_output, "Output directory")->required();

    // sweep
    auto* sweep = app.add_subcommand("sweep",
                                     "Benchmark methods over synthetic tensors");
    std::vector<double> sw_gammas;
    std::vector<std::string> sw_methods;
    std::vector<int> sw_r_values;
    std::optional<int> sw_rank;
    int sw_reps = 10, sw_clusters = 9;
    std::size_t sw_dim = 100, sw_block = 11;
    std::uint64_t sw_seed = 0;
    double sw_damping = 0.5;
    int sw_max_iter = 200, sw_window = 15;
    std::string sw_preference = "median", sw_output;
    sweep->add_option("--gammas", sw_gammas, "Signal weights, e.g. 30,55,80")
        ->required()
        ->delimiter(',');
    sweep->add_option("--methods", sw_methods,
                      "Of: mcam1-ap mcam1-sc mcam2-ap mcam2-sc cp-kmeans "
                      "tucker-kmeans")
        ->required()
        ->delimiter(',');
    sweep->add_option("--reps", sw_reps, "Repetitions per cell (default 10)");
    sweep->add_option("--base-seed", sw_seed, "Repetition t uses base-seed + t");
    sweep->add_option("--dim", sw_dim, "Cubic dimension (default 100)");
    sweep->add_option("--clusters", sw_clusters, "Blocks per mode (default 9)");
    sweep->add_option("--block-size", sw_block, "Indices per block (default 11)");
    sweep->add_option("--force-r", sw_r_values,
                      "Force r values for the MCAM methods, e.g. 1,2,3")
        ->delimiter(',');
    sweep->add_option("--rank", [&sw_rank](const std::vector<std::string>& v) {
        sw_rank = std::stoi(v.front());
        return true;
    }, "Baseline decomposition rank (default: cluster count)");
    sweep->add_option("--damping", sw_damping, "AP damping");
    sweep->add_option("--max-iterations", sw_max_iter, "AP iteration budget");
    sweep->add_option("--convergence-window", sw_window, "AP window");
    sweep->add_option("--preference", sw_preference, "AP preference");
    sweep->add_option("--output", sw_output, "Sweep CSV path")->required();

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate",
                                        "Score a clustering against a tensor");
    std::string ev_tensor, ev_labels_dir, ev_truth, ev_silhouette,
        ev_variant = "mcam1", ev_output;
    std::vector<std::string> ev_labels;
    std::optional<int> ev_r;
    std::uint64_t ev_seed = 0;
    evaluate->add_option("--tensor", ev_tensor, "Tensor file")->required();
    evaluate->add_option("--labels", ev_labels, "Label CSV files (mode,index,label)")
        ->delimiter(',');
    evaluate->add_option("--labels-dir", ev_labels_dir,
                         "Directory with labels_mode{1,2,3}.csv");
    evaluate->add_option("--truth", ev_truth, "Ground truth CSV for ARI/NMI");
    evaluate->add_option("--silhouette", ev_silhouette,
                         "Silhouette k range, e.g. 2:10");
    evaluate->add_option("--variant", ev_variant, "Affinity variant for silhouette");
    evaluate->add_option("--r", [&ev_r](const std::vector<std::string>& v) {
        ev_r = std::stoi(v.front());
        return true;
    }, "Override r for the silhouette affinity");
    evaluate->add_option("--seed", ev_seed, "Seed for spectral clustering");
    evaluate->add_option("--output", ev_output, "Metrics JSON path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (generate->parsed()) {
            return run_generate(gen_spec, gen_dim, gen_clusters, gen_block,
                                gen_gamma, gen_no_noise, gen_seed, gen_output,
                                gen_truth);
        }
        if (cluster->parsed()) {
            mcam::RunConfig cfg;
            cfg.input = cl_input;
            cfg.variant = mcam::parse_variant(cl_variant);
            cfg.engine = mcam::parse_engine(cl_engine);
            if (!cl_k.empty()) {
                if (cl_k.size() != 3) {
                    throw mcam::Error(mcam::ErrorKind::Contract,
                                      "--k needs exactly three values");
                }
                cfg.k = {{cl_k[0], cl_k[1], cl_k[2]}};
            }
            cfg.r_override = cl_r;
            cfg.ap = ap_params_from(cl_damping, cl_max_iter, cl_window, cl_preference);
            cfg.seed = cl_seed;
            cfg.output_dir = cl_output;
            return run_cluster(cfg);
        }
        if (sweep->parsed()) {
            mcam::SweepSpec spec;
            spec.gammas = sw_gammas;
            spec.repetitions = sw_reps;
            spec.methods = sw_methods;
            spec.base_seed = sw_seed;
            spec.dim = sw_dim;
            spec.cluster_count = sw_clusters;
            spec.block_size = sw_block;
            spec.r_values = sw_r_values;
            spec.rank = sw_rank;
            spec.ap = ap_params_from(sw_damping, sw_max_iter, sw_window, sw_preference);
            const auto cells = mcam::run_sweep(spec);
            mcam::save_sweep_csv(cells, sw_output);
            std::cout << "wrote " << sw_output << " (" << cells.size() << " rows)\n";
            return 0;
        }
        if (evaluate->parsed()) {
            return run_evaluate(ev_tensor, ev_labels, ev_labels_dir, ev_truth,
                                ev_silhouette, ev_variant, ev_r, ev_seed,
                                ev_output);
        }
    } catch (const mcam::Error& e) {
        std::cerr << "error (" << mcam::to_string(e.kind()) << "): " << e.what()
                  << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
