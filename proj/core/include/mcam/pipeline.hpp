#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "mcam/cluster.hpp"
#include "mcam/metrics.hpp"
#include "mcam/synthetic.hpp"
#include "mcam/tensor.hpp"

namespace mcam {

enum class Variant { Mcam1, Mcam2 };
enum class Engine { AP, SC };

std::string to_string(Variant v);
std::string to_string(Engine e);
Variant parse_variant(const std::string& name);
Engine parse_engine(const std::string& name);

/// Full configuration of one clustering run. `k` is required iff engine is
/// SC. Empty output_dir means no files are written.
struct RunConfig {
    std::filesystem::path input;
    Variant variant = Variant::Mcam1;
    Engine engine = Engine::AP;
    std::optional<std::array<int, 3>> k;
    std::optional<int> r_override;
    APParams ap;
    std::uint64_t seed = 0;
    std::filesystem::path output_dir;
    int workers = 0;  // 0: MCAM_WORKERS env var, then hardware concurrency
};

struct ModeRunResult {
    int mode = 0;
    int r = 0;
    int cluster_count = 0;
    bool converged = true;
    std::vector<int> labels;
    double seconds = 0.0;
};

struct RunReport {
    std::array<ModeRunResult, 3> modes;
    double total_seconds = 0.0;

    [[nodiscard]] MultiwayClustering clustering() const {
        return {{modes[0].labels, modes[1].labels, modes[2].labels}};
    }
};

void validate_config(const RunConfig& cfg);

/// The end-to-end method on a loaded tensor: per mode, slice spectra ->
/// effective dimension (or override) -> affinity matrix -> clustering engine.
RunReport run_mcam(const Tensor3& t, const RunConfig& cfg);

/// As above but loads cfg.input and, when output_dir is set, writes
/// labels_mode{1,2,3}.csv, affinity_mode{1,2,3}.csv and report.json.
/// Everything written is byte-deterministic for a fixed (config, seed)
/// except the report's "timings" object.
RunReport run_mcam(const RunConfig& cfg);

/// Serialized report. Keys are sorted; "timings" carries the wall times.
std::string report_json(const RunConfig& cfg, const RunReport& report);

/// Label CSV: header `mode,index,label`.
void save_labels_csv(const ModeRunResult& mode_result,
                     const std::filesystem::path& path);

/// Benchmark sweep over synthetic tensors. Methods come from
///   mcam1-ap, mcam1-sc, mcam2-ap, mcam2-sc, cp-kmeans, tucker-kmeans.
/// Repetition t uses seed = base_seed + t. When r_values is non-empty the
/// MCAM methods run once per forced r; baselines always use decomposition
/// rank `rank` (default: cluster count).
struct SweepSpec {
    std::vector<double> gammas;
    int repetitions = 10;
    std::vector<std::string> methods;
    std::uint64_t base_seed = 0;

    std::size_t dim = 100;
    int cluster_count = 9;
    std::size_t block_size = 11;

    std::vector<int> r_values;         // empty: estimate r from the data
    std::optional<int> rank;           // baseline decomposition rank
    APParams ap;
    int workers = 0;
};

struct SweepCell {
    double gamma = 0.0;
    std::string method;
    int r_mode = 0;        // forced/modal r for MCAM rows, rank d for baselines
    double ari_mean = 0.0;
    double ari_std = 0.0;
    double nmi_mean = 0.0;
    double nmi_std = 0.0;
    int successes = 0;     // repetitions that produced a result
};

std::vector<SweepCell> run_sweep(const SweepSpec& spec);

/// CSV with header gamma,method,ari_mean,ari_std,nmi_mean,nmi_std,r_mode.
/// Cells with no successful repetition leave the statistics empty.
void save_sweep_csv(const std::vector<SweepCell>& cells,
                    const std::filesystem::path& path);

}  // namespace mcam
