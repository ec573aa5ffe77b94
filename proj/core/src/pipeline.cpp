#include "mcam/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <tuple>

#include <json.hpp>

#include "mcam/affinity.hpp"
#include "mcam/baselines.hpp"
#include "mcam/error.hpp"
#include "mcam/parallel.hpp"
#include "mcam/spectra.hpp"
#include "mcam/tensor_io.hpp"

namespace mcam {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

AffinityMatrix build_affinity(const ModeSpectra& spectra, Variant variant, int r) {
    return variant == Variant::Mcam1 ? affinity_mcam1(spectra, r)
                                     : affinity_mcam2(spectra, r);
}

struct ModeArtifacts {
    ModeRunResult result;
    AffinityMatrix affinity;
};

ModeArtifacts run_one_mode(const Tensor3& t, const RunConfig& cfg, int mode) {
    const auto start = Clock::now();
    const ModeSpectra spectra = compute_mode_spectra(t, mode, 0, cfg.workers);
    const int r = cfg.r_override ? *cfg.r_override : effective_dimension(spectra);

    ModeArtifacts out;
    out.affinity = build_affinity(spectra, cfg.variant, r);

    ModeClustering clustering;
    if (cfg.engine == Engine::SC) {
        clustering = spectral_clustering(out.affinity, (*cfg.k)[mode - 1], cfg.seed);
    } else {
        clustering = affinity_propagation(out.affinity, cfg.ap);
    }

    out.result.mode = mode;
    out.result.r = r;
    out.result.cluster_count = clustering.cluster_count;
    out.result.converged = clustering.converged;
    out.result.labels = std::move(clustering.labels);
    out.result.seconds = seconds_since(start);
    return out;
}

std::array<ModeArtifacts, 3> run_all_modes(const Tensor3& t, const RunConfig& cfg) {
    validate_config(cfg);
    std::array<ModeArtifacts, 3> artifacts;
    for (int mode = 1; mode <= 3; ++mode) {
        try {
            artifacts[mode - 1] = run_one_mode(t, cfg, mode);
        } catch (const Error& e) {
            throw Error(e.kind(),
                        "mode " + std::to_string(mode) + ": " + e.what());
        }
    }
    return artifacts;
}

RunReport to_report(std::array<ModeArtifacts, 3>&& artifacts) {
    RunReport report;
    double total = 0.0;
    for (int mode = 0; mode < 3; ++mode) {
        report.modes[mode] = std::move(artifacts[mode].result);
        total += report.modes[mode].seconds;
    }
    report.total_seconds = total;
    return report;
}

}  // namespace

std::string to_string(Variant v) {
    return v == Variant::Mcam1 ? "mcam1" : "mcam2";
}

std::string to_string(Engine e) { return e == Engine::AP ? "ap" : "sc"; }

Variant parse_variant(const std::string& name) {
    if (name == "mcam1") return Variant::Mcam1;
    if (name == "mcam2") return Variant::Mcam2;
    throw Error(ErrorKind::Contract, "unknown variant '" + name + "'");
}

Engine parse_engine(const std::string& name) {
    if (name == "ap") return Engine::AP;
    if (name == "sc") return Engine::SC;
    throw Error(ErrorKind::Contract, "unknown engine '" + name + "'");
}

void validate_config(const RunConfig& cfg) {
    if (cfg.engine == Engine::SC && !cfg.k) {
        throw Error(ErrorKind::Contract,
                    "engine sc requires the cluster counts k = (k1,k2,k3)");
    }
    if (cfg.k) {
        for (int k : *cfg.k) {
            if (k < 1) {
                throw Error(ErrorKind::Contract, "cluster counts must be positive");
            }
        }
    }
    if (cfg.r_override && *cfg.r_override < 1) {
        throw Error(ErrorKind::Contract, "r override must be at least 1");
    }
}

RunReport run_mcam(const Tensor3& t, const RunConfig& cfg) {
    return to_report(run_all_modes(t, cfg));
}

RunReport run_mcam(const RunConfig& cfg) {
    validate_config(cfg);
    const Tensor3 t = load_tensor_any(cfg.input);
    auto artifacts = run_all_modes(t, cfg);

    if (!cfg.output_dir.empty()) {
        std::filesystem::create_directories(cfg.output_dir);
        for (int mode = 1; mode <= 3; ++mode) {
            const auto& a = artifacts[mode - 1];
            save_labels_csv(a.result, cfg.output_dir /
                                          ("labels_mode" + std::to_string(mode) +
                                           ".csv"));
            save_affinity_csv(a.affinity,
                              cfg.output_dir / ("affinity_mode" +
                                                std::to_string(mode) + ".csv"));
        }
    }

    RunReport report = to_report(std::move(artifacts));
    if (!cfg.output_dir.empty()) {
        std::ofstream out(cfg.output_dir / "report.json", std::ios::trunc);
        if (!out) {
            throw Error(ErrorKind::Format, "cannot write report.json");
        }
        out << report_json(cfg, report) << '\n';
    }
    return report;
}

std::string report_json(const RunConfig& cfg, const RunReport& report) {
    nlohmann::json config;
    config["input"] = cfg.input.string();
    config["variant"] = to_string(cfg.variant);
    config["engine"] = to_string(cfg.engine);
    config["k"] = cfg.k ? nlohmann::json(*cfg.k) : nlohmann::json(nullptr);
    config["r_override"] =
        cfg.r_override ? nlohmann::json(*cfg.r_override) : nlohmann::json(nullptr);
    config["ap"] = {
        {"damping", cfg.ap.damping},
        {"max_iterations", cfg.ap.max_iterations},
        {"convergence_window", cfg.ap.convergence_window},
        {"preference", cfg.ap.preference ? nlohmann::json(*cfg.ap.preference)
                                         : nlohmann::json("median")},
    };
    config["seed"] = cfg.seed;
    config["workers"] = resolve_worker_count(cfg.workers);
    config["output_dir"] = cfg.output_dir.string();

    nlohmann::json modes = nlohmann::json::array();
    nlohmann::json timings;
    for (const ModeRunResult& m : report.modes) {
        std::map<int, int> sizes;
        for (int l : m.labels) ++sizes[l];
        nlohmann::json cluster_sizes = nlohmann::json::array();
        for (const auto& [label, count] : sizes) cluster_sizes.push_back(count);
        modes.push_back({
            {"mode", m.mode},
            {"r", m.r},
            {"cluster_count", m.cluster_count},
            {"converged", m.converged},
            {"cluster_sizes", cluster_sizes},
        });
        timings["mode" + std::to_string(m.mode) + "_seconds"] = m.seconds;
    }
    timings["total_seconds"] = report.total_seconds;

    nlohmann::json doc;
    doc["format"] = "mcam-report-v1";
    doc["config"] = config;
    doc["modes"] = modes;
    doc["timings"] = timings;
    return doc.dump(2);
}

void save_labels_csv(const ModeRunResult& mode_result,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Format, "cannot open " + path.string() + " for writing");
    }
    out << "mode,index,label\n";
    for (std::size_t i = 0; i < mode_result.labels.size(); ++i) {
        out << mode_result.mode << ',' << i << ',' << mode_result.labels[i] << '\n';
    }
    if (!out) {
        throw Error(ErrorKind::Format, "write failed for " + path.string());
    }
}

namespace {

struct MethodRow {
    std::string method;
    bool is_mcam = false;
    Variant variant = Variant::Mcam1;
    Engine engine = Engine::AP;
    std::optional<int> forced_r;  // MCAM rows only
    int rank = 0;                 // baseline rows only
};

struct RepOutcome {
    bool ok = false;
    double ari = 0.0;
    double nmi = 0.0;
    std::vector<int> r_estimates;  // one per tensor mode, MCAM rows only
};

constexpr const char* kSweepMethods[] = {"mcam1-ap", "mcam1-sc",  "mcam2-ap",
                                         "mcam2-sc", "cp-kmeans", "tucker-kmeans"};

std::vector<MethodRow> build_rows(const SweepSpec& spec) {
    if (spec.methods.empty()) {
        throw Error(ErrorKind::Contract, "sweep needs at least one method");
    }
    if (spec.repetitions < 1) {
        throw Error(ErrorKind::Contract, "sweep needs at least one repetition");
    }
    if (spec.gammas.empty()) {
        throw Error(ErrorKind::Contract, "sweep needs at least one gamma value");
    }

    std::vector<std::string> methods = spec.methods;
    std::sort(methods.begin(), methods.end());
    methods.erase(std::unique(methods.begin(), methods.end()), methods.end());

    std::vector<MethodRow> rows;
    for (const std::string& name : methods) {
        if (std::find(std::begin(kSweepMethods), std::end(kSweepMethods), name) ==
            std::end(kSweepMethods)) {
            throw Error(ErrorKind::Contract, "unknown sweep method '" + name + "'");
        }
        MethodRow base;
        base.method = name;
        if (name == "cp-kmeans" || name == "tucker-kmeans") {
            base.rank = spec.rank.value_or(spec.cluster_count);
            rows.push_back(base);
            continue;
        }
        base.is_mcam = true;
        base.variant = parse_variant(name.substr(0, 5));
        base.engine = parse_engine(name.substr(6));
        if (spec.r_values.empty()) {
            rows.push_back(base);
        } else {
            for (int r : spec.r_values) {
                base.forced_r = r;
                rows.push_back(base);
            }
        }
    }
    return rows;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::vector<SweepCell> run_sweep(const SweepSpec& spec) {
    const std::vector<MethodRow> rows = build_rows(spec);
    const bool any_mcam =
        std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.is_mcam; });

    std::vector<double> gammas = spec.gammas;
    std::sort(gammas.begin(), gammas.end());
    gammas.erase(std::unique(gammas.begin(), gammas.end()), gammas.end());

    const std::size_t reps = static_cast<std::size_t>(spec.repetitions);
    const std::size_t tasks = gammas.size() * reps;
    // Engines that need k get the signal cluster count; uncovered indices are
    // scored through the ground truth's background label.
    const int k_clusters = spec.cluster_count;

    // outcomes[row][gamma * reps + rep]
    std::vector<std::vector<RepOutcome>> outcomes(
        rows.size(), std::vector<RepOutcome>(tasks));

    parallel_for(
        tasks,
        [&](std::size_t task) {
            const std::size_t gi = task / reps;
            const std::size_t rep = task % reps;
            const std::uint64_t seed = spec.base_seed + rep;

            const SyntheticSpec synth = uniform_block_spec(
                spec.dim, spec.cluster_count, spec.block_size, gammas[gi],
                /*noise=*/true, seed);
            const auto [tensor, truth] = generate(synth);

            std::array<ModeSpectra, 3> spectra;
            if (any_mcam) {
                for (int mode = 1; mode <= 3; ++mode) {
                    spectra[mode - 1] = compute_mode_spectra(tensor, mode, 0, 1);
                }
            }

            std::optional<CPModel> cp;
            std::optional<TuckerModel> tucker;

            for (std::size_t row = 0; row < rows.size(); ++row) {
                const MethodRow& method = rows[row];
                RepOutcome& outcome = outcomes[row][task];
                try {
                    std::array<std::vector<int>, 3> labels;
                    if (method.is_mcam) {
                        for (int mode = 1; mode <= 3; ++mode) {
                            const ModeSpectra& sp = spectra[mode - 1];
                            const int estimated = effective_dimension(sp);
                            const int r = method.forced_r.value_or(estimated);
                            const AffinityMatrix affinity =
                                build_affinity(sp, method.variant, r);
                            ModeClustering clustering =
                                method.engine == Engine::SC
                                    ? spectral_clustering(affinity, k_clusters, seed)
                                    : affinity_propagation(affinity, spec.ap);
                            labels[mode - 1] = std::move(clustering.labels);
                            outcome.r_estimates.push_back(estimated);
                        }
                    } else if (method.method == "cp-kmeans") {
                        if (!cp) cp = cp_als(tensor, method.rank, 100, seed);
                        for (int mode = 1; mode <= 3; ++mode) {
                            labels[mode - 1] =
                                factor_clustering(*cp, mode, k_clusters, seed);
                        }
                    } else {
                        if (!tucker) {
                            tucker = hooi(tensor,
                                          {method.rank, method.rank, method.rank},
                                          50, seed);
                        }
                        for (int mode = 1; mode <= 3; ++mode) {
                            labels[mode - 1] =
                                factor_clustering(*tucker, mode, k_clusters, seed);
                        }
                    }

                    double ari_sum = 0.0, nmi_sum = 0.0;
                    for (int mode = 0; mode < 3; ++mode) {
                        ari_sum += ari(labels[mode], truth.labels[mode]);
                        nmi_sum += nmi(labels[mode], truth.labels[mode]);
                    }
                    outcome.ari = ari_sum / 3.0;
                    outcome.nmi = nmi_sum / 3.0;
                    outcome.ok = true;
                } catch (const Error&) {
                    outcome.ok = false;  // missing cell; the sweep continues
                }
            }
        },
        spec.workers);

    std::vector<SweepCell> cells;
    cells.reserve(rows.size() * gammas.size());
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        for (std::size_t row = 0; row < rows.size(); ++row) {
            const MethodRow& method = rows[row];
            SweepCell cell;
            cell.gamma = gammas[gi];
            cell.method = method.method;

            std::vector<double> aris, nmis;
            std::map<int, int> r_votes;
            for (std::size_t rep = 0; rep < reps; ++rep) {
                const RepOutcome& outcome = outcomes[row][gi * reps + rep];
                if (!outcome.ok) continue;
                aris.push_back(outcome.ari);
                nmis.push_back(outcome.nmi);
                for (int r : outcome.r_estimates) ++r_votes[r];
            }
            cell.successes = static_cast<int>(aris.size());
            cell.ari_mean = mean_of(aris);
            cell.ari_std = sample_std(aris, cell.ari_mean);
            cell.nmi_mean = mean_of(nmis);
            cell.nmi_std = sample_std(nmis, cell.nmi_mean);

            if (!method.is_mcam) {
                cell.r_mode = method.rank;
            } else if (method.forced_r) {
                cell.r_mode = *method.forced_r;
            } else {
                int best_r = 0, best_votes = -1;
                for (const auto& [r, votes] : r_votes) {
                    if (votes > best_votes) {
                        best_votes = votes;
                        best_r = r;
                    }
                }
                cell.r_mode = best_r;
            }
            cells.push_back(std::move(cell));
        }
    }

    std::sort(cells.begin(), cells.end(), [](const SweepCell& a, const SweepCell& b) {
        return std::tie(a.gamma, a.method, a.r_mode) <
               std::tie(b.gamma, b.method, b.r_mode);
    });
    return cells;
}

void save_sweep_csv(const std::vector<SweepCell>& cells,
                    const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Format, "cannot open " + path.string() + " for writing");
    }
    out << "gamma,method,ari_mean,ari_std,nmi_mean,nmi_std,r_mode\n";
    char buf[32];
    auto field = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    for (const SweepCell& c : cells) {
        std::snprintf(buf, sizeof(buf), "%g", c.gamma);
        out << buf << ',' << c.method << ',';
        if (c.successes > 0) {
            out << field(c.ari_mean) << ',' << field(c.ari_std) << ','
                << field(c.nmi_mean) << ',' << field(c.nmi_std);
        } else {
            out << ",,,";
        }
        out << ',' << c.r_mode << '\n';
    }
    if (!out) {
        throw Error(ErrorKind::Format, "write failed for " + path.string());
    }
}

}  // namespace mcam
