#include "mcam/synthetic.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcam/error.hpp"
#include "mcam/rng.hpp"

namespace mcam {

namespace {

void validate(const SyntheticSpec& spec) {
    const std::size_t components = spec.clusters[0].size();
    if (components == 0) {
        throw Error(ErrorKind::Contract, "spec has no components");
    }
    const std::size_t min_dim =
        std::min({spec.dims[0], spec.dims[1], spec.dims[2]});
    if (components > min_dim) {
        throw Error(ErrorKind::Contract,
                    "component count exceeds the smallest dimension");
    }
    if (spec.gamma.size() != components) {
        throw Error(ErrorKind::Contract,
                    "gamma length must equal the component count");
    }
    for (double g : spec.gamma) {
        if (!(g > 0.0)) {
            throw Error(ErrorKind::Contract, "gamma weights must be positive");
        }
    }
    for (int mode = 0; mode < 3; ++mode) {
        if (spec.clusters[mode].size() != components) {
            throw Error(ErrorKind::Contract,
                        "all modes must declare the same number of components");
        }
        std::vector<char> seen(spec.dims[mode], 0);
        for (const auto& set : spec.clusters[mode]) {
            if (set.empty()) {
                throw Error(ErrorKind::Contract, "empty cluster index set");
            }
            for (std::size_t idx : set) {
                if (idx >= spec.dims[mode]) {
                    throw Error(ErrorKind::Contract,
                                "cluster index " + std::to_string(idx) +
                                    " out of range in mode " +
                                    std::to_string(mode + 1));
                }
                if (seen[idx]) {
                    throw Error(ErrorKind::Contract,
                                "overlapping cluster index sets in mode " +
                                    std::to_string(mode + 1));
                }
                seen[idx] = 1;
            }
        }
    }
}

}  // namespace

SyntheticSpec uniform_block_spec(std::size_t dim, int count,
                                 std::size_t block_size, double gamma,
                                 bool noise, std::uint64_t seed) {
    if (count < 1 || static_cast<std::size_t>(count) * block_size > dim) {
        throw Error(ErrorKind::Contract,
                    "blocks do not fit: " + std::to_string(count) + " x " +
                        std::to_string(block_size) + " > " +
                        std::to_string(dim));
    }
    SyntheticSpec spec;
    spec.dims = {dim, dim, dim};
    spec.gamma.assign(static_cast<std::size_t>(count), gamma);
    spec.noise = noise;
    spec.seed = seed;
    for (int mode = 0; mode < 3; ++mode) {
        auto& sets = spec.clusters[mode];
        sets.resize(static_cast<std::size_t>(count));
        for (int j = 0; j < count; ++j) {
            for (std::size_t o = 0; o < block_size; ++o) {
                sets[j].push_back(static_cast<std::size_t>(j) * block_size + o);
            }
        }
    }
    return spec;
}

std::pair<Tensor3, GroundTruth> generate(const SyntheticSpec& spec) {
    validate(spec);
    const auto [m1, m2, m3] = spec.dims;
    const std::size_t components = spec.clusters[0].size();

    std::vector<double> values(m1 * m2 * m3, 0.0);
    for (std::size_t j = 0; j < components; ++j) {
        const auto& j1 = spec.clusters[0][j];
        const auto& j2 = spec.clusters[1][j];
        const auto& j3 = spec.clusters[2][j];
        // gamma_j * u(i1) v(i2) w(i3) with indicator/sqrt(size) columns.
        const double cell =
            spec.gamma[j] / (std::sqrt(static_cast<double>(j1.size())) *
                             std::sqrt(static_cast<double>(j2.size())) *
                             std::sqrt(static_cast<double>(j3.size())));
        for (std::size_t i1 : j1)
            for (std::size_t i2 : j2)
                for (std::size_t i3 : j3)
                    values[(i1 * m2 + i2) * m3 + i3] = cell;
    }

    if (spec.noise) {
        Rng rng(spec.seed);
        for (double& v : values) v += rng.normal();
    }

    GroundTruth truth;
    truth.background_label = static_cast<int>(components);
    for (int mode = 0; mode < 3; ++mode) {
        truth.labels[mode].assign(spec.dims[mode], truth.background_label);
        for (std::size_t j = 0; j < components; ++j) {
            for (std::size_t idx : spec.clusters[mode][j]) {
                truth.labels[mode][idx] = static_cast<int>(j);
            }
        }
    }
    return {Tensor3(m1, m2, m3, std::move(values)), std::move(truth)};
}

SyntheticSpec parse_spec_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Format, std::string("invalid spec JSON: ") + e.what());
    }

    try {
        SyntheticSpec spec;
        const auto& dims = doc.at("dims");
        if (!dims.is_array() || dims.size() != 3) {
            throw Error(ErrorKind::Format, "spec JSON: dims must be an array of 3");
        }
        for (int d = 0; d < 3; ++d) spec.dims[d] = dims[d].get<std::size_t>();

        const auto& clusters = doc.at("clusters");
        if (!clusters.is_array() || clusters.size() != 3) {
            throw Error(ErrorKind::Format,
                        "spec JSON: clusters must hold one array per mode");
        }
        for (int mode = 0; mode < 3; ++mode) {
            for (const auto& set : clusters[mode]) {
                spec.clusters[mode].push_back(set.get<std::vector<std::size_t>>());
            }
        }

        const auto& gamma = doc.at("gamma");
        if (gamma.is_number()) {
            spec.gamma.assign(spec.clusters[0].size(), gamma.get<double>());
        } else {
            spec.gamma = gamma.get<std::vector<double>>();
        }
        spec.noise = doc.value("noise", true);
        spec.seed = doc.value("seed", std::uint64_t{0});
        return spec;
    } catch (const Error&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::Format, std::string("spec JSON: ") + e.what());
    }
}

SyntheticSpec load_spec_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Format, "cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_spec_json(buffer.str());
}

void save_ground_truth_csv(const GroundTruth& truth,
                           const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::Format, "cannot open " + path.string() + " for writing");
    }
    out << "mode,index,label\n";
    for (int mode = 0; mode < 3; ++mode) {
        for (std::size_t i = 0; i < truth.labels[mode].size(); ++i) {
            out << (mode + 1) << ',' << i << ',' << truth.labels[mode][i] << '\n';
        }
    }
    if (!out) {
        throw Error(ErrorKind::Format, "write failed for " + path.string());
    }
}

GroundTruth load_ground_truth_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorKind::Format, "cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != "mode,index,label") {
        throw Error(ErrorKind::Format,
                    path.string() + ": expected header mode,index,label");
    }
    GroundTruth truth;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        int mode;
        std::size_t index;
        int label;
        char c1, c2;
        std::istringstream ss(line);
        if (!(ss >> mode >> c1 >> index >> c2 >> label) || c1 != ',' || c2 != ',' ||
            mode < 1 || mode > 3) {
            throw Error(ErrorKind::Format, path.string() + ":" +
                                               std::to_string(lineno) +
                                               ": bad label row");
        }
        auto& labels = truth.labels[mode - 1];
        if (labels.size() <= index) labels.resize(index + 1, -1);
        labels[index] = label;
        truth.background_label = std::max(truth.background_label, label);
    }
    for (int mode = 0; mode < 3; ++mode) {
        for (int l : truth.labels[mode]) {
            if (l < 0) {
                throw Error(ErrorKind::Format,
                            path.string() + ": missing label rows for mode " +
                                std::to_string(mode + 1));
            }
        }
    }
    return truth;
}

}  // namespace mcam
