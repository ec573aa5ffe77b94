#include <doctest.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mcam/error.hpp"
#include "mcam/metrics.hpp"
#include "mcam/pipeline.hpp"
#include "mcam/synthetic.hpp"
#include "mcam/tensor_io.hpp"

using namespace mcam;

namespace {

std::pair<Tensor3, GroundTruth> two_block_tensor() {
    SyntheticSpec spec;
    spec.dims = {8, 8, 8};
    for (int mode = 0; mode < 3; ++mode)
        spec.clusters[mode] = {{0, 1, 2, 3}, {4, 5, 6, 7}};
    spec.gamma = {4.0, 4.0};
    spec.noise = false;
    return generate(spec);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::string strip_timings(const std::string& report) {
    nlohmann::json doc = nlohmann::json::parse(report);
    doc.erase("timings");
    return doc.dump(2);
}

}  // namespace

TEST_CASE("config validation rejects sc without k") {
    RunConfig cfg;
    cfg.engine = Engine::SC;
    try {
        validate_config(cfg);
        FAIL("expected contract error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Contract);
    }
    cfg.k = {{2, 2, 2}};
    CHECK_NOTHROW(validate_config(cfg));
    cfg.r_override = 0;
    CHECK_THROWS_AS(validate_config(cfg), Error);
}

TEST_CASE("variant and engine names parse both ways") {
    CHECK(parse_variant("mcam1") == Variant::Mcam1);
    CHECK(parse_variant(to_string(Variant::Mcam2)) == Variant::Mcam2);
    CHECK(parse_engine("sc") == Engine::SC);
    CHECK(parse_engine(to_string(Engine::AP)) == Engine::AP);
    CHECK_THROWS_AS(parse_variant("mcam3"), Error);
    CHECK_THROWS_AS(parse_engine("spectral"), Error);
}

TEST_CASE("end-to-end run recovers the noiseless two-block clustering") {
    const auto [t, truth] = two_block_tensor();

    for (Variant variant : {Variant::Mcam1, Variant::Mcam2}) {
        for (Engine engine : {Engine::SC, Engine::AP}) {
            RunConfig cfg;
            cfg.variant = variant;
            cfg.engine = engine;
            if (engine == Engine::SC) cfg.k = {{2, 2, 2}};
            cfg.seed = 3;
            const RunReport report = run_mcam(t, cfg);
            for (int mode = 0; mode < 3; ++mode) {
                INFO("variant ", to_string(variant), " engine ",
                     to_string(engine), " mode ", mode + 1);
                CHECK(ari(report.modes[mode].labels, truth.labels[mode]) ==
                      doctest::Approx(1.0));
            }
        }
    }
}

TEST_CASE("run writes labels, affinities and a parseable report") {
    const auto [t, truth] = two_block_tensor();
    const auto dir = std::filesystem::temp_directory_path() / "mcam_run_out";
    std::filesystem::remove_all(dir);
    const auto tensor_path =
        std::filesystem::temp_directory_path() / "mcam_run_in.t3b";
    save_tensor(t, tensor_path);

    RunConfig cfg;
    cfg.input = tensor_path;
    cfg.variant = Variant::Mcam1;
    cfg.engine = Engine::SC;
    cfg.k = {{2, 2, 2}};
    cfg.seed = 1;
    cfg.output_dir = dir;
    const RunReport report = run_mcam(cfg);

    for (int mode = 1; mode <= 3; ++mode) {
        CHECK(std::filesystem::exists(dir / ("labels_mode" + std::to_string(mode) +
                                             ".csv")));
        CHECK(std::filesystem::exists(
            dir / ("affinity_mode" + std::to_string(mode) + ".csv")));
    }
    const std::string raw = read_file(dir / "report.json");
    const nlohmann::json doc = nlohmann::json::parse(raw);
    CHECK(doc.at("config").at("engine") == "sc");
    CHECK(doc.at("config").at("ap").at("preference") == "median");
    CHECK(doc.at("modes").size() == 3);
    CHECK(doc.at("modes")[0].at("r").get<int>() >= 1);
    CHECK(doc.contains("timings"));

    // Labels CSV first data row: "1,0,<label>".
    std::ifstream labels(dir / "labels_mode1.csv");
    std::string line;
    std::getline(labels, line);
    CHECK(line == "mode,index,label");
    std::getline(labels, line);
    CHECK(line.rfind("1,0,", 0) == 0);

    // Affinity CSV preamble.
    std::ifstream aff(dir / "affinity_mode2.csv");
    std::getline(aff, line);
    CHECK(line == "mode,m");
    std::getline(aff, line);
    CHECK(line == "2,8");

    CHECK(report.total_seconds >= 0.0);
    std::filesystem::remove_all(dir);
    std::filesystem::remove(tensor_path);
}

TEST_CASE("identical config and seed produce identical outputs") {
    const auto [t, truth] = two_block_tensor();
    const auto base = std::filesystem::temp_directory_path();
    const auto tensor_path = base / "mcam_det_in.t3b";
    save_tensor(t, tensor_path);

    RunConfig cfg;
    cfg.input = tensor_path;
    cfg.variant = Variant::Mcam2;
    cfg.engine = Engine::AP;
    cfg.seed = 5;
    cfg.output_dir = base / "mcam_det_out";
    std::filesystem::remove_all(cfg.output_dir);

    auto snapshot = [&] {
        std::vector<std::string> files;
        for (int mode = 1; mode <= 3; ++mode) {
            files.push_back(read_file(cfg.output_dir /
                                      ("labels_mode" + std::to_string(mode) + ".csv")));
            files.push_back(read_file(
                cfg.output_dir / ("affinity_mode" + std::to_string(mode) + ".csv")));
        }
        files.push_back(strip_timings(read_file(cfg.output_dir / "report.json")));
        return files;
    };

    run_mcam(cfg);
    const auto first = snapshot();
    run_mcam(cfg);
    const auto second = snapshot();
    // Identical bytes throughout; the report differs only in "timings".
    CHECK(first == second);

    std::filesystem::remove_all(cfg.output_dir);
    std::filesystem::remove(tensor_path);
}

TEST_CASE("mode context is attached to engine errors") {
    const auto [t, truth] = two_block_tensor();
    RunConfig cfg;
    cfg.engine = Engine::SC;
    cfg.k = {{2, 2, 100}};  // k3 > m3
    try {
        run_mcam(t, cfg);
        FAIL("expected contract error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Contract);
        CHECK(std::string(e.what()).find("mode 3") != std::string::npos);
    }
}

TEST_CASE("sweep aggregates per gamma and method") {
    SweepSpec spec;
    spec.gammas = {30.0, 12.0};
    spec.repetitions = 2;
    spec.methods = {"mcam1-sc", "cp-kmeans"};
    spec.dim = 10;
    spec.cluster_count = 2;
    spec.block_size = 5;
    spec.base_seed = 7;
    const std::vector<SweepCell> cells = run_sweep(spec);

    REQUIRE(cells.size() == 4);
    // Sorted by gamma, then method name.
    CHECK(cells[0].gamma == 12.0);
    CHECK(cells[0].method == "cp-kmeans");
    CHECK(cells[1].method == "mcam1-sc");
    CHECK(cells[2].gamma == 30.0);
    for (const SweepCell& c : cells) {
        CHECK(c.successes == 2);
        CHECK(c.ari_mean >= -0.5);
        CHECK(c.ari_mean <= 1.0);
    }
    // Strong signal separates the blocks.
    CHECK(cells[3].ari_mean >= 0.9);

    const auto csv = std::filesystem::temp_directory_path() / "mcam_sweep.csv";
    save_sweep_csv(cells, csv);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "gamma,method,ari_mean,ari_std,nmi_mean,nmi_std,r_mode");
    std::filesystem::remove(csv);
}

TEST_CASE("sweep validation") {
    SweepSpec spec;
    spec.gammas = {10.0};
    spec.methods = {};
    CHECK_THROWS_AS(run_sweep(spec), Error);
    spec.methods = {"mcam9-xx"};
    CHECK_THROWS_AS(run_sweep(spec), Error);
    spec.methods = {"mcam1-ap"};
    spec.repetitions = 0;
    CHECK_THROWS_AS(run_sweep(spec), Error);
}

TEST_CASE("sweep records failed repetitions as missing") {
    SweepSpec spec;
    spec.gammas = {20.0};
    spec.repetitions = 1;
    spec.methods = {"mcam1-sc"};
    spec.dim = 8;
    spec.cluster_count = 2;
    spec.block_size = 4;
    spec.r_values = {50};  // r beyond the computed eigenpair count fails
    const std::vector<SweepCell> cells = run_sweep(spec);
    REQUIRE(cells.size() == 1);
    CHECK(cells[0].successes == 0);

    const auto csv = std::filesystem::temp_directory_path() / "mcam_sweep_miss.csv";
    save_sweep_csv(cells, csv);
    std::ifstream in(csv);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(row == "20,mcam1-sc,,,,,50");
    std::filesystem::remove(csv);
}

TEST_CASE("runtime grows no faster than the n^4 class") {
    // Doubling the cubic edge from 40 to 80 multiplies an n^4 algorithm's
    // work by 16; allow 32x for constant-factor noise.
    auto timed_run = [](std::size_t dim) {
        const SyntheticSpec spec =
            uniform_block_spec(dim, 4, dim / 4, 40.0, true, 123);
        const auto [t, truth] = generate(spec);
        RunConfig cfg;
        cfg.engine = Engine::SC;
        cfg.k = {{4, 4, 4}};
        cfg.seed = 1;
        double best = 1e300;
        for (int attempt = 0; attempt < 2; ++attempt) {
            const auto start = std::chrono::steady_clock::now();
            run_mcam(t, cfg);
            best = std::min(
                best, std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count());
        }
        return best;
    };
    const double small = std::max(timed_run(40), 1e-3);
    const double large = timed_run(80);
    CHECK(large / small <= 32.0);
}

TEST_CASE("forced r values appear as separate sweep rows") {
    SweepSpec spec;
    spec.gammas = {25.0};
    spec.repetitions = 1;
    spec.methods = {"mcam2-sc"};
    spec.dim = 10;
    spec.cluster_count = 2;
    spec.block_size = 5;
    spec.r_values = {1, 2, 3};
    const std::vector<SweepCell> cells = run_sweep(spec);
    REQUIRE(cells.size() == 3);
    CHECK(cells[0].r_mode == 1);
    CHECK(cells[1].r_mode == 2);
    CHECK(cells[2].r_mode == 3);
}
