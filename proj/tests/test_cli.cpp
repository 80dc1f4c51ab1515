// End-to-end checks of the CLI binary: exit codes, output files, and
// byte-level determinism of repeated invocations.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "signopt/synth_digits.hpp"

namespace {

namespace fs = std::filesystem;

const fs::path kTmp = fs::temp_directory_path() / "signopt_cli_tests";

struct TmpDir {
    TmpDir() {
        fs::remove_all(kTmp);
        fs::create_directories(kTmp);
    }
};
const TmpDir tmp_dir_once;

int run_cli(const std::string& args) {
    const std::string cmd = std::string(SIGNOPT_CLI_PATH) + " " + args + " > " +
                            (kTmp / "stdout.txt").string() + " 2> " +
                            (kTmp / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    return WEXITSTATUS(status);
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    return std::string((std::istreambuf_iterator<char>(in)), {});
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

const char* kBlobConfig = R"({
  "objective": {"kind": "logistic"},
  "dataset": {"kind": "blobs", "train": 600, "test": 150, "dim": 2, "classes": 2, "spread": 0.1},
  "optimizer": {"name": "signadampp", "lr": 0.01, "weight_decay": 0.0,
                "confidence": {"kind": "fixed", "calibrate": true, "target_sparsity": 0.5}},
  "epochs": 4, "batch_size": 32, "seed": 9, "target_error": 0.02
})";

} // namespace

TEST_CASE("run: repeated invocations write identical bytes") {
    write_file(kTmp / "run.json", kBlobConfig);
    const std::string base = (kTmp / "run.json").string();
    REQUIRE(run_cli("run --config " + base + " --quiet --out " + (kTmp / "a").string()) == 0);
    REQUIRE(run_cli("run --config " + base + " --quiet --out " + (kTmp / "b").string()) == 0);
    CHECK(slurp(kTmp / "a" / "run.csv") == slurp(kTmp / "b" / "run.csv"));
    CHECK(slurp(kTmp / "a" / "summary.json") == slurp(kTmp / "b" / "summary.json"));
    CHECK(slurp(kTmp / "a" / "run.csv").rfind("epoch,step,train_loss", 0) == 0);

    SUBCASE("a different seed changes the bytes") {
        REQUIRE(run_cli("run --config " + base + " --quiet --seed 10 --out " +
                        (kTmp / "c").string()) == 0);
        CHECK(slurp(kTmp / "a" / "run.csv") != slurp(kTmp / "c" / "run.csv"));
    }
}

TEST_CASE("run: config errors exit with 2") {
    write_file(kTmp / "broken.json", "{ this is not json");
    CHECK(run_cli("run --config " + (kTmp / "broken.json").string() + " --quiet") == 2);
    write_file(kTmp / "unknown_opt.json", R"({"optimizer": {"name": "rmsprop"}})");
    CHECK(run_cli("run --config " + (kTmp / "unknown_opt.json").string() + " --quiet") == 2);
    CHECK(run_cli("run --config " + (kTmp / "missing.json").string() + " --quiet") == 2);
    CHECK(run_cli("frobnicate") == 2);
    CHECK(run_cli("run --no-such-flag") == 2);
}

TEST_CASE("compare: shared-seed table, identical reruns, dataset validation") {
    write_file(kTmp / "cmp_a.json", kBlobConfig);
    std::string other(kBlobConfig);
    const auto pos = other.find("signadampp");
    other.replace(pos, std::string("signadampp").size(), "adam");
    write_file(kTmp / "cmp_b.json", other);

    const std::string configs = "--config " + (kTmp / "cmp_a.json").string() +
                                " --config " + (kTmp / "cmp_b.json").string();
    REQUIRE(run_cli("compare " + configs + " --threshold 0.02 --quiet --out " +
                    (kTmp / "cmpout").string()) == 0);
    const std::string summary = slurp(kTmp / "cmpout" / "summary.json");
    CHECK(summary.find("signadampp") != std::string::npos);
    CHECK(summary.find("adam") != std::string::npos);
    CHECK(slurp(kTmp / "cmpout" / "compare.csv").rfind("optimizer,epoch", 0) == 0);

    REQUIRE(run_cli("compare " + configs + " --threshold 0.02 --quiet --out " +
                    (kTmp / "cmpout2").string()) == 0);
    CHECK(slurp(kTmp / "cmpout" / "compare.csv") == slurp(kTmp / "cmpout2" / "compare.csv"));

    SUBCASE("configs with different datasets are a usage error") {
        std::string bad(kBlobConfig);
        const auto spread = bad.find("0.1");
        bad.replace(spread, 3, "0.4");
        write_file(kTmp / "cmp_bad.json", bad);
        CHECK(run_cli("compare --config " + (kTmp / "cmp_a.json").string() +
                      " --config " + (kTmp / "cmp_bad.json").string() + " --quiet") == 2);
    }
}

TEST_CASE("theory: default spec satisfies the bound, malformed spec exits 2") {
    REQUIRE(run_cli("theory --seeds 5 --quiet --out " + (kTmp / "theory").string()) == 0);
    const std::string report = slurp(kTmp / "theory" / "theory_report.json");
    CHECK(report.find("\"satisfied\": true") != std::string::npos);

    SUBCASE("high beta still satisfies (the bound grows with beta)") {
        write_file(kTmp / "beta99.json",
                   R"({"dim": 10, "l": 1.0, "sigma": 1.0, "theta0": 1.0, "beta": 0.99, "steps": 50})");
        CHECK(run_cli("theory --config " + (kTmp / "beta99.json").string() +
                      " --seeds 5 --quiet --out " + (kTmp / "theory99").string()) == 0);
    }

    SUBCASE("malformed specs exit 2") {
        write_file(kTmp / "badspec.json", R"({"dim": 10, "beta": 2.0})");
        CHECK(run_cli("theory --config " + (kTmp / "badspec.json").string() + " --quiet") == 2);
        write_file(kTmp / "notjson.json", "nope");
        CHECK(run_cli("theory --config " + (kTmp / "notjson.json").string() + " --quiet") == 2);
    }
}

TEST_CASE("gradcheck exits 0 for every shipped model") {
    CHECK(run_cli("gradcheck --model quadratic --quiet") == 0);
    CHECK(run_cli("gradcheck --model logistic --quiet") == 0);
    CHECK(run_cli("gradcheck --model mlp-tanh --quiet") == 0);
    CHECK(run_cli("gradcheck --model mlp-relu --quiet") == 0);
    CHECK(run_cli("gradcheck --model resnet --quiet") == 2);
}

TEST_CASE("idx-info prints headers and rejects corrupt files") {
    const fs::path dir = kTmp / "idx";
    fs::create_directories(dir);
    unsigned char pixels[16] = {};
    unsigned char labels[4] = {0, 1, 2, 3};
    signopt::write_idx_images((dir / "img").string(), pixels, 4, 2, 2, false);
    signopt::write_idx_labels((dir / "lab").string(), labels, 4, false);

    REQUIRE(run_cli("idx-info " + (dir / "img").string() + " " + (dir / "lab").string()) == 0);
    const std::string out = slurp(kTmp / "stdout.txt");
    CHECK(out.find("magic=0x00000803") != std::string::npos);
    CHECK(out.find("magic=0x00000801") != std::string::npos);
    CHECK(out.find("dims=4x2x2") != std::string::npos);

    write_file(dir / "junk", "XXXXYYYY");
    CHECK(run_cli("idx-info " + (dir / "junk").string()) == 2);
    CHECK(run_cli("idx-info") == 2);
}

TEST_CASE("SIGNOPT_DATA_DIR resolves relative dataset paths") {
    const fs::path dir = kTmp / "datadir";
    signopt::DigitGenParams params;
    params.train_count = 300;
    params.test_count = 60;
    signopt::generate_digits_idx(dir.string(), params);

    write_file(kTmp / "env_run.json", R"({
      "objective": {"kind": "mlp", "layers": [784, 16, 10], "activation": "relu"},
      "dataset": {"kind": "idx"},
      "optimizer": {"name": "signadam", "lr": 0.001, "weight_decay": 0.0},
      "epochs": 1, "batch_size": 64, "seed": 2
    })");
    const std::string cmd = "SIGNOPT_DATA_DIR=" + dir.string() + " " +
                            SIGNOPT_CLI_PATH + " run --config " +
                            (kTmp / "env_run.json").string() + " --quiet --out " +
                            (kTmp / "envout").string();
    const int status = std::system((cmd + " > /dev/null 2>&1").c_str());
    REQUIRE(status != -1);
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(fs::exists(kTmp / "envout" / "run.csv"));
}
