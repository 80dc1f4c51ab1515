#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "signopt/synth_digits.hpp"
#include "signopt/trainer.hpp"

using namespace signopt;

namespace {

const std::filesystem::path kTmp =
    std::filesystem::temp_directory_path() / "signopt_trainer_tests";

ExperimentConfig blob_config(const std::string& optimizer) {
    ExperimentConfig c;
    c.objective.kind = "logistic";
    c.dataset.kind = "blobs";
    c.dataset.blob_train = 1000;
    c.dataset.blob_test = 200;
    c.dataset.blob_dim = 2;
    c.dataset.blob_classes = 2;
    c.dataset.blob_spread = 0.1;
    c.optimizer = optimizer;
    c.hyperparams.lr = 0.01;
    c.hyperparams.weight_decay = 0.0;
    if (optimizer == "signadampp" || optimizer == "framework") {
        c.hyperparams.confidence =
            ConfidenceSpec{ConfidenceKind::fixed, 0.0, true, 0.9, 0.9, 0.999};
    }
    c.epochs = 5;
    c.batch_size = 32;
    c.seed = 3;
    c.target_error = 0.01;
    c.out_dir = (kTmp / optimizer).string();
    return c;
}

} // namespace

TEST_CASE("separable blobs reach 99% train accuracy with sign sgd") {
    const RunResult result = run_experiment(blob_config("signsgd"));
    CHECK(result.summary.final_train_error <= 0.01);
    CHECK(result.summary.final_test_error <= 0.05);
    CHECK(result.summary.epochs_to_threshold >= 1);
    REQUIRE(result.records.size() == 5);
}

TEST_CASE("run records respect the row invariants") {
    const RunResult result = run_experiment(blob_config("signadampp"));
    std::int64_t prev_epoch = 0;
    std::uint64_t prev_step = 0;
    for (const RunRecord& r : result.records) {
        CHECK(r.epoch == prev_epoch + 1);
        CHECK(r.step > prev_step);
        CHECK(r.test_error >= 0.0);
        CHECK(r.test_error <= 1.0);
        CHECK(r.grad_sparsity >= 0.0);
        CHECK(r.grad_sparsity <= 1.0);
        CHECK(r.lr > 0.0);
        CHECK(r.l1_grad_norm >= 0.0);
        CHECK(r.wall_ms == 0); // timing capture is off by default
        prev_epoch = r.epoch;
        prev_step = r.step;
    }
    CHECK(result.summary.calibrated_alpha > 0.0);
}

TEST_CASE("identical configs produce identical CSV text") {
    const ExperimentConfig config = blob_config("signadam");
    const RunResult a = run_experiment(config);
    const RunResult b = run_experiment(config);
    CHECK(records_to_csv(a.records) == records_to_csv(b.records));
    CHECK(a.summary.to_json() == b.summary.to_json());

    ExperimentConfig different = config;
    different.seed = 4;
    const RunResult c = run_experiment(different);
    CHECK(records_to_csv(a.records) != records_to_csv(c.records));
}

TEST_CASE("config json round-trips and validates") {
    const ExperimentConfig config = blob_config("signadampp");
    const ExperimentConfig back = ExperimentConfig::from_json(config.to_json());
    CHECK(back.to_json() == config.to_json());

    CHECK_THROWS_AS(ExperimentConfig::from_json("{ not json"), std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"optimizer":{"name":"launchpad"}})"),
                    std::invalid_argument);
    CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"epochs": 0})"), std::invalid_argument);

    SUBCASE("confidence-needing optimizers default to a calibrated gate") {
        const ExperimentConfig c =
            ExperimentConfig::from_json(R"({"optimizer": {"name": "signadampp"}})");
        CHECK(c.hyperparams.confidence.kind == ConfidenceKind::fixed);
        CHECK(c.hyperparams.confidence.calibrate);
    }

    SUBCASE("confidence scope switch") {
        CHECK_THROWS_AS(ExperimentConfig::from_json(R"({"confidence_scope": "galaxy"})"),
                        std::invalid_argument);
        ExperimentConfig whole = blob_config("signadampp");
        whole.hyperparams.confidence =
            ConfidenceSpec{ConfidenceKind::adaptive, 0.0, false, 0.9, 0.9, 0.999};
        whole.confidence_scope = "model";
        const RunResult result = run_experiment(whole);
        CHECK(result.records.back().alpha > 0.0);
    }
}

TEST_CASE("compare shares the data stream and tabulates thresholds") {
    const std::vector<ExperimentConfig> configs{blob_config("signsgd"),
                                                blob_config("adam")};
    const CompareResult result = compare_experiments(configs, 3, 0.01);
    REQUIRE(result.runs.size() == 2);
    CHECK(result.optimizers == std::vector<std::string>{"signsgd", "adam"});
    // separable problem: both reach the threshold
    CHECK(result.runs[0].summary.epochs_to_threshold >= 1);
    CHECK(result.runs[1].summary.epochs_to_threshold >= 1);
    const std::string csv = result.to_csv();
    CHECK(csv.find("optimizer,epoch,step") == 0);
    CHECK(csv.find("signsgd,1,") != std::string::npos);
    CHECK(csv.find("adam,5,") != std::string::npos);

    SUBCASE("never-reaching runs print the dash convention") {
        std::vector<ExperimentConfig> hopeless = configs;
        for (auto& c : hopeless) {
            c.epochs = 1;
        }
        // unattainable tolerance: even a perfect classifier misses it
        const CompareResult r2 = compare_experiments(hopeless, 3, -1.0);
        CHECK(r2.to_json().find("\"-\"") != std::string::npos);
    }

    SUBCASE("mismatched datasets or models are rejected") {
        std::vector<ExperimentConfig> bad = configs;
        bad[1].dataset.blob_spread = 0.5;
        CHECK_THROWS_AS(compare_experiments(bad, 3, 0.01), std::invalid_argument);
        bad = configs;
        bad[1].objective.kind = "mlp";
        bad[1].objective.layers = {2, 8, 2};
        CHECK_THROWS_AS(compare_experiments(bad, 3, 0.01), std::invalid_argument);
        CHECK_THROWS_AS(compare_experiments({configs[0]}, 3, 0.01), std::invalid_argument);
    }
}

TEST_CASE("mlp training run on a small digit corpus makes progress") {
    DigitGenParams params;
    params.train_count = 2000;
    params.test_count = 400;
    params.noise_std = 0.2; // small corpus, keep the smoke test learnable
    const std::string dir = (kTmp / "digits").string();
    generate_digits_idx(dir, params);

    ExperimentConfig c;
    c.objective.kind = "mlp";
    c.objective.layers = {784, 32, 10};
    c.objective.activation = "relu";
    c.dataset.kind = "idx";
    c.dataset.train_images = dir + "/train-images-idx3-ubyte";
    c.dataset.train_labels = dir + "/train-labels-idx1-ubyte";
    c.dataset.test_images = dir + "/t10k-images-idx3-ubyte";
    c.dataset.test_labels = dir + "/t10k-labels-idx1-ubyte";
    c.optimizer = "signadampp";
    c.hyperparams.confidence = ConfidenceSpec{ConfidenceKind::fixed, 0.0, true, 0.9, 0.9, 0.999};
    c.epochs = 3;
    c.batch_size = 64;
    c.seed = 1;
    c.out_dir = (kTmp / "mlp_run").string();

    const RunResult result = run_and_write(c);
    CHECK(result.records.back().test_error < result.records.front().test_error + 0.05);
    CHECK(result.records.back().test_error < 0.5);
    CHECK(result.records.back().grad_sparsity > 0.0);
    CHECK(std::filesystem::exists(kTmp / "mlp_run" / "run.csv"));
    CHECK(std::filesystem::exists(kTmp / "mlp_run" / "summary.json"));
}

TEST_CASE("diverging runs abort with a non-finite diagnostic") {
    // Two stacked layers square the parameter scale, so a huge learning
    // rate overflows the logits within a couple of steps.
    ExperimentConfig c = blob_config("sgd");
    c.objective.kind = "mlp";
    c.objective.layers = {2, 8, 2};
    c.objective.activation = "relu";
    c.hyperparams.lr = 1e150;
    c.epochs = 3;
    CHECK_THROWS_WITH_AS(run_experiment(c), doctest::Contains("non-finite"),
                         std::exception);
}

TEST_CASE("format_double writes shortest round-trip text") {
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-17) == "-2.5e-17");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
}
