#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "signopt/dataset.hpp"
#include "signopt/objective.hpp"
#include "signopt/optimizers.hpp"

namespace signopt {

struct ObjectiveSpec {
    std::string kind = "mlp"; // "logistic" | "mlp"
    std::vector<std::size_t> layers = {784, 128, 10};
    std::string activation = "relu";
};

struct DatasetSpec {
    std::string kind = "idx"; // "idx" | "blobs"
    // idx: paths, resolved against SIGNOPT_DATA_DIR when relative
    std::string train_images = "train-images-idx3-ubyte";
    std::string train_labels = "train-labels-idx1-ubyte";
    std::string test_images = "t10k-images-idx3-ubyte";
    std::string test_labels = "t10k-labels-idx1-ubyte";
    // blobs
    std::size_t blob_train = 1000;
    std::size_t blob_test = 200;
    std::size_t blob_dim = 2;
    std::int32_t blob_classes = 2;
    double blob_spread = 0.1;
    // both: cap on training rows (0 = all)
    std::size_t train_limit = 0;
};

struct ScheduleSpec {
    std::vector<std::int64_t> milestones = {150};
    double factor = 0.1;
};

/// One run, fully determined: config + seed -> every output byte.
struct ExperimentConfig {
    ObjectiveSpec objective;
    DatasetSpec dataset;
    std::string optimizer = "signadampp";
    HyperParams hyperparams;
    std::int64_t epochs = 20;
    std::size_t batch_size = 128;
    std::uint64_t seed = 1;
    ScheduleSpec schedule;
    std::size_t sparsity_group = 0; // parameter group sampled for sparsity logging
    // "group": adaptive alpha tracked per layer group; "model": one state
    // for the whole parameter vector.
    std::string confidence_scope = "group";
    std::optional<double> target_error;
    bool record_wall_time = false; // off by default: timing breaks byte determinism
    std::string out_dir = ".";

    void validate() const;
    std::string to_json() const;
    static ExperimentConfig from_json(const std::string& text);
    static ExperimentConfig from_file(const std::string& path);
};

/// One logging row (one per epoch).
struct RunRecord {
    std::int64_t epoch = 0;
    std::uint64_t step = 0;
    double train_loss = 0.0;
    double test_error = 0.0;
    double grad_sparsity = 0.0;
    double alpha = 0.0;
    double lr = 0.0;
    double l1_grad_norm = 0.0;
    std::int64_t wall_ms = 0;
};

struct RunSummary {
    std::string optimizer;
    double final_train_loss = 0.0;
    double final_test_error = 1.0;
    double best_test_error = 1.0;
    double final_train_error = 1.0;
    std::int64_t epochs_to_threshold = -1; // -1 = never reached
    double calibrated_alpha = 0.0;
    std::uint64_t total_steps = 0;

    std::string to_json() const;
};

struct RunResult {
    std::vector<RunRecord> records;
    RunSummary summary;
};

inline constexpr const char* kRunCsvHeader =
    "epoch,step,train_loss,test_error,grad_sparsity,alpha,lr,l1_grad_norm,wall_ms";

std::string records_to_csv(const std::vector<RunRecord>& records);

/// Trains per the config. Writes nothing; callers persist results.
RunResult run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

/// run_experiment + run.csv + summary.json under config.out_dir.
RunResult run_and_write(const ExperimentConfig& config, std::ostream* log = nullptr);

struct CompareResult {
    std::vector<std::string> optimizers;
    std::vector<RunResult> runs;
    double threshold = 0.0;

    /// Merged CSV: optimizer column + the run schema.
    std::string to_csv() const;
    /// Per-optimizer epochs-to-threshold, "-" when never reached.
    std::string to_json() const;
};

/// Shared-stream comparison: configs must differ only in the optimizer
/// block; data order and initialization are identical across runs.
CompareResult compare_experiments(const std::vector<ExperimentConfig>& configs,
                                  std::uint64_t shared_seed, double threshold,
                                  std::ostream* log = nullptr);

/// Renders a double the way every CSV/JSON writer in this project does:
/// shortest representation that round-trips.
std::string format_double(double v);

} // namespace signopt
