#include "signopt/trainer.hpp"

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "json.hpp"

#include "signopt/confidence.hpp"
#include "signopt/idx.hpp"
#include "signopt/logistic.hpp"
#include "signopt/mlp.hpp"

namespace signopt {

namespace {

using nlohmann::json;

std::string resolve_data_path(const std::string& path) {
    if (path.empty() || std::filesystem::path(path).is_absolute()) {
        return path;
    }
    if (std::filesystem::exists(path)) {
        return path;
    }
    if (const char* root = std::getenv("SIGNOPT_DATA_DIR")) {
        return (std::filesystem::path(root) / path).string();
    }
    return path;
}

void truncate_train(Dataset& ds, std::size_t limit) {
    if (limit == 0 || limit >= ds.size()) {
        return;
    }
    ds.labels.resize(limit);
    ds.features.resize(limit * ds.num_features);
}

struct BuiltData {
    Dataset train;
    Dataset test;
};

BuiltData build_datasets(const ExperimentConfig& config) {
    BuiltData data;
    if (config.dataset.kind == "idx") {
        data.train = load_idx(resolve_data_path(config.dataset.train_images),
                              resolve_data_path(config.dataset.train_labels), "train");
        data.test = load_idx(resolve_data_path(config.dataset.test_images),
                             resolve_data_path(config.dataset.test_labels), "test");
    } else if (config.dataset.kind == "blobs") {
        // One draw for both splits so the class centers are shared.
        Rng rng = Rng(config.seed).split(3);
        const std::size_t total = config.dataset.blob_train + config.dataset.blob_test;
        Dataset all = synth_blobs(rng, total, config.dataset.blob_dim,
                                  config.dataset.blob_classes, config.dataset.blob_spread);
        data.train = all;
        data.train.split = "train";
        truncate_train(data.train, config.dataset.blob_train);
        data.test.num_features = all.num_features;
        data.test.num_classes = all.num_classes;
        data.test.split = "test";
        data.test.labels.assign(all.labels.begin() + static_cast<std::ptrdiff_t>(config.dataset.blob_train),
                                all.labels.end());
        data.test.features.assign(
            all.features.begin() +
                static_cast<std::ptrdiff_t>(config.dataset.blob_train * all.num_features),
            all.features.end());
    } else {
        throw std::invalid_argument("config: unknown dataset kind '" + config.dataset.kind + "'");
    }
    truncate_train(data.train, config.dataset.train_limit);
    data.train.validate();
    data.test.validate();
    return data;
}

std::unique_ptr<ClassifierObjective> build_objective(const ExperimentConfig& config,
                                                     const Dataset& train) {
    if (config.objective.kind == "logistic") {
        return std::make_unique<LogisticRegression>(train.num_features, train.num_classes,
                                                    &train);
    }
    if (config.objective.kind == "mlp") {
        return std::make_unique<Mlp>(config.objective.layers,
                                     parse_activation(config.objective.activation), &train);
    }
    throw std::invalid_argument("config: unknown objective kind '" + config.objective.kind + "'");
}

bool wants_confidence(const std::string& optimizer) {
    return optimizer == "signadampp" || optimizer == "framework";
}

} // namespace

void ExperimentConfig::validate() const {
    hyperparams.validate();
    if (epochs < 1) {
        throw std::invalid_argument("config: epochs must be >= 1");
    }
    if (batch_size < 1) {
        throw std::invalid_argument("config: batch_size must be >= 1");
    }
    bool known = false;
    for (const std::string& name : optimizer_names()) {
        known = known || name == optimizer;
    }
    if (!known) {
        throw std::invalid_argument("config: unknown optimizer '" + optimizer + "'");
    }
    if (!(schedule.factor > 0.0 && schedule.factor <= 1.0)) {
        throw std::invalid_argument("config: schedule factor must be in (0, 1]");
    }
    if (wants_confidence(optimizer) && hyperparams.confidence.kind == ConfidenceKind::none) {
        throw std::invalid_argument("config: " + optimizer + " requires a confidence spec");
    }
    if (confidence_scope != "group" && confidence_scope != "model") {
        throw std::invalid_argument("config: confidence_scope must be 'group' or 'model'");
    }
}

RunResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
    config.validate();
    const BuiltData data = build_datasets(config);
    const auto objective = build_objective(config, data.train);
    const std::vector<ParamGroup> groups = config.confidence_scope == "model"
                                               ? whole_vector_group(objective->dim())
                                               : objective->groups();
    if (config.sparsity_group >= groups.size()) {
        throw std::invalid_argument("config: sparsity_group out of range");
    }

    Rng init_rng = Rng(config.seed).split(1);
    Vec theta = objective->init_params(init_rng);

    const BatchPlan plan{config.batch_size, mix_seed(config.seed, 2), false};

    HyperParams hp = config.hyperparams;
    RunSummary summary;
    summary.optimizer = config.optimizer;

    // Calibrated confidence factor: magnitude quantile of the very first
    // raw gradient of the run, targeting the configured initial sparsity.
    if (wants_confidence(config.optimizer) && hp.confidence.kind == ConfidenceKind::fixed &&
        hp.confidence.calibrate) {
        const EpochBatches first_epoch = batches(data.train, plan, 1);
        const EvalResult probe = objective->eval(theta, first_epoch.batch(0), nullptr);
        hp.confidence.alpha =
            calibrate_alpha(probe.grad.values, hp.confidence.target_sparsity);
        hp.confidence.calibrate = false;
        summary.calibrated_alpha = hp.confidence.alpha;
        if (log != nullptr) {
            *log << "calibrated alpha = " << hp.confidence.alpha << '\n';
        }
    }

    auto optimizer = make_optimizer(config.optimizer, hp, objective->dim(), groups);
    const ParamGroup& sample_group = groups[config.sparsity_group];

    RunResult result;
    result.records.reserve(static_cast<std::size_t>(config.epochs));
    for (std::int64_t epoch = 1; epoch <= config.epochs; ++epoch) {
        const auto epoch_start = std::chrono::steady_clock::now();
        optimizer->set_learning_rate(
            lr_schedule(epoch, hp.lr, config.schedule.milestones, config.schedule.factor));

        const EpochBatches epoch_batches = batches(data.train, plan, static_cast<std::uint64_t>(epoch));
        double loss_sum = 0.0;
        double last_l1 = 0.0;
        for (std::size_t b = 0; b < epoch_batches.num_batches(); ++b) {
            const EvalResult res = objective->eval(theta, epoch_batches.batch(b), nullptr);
            if (!std::isfinite(res.loss)) {
                throw std::runtime_error("run aborted: non-finite loss at epoch " +
                                         std::to_string(epoch) + ", step " +
                                         std::to_string(optimizer->step_count() + 1));
            }
            loss_sum += res.loss;
            if (b + 1 == epoch_batches.num_batches()) {
                last_l1 = l1_norm(res.grad.values);
            }
            optimizer->apply(theta, res.grad);
        }

        RunRecord row;
        row.epoch = epoch;
        row.step = optimizer->step_count();
        row.train_loss = loss_sum / static_cast<double>(epoch_batches.num_batches());
        row.test_error = objective->error_rate(theta, data.test);
        const Vec* processed = optimizer->last_processed();
        std::span<const double> sampled =
            processed != nullptr
                ? std::span<const double>(*processed).subspan(sample_group.offset, sample_group.length)
                : std::span<const double>();
        row.grad_sparsity = sampled.empty() ? 0.0 : sparsity(sampled);
        row.alpha = optimizer->alpha_for_group(config.sparsity_group);
        row.lr = optimizer->learning_rate();
        row.l1_grad_norm = last_l1;
        if (config.record_wall_time) {
            row.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                              std::chrono::steady_clock::now() - epoch_start)
                              .count();
        }
        result.records.push_back(row);

        if (config.target_error && summary.epochs_to_threshold < 0 &&
            row.test_error <= *config.target_error) {
            summary.epochs_to_threshold = epoch;
        }
        summary.best_test_error = std::min(summary.best_test_error, row.test_error);
        if (log != nullptr) {
            *log << "epoch " << epoch << " loss " << row.train_loss << " test_error "
                 << row.test_error << " sparsity " << row.grad_sparsity << '\n';
        }
    }

    summary.final_train_loss = result.records.back().train_loss;
    summary.final_test_error = result.records.back().test_error;
    summary.final_train_error = objective->error_rate(theta, data.train);
    summary.total_steps = optimizer->step_count();
    result.summary = summary;
    return result;
}

CompareResult compare_experiments(const std::vector<ExperimentConfig>& configs,
                                  std::uint64_t shared_seed, double threshold,
                                  std::ostream* log) {
    if (configs.size() < 2) {
        throw std::invalid_argument("compare: need at least two configs");
    }
    auto shared_view = [&](const ExperimentConfig& c) {
        json j = json::parse(c.to_json());
        j.erase("optimizer");
        j["seed"] = shared_seed;
        j.erase("out_dir");
        j["target_error"] = threshold;
        return j;
    };
    const json reference = shared_view(configs.front());
    for (const ExperimentConfig& c : configs) {
        if (shared_view(c) != reference) {
            throw std::invalid_argument(
                "compare: configs must differ only in the optimizer block");
        }
    }

    CompareResult result;
    result.threshold = threshold;
    for (ExperimentConfig config : configs) {
        config.seed = shared_seed;
        config.target_error = threshold;
        if (log != nullptr) {
            *log << "== " << config.optimizer << '\n';
        }
        result.optimizers.push_back(config.optimizer);
        result.runs.push_back(run_experiment(config, log));
    }
    return result;
}

// ------------------------------ serialization ------------------------------

std::string format_double(double v) {
    char buf[32];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

std::string records_to_csv(const std::vector<RunRecord>& records) {
    std::string out(kRunCsvHeader);
    out += '\n';
    for (const RunRecord& r : records) {
        out += std::to_string(r.epoch);
        out += ',';
        out += std::to_string(r.step);
        out += ',';
        out += format_double(r.train_loss);
        out += ',';
        out += format_double(r.test_error);
        out += ',';
        out += format_double(r.grad_sparsity);
        out += ',';
        out += format_double(r.alpha);
        out += ',';
        out += format_double(r.lr);
        out += ',';
        out += format_double(r.l1_grad_norm);
        out += ',';
        out += std::to_string(r.wall_ms);
        out += '\n';
    }
    return out;
}

std::string RunSummary::to_json() const {
    json j;
    j["optimizer"] = optimizer;
    j["final_train_loss"] = final_train_loss;
    j["final_test_error"] = final_test_error;
    j["best_test_error"] = best_test_error;
    j["final_train_error"] = final_train_error;
    if (epochs_to_threshold >= 0) {
        j["epochs_to_threshold"] = epochs_to_threshold;
    } else {
        j["epochs_to_threshold"] = "-";
    }
    j["calibrated_alpha"] = calibrated_alpha;
    j["total_steps"] = total_steps;
    return j.dump(2);
}

std::string CompareResult::to_csv() const {
    std::string out = "optimizer,";
    out += kRunCsvHeader;
    out += '\n';
    for (std::size_t i = 0; i < runs.size(); ++i) {
        const std::string csv = records_to_csv(runs[i].records);
        bool first = true;
        for (std::size_t pos = 0; pos < csv.size();) {
            const std::size_t eol = csv.find('\n', pos);
            const std::string line = csv.substr(pos, eol - pos);
            pos = eol + 1;
            if (first) { // skip the inner header
                first = false;
                continue;
            }
            if (!line.empty()) {
                out += optimizers[i];
                out += ',';
                out += line;
                out += '\n';
            }
        }
    }
    return out;
}

std::string CompareResult::to_json() const {
    json rows = json::array();
    for (std::size_t i = 0; i < runs.size(); ++i) {
        json row = json::parse(runs[i].summary.to_json());
        rows.push_back(row);
    }
    json j;
    j["threshold"] = threshold;
    j["results"] = rows;
    return j.dump(2);
}

RunResult run_and_write(const ExperimentConfig& config, std::ostream* log) {
    RunResult result = run_experiment(config, log);
    std::filesystem::create_directories(config.out_dir);
    const std::filesystem::path dir(config.out_dir);
    {
        std::ofstream csv(dir / "run.csv", std::ios::binary);
        if (!csv) {
            throw std::runtime_error("cannot write " + (dir / "run.csv").string());
        }
        csv << records_to_csv(result.records);
    }
    {
        std::ofstream summary(dir / "summary.json", std::ios::binary);
        summary << result.summary.to_json() << '\n';
    }
    return result;
}

std::string ExperimentConfig::to_json() const {
    json j;
    j["objective"] = {{"kind", objective.kind},
                      {"layers", objective.layers},
                      {"activation", objective.activation}};
    json ds;
    ds["kind"] = dataset.kind;
    if (dataset.kind == "idx") {
        ds["train_images"] = dataset.train_images;
        ds["train_labels"] = dataset.train_labels;
        ds["test_images"] = dataset.test_images;
        ds["test_labels"] = dataset.test_labels;
    } else {
        ds["train"] = dataset.blob_train;
        ds["test"] = dataset.blob_test;
        ds["dim"] = dataset.blob_dim;
        ds["classes"] = dataset.blob_classes;
        ds["spread"] = dataset.blob_spread;
    }
    ds["train_limit"] = dataset.train_limit;
    j["dataset"] = ds;

    json opt;
    opt["name"] = optimizer;
    opt["lr"] = hyperparams.lr;
    opt["beta1"] = hyperparams.beta1;
    opt["beta2"] = hyperparams.beta2;
    opt["eps"] = hyperparams.eps;
    opt["weight_decay"] = hyperparams.weight_decay;
    opt["decoupled_decay"] = hyperparams.decoupled_decay;
    if (!std::isnan(hyperparams.framework_grad_coeff)) {
        opt["framework_grad_coeff"] = hyperparams.framework_grad_coeff;
    }
    json conf;
    switch (hyperparams.confidence.kind) {
    case ConfidenceKind::none:
        conf["kind"] = "none";
        break;
    case ConfidenceKind::fixed:
        conf["kind"] = "fixed";
        if (hyperparams.confidence.calibrate) {
            conf["calibrate"] = true;
            conf["target_sparsity"] = hyperparams.confidence.target_sparsity;
        } else {
            conf["alpha"] = hyperparams.confidence.alpha;
        }
        break;
    case ConfidenceKind::adaptive:
        conf["kind"] = "adaptive";
        conf["beta1"] = hyperparams.confidence.beta1;
        conf["beta2"] = hyperparams.confidence.beta2;
        break;
    }
    opt["confidence"] = conf;
    j["optimizer"] = opt;

    j["epochs"] = epochs;
    j["batch_size"] = batch_size;
    j["seed"] = seed;
    j["schedule"] = {{"milestones", schedule.milestones}, {"factor", schedule.factor}};
    j["sparsity_group"] = sparsity_group;
    j["confidence_scope"] = confidence_scope;
    if (target_error) {
        j["target_error"] = *target_error;
    }
    j["record_wall_time"] = record_wall_time;
    j["out_dir"] = out_dir;
    return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    ExperimentConfig c;
    if (j.contains("objective")) {
        const json& o = j.at("objective");
        c.objective.kind = o.value("kind", c.objective.kind);
        if (o.contains("layers")) {
            c.objective.layers = o.at("layers").get<std::vector<std::size_t>>();
        }
        c.objective.activation = o.value("activation", c.objective.activation);
    }
    if (j.contains("dataset")) {
        const json& d = j.at("dataset");
        c.dataset.kind = d.value("kind", c.dataset.kind);
        c.dataset.train_images = d.value("train_images", c.dataset.train_images);
        c.dataset.train_labels = d.value("train_labels", c.dataset.train_labels);
        c.dataset.test_images = d.value("test_images", c.dataset.test_images);
        c.dataset.test_labels = d.value("test_labels", c.dataset.test_labels);
        c.dataset.blob_train = d.value("train", c.dataset.blob_train);
        c.dataset.blob_test = d.value("test", c.dataset.blob_test);
        c.dataset.blob_dim = d.value("dim", c.dataset.blob_dim);
        c.dataset.blob_classes = d.value("classes", c.dataset.blob_classes);
        c.dataset.blob_spread = d.value("spread", c.dataset.blob_spread);
        c.dataset.train_limit = d.value("train_limit", c.dataset.train_limit);
    }
    if (j.contains("optimizer")) {
        const json& o = j.at("optimizer");
        c.optimizer = o.value("name", c.optimizer);
        c.hyperparams.lr = o.value("lr", c.hyperparams.lr);
        c.hyperparams.beta1 = o.value("beta1", c.hyperparams.beta1);
        c.hyperparams.beta2 = o.value("beta2", c.hyperparams.beta2);
        c.hyperparams.eps = o.value("eps", c.hyperparams.eps);
        c.hyperparams.weight_decay = o.value("weight_decay", c.hyperparams.weight_decay);
        c.hyperparams.decoupled_decay = o.value("decoupled_decay", c.hyperparams.decoupled_decay);
        if (o.contains("framework_grad_coeff")) {
            c.hyperparams.framework_grad_coeff = o.at("framework_grad_coeff").get<double>();
        }
        if (o.contains("confidence")) {
            const json& conf = o.at("confidence");
            const std::string kind = conf.value("kind", "none");
            if (kind == "fixed") {
                c.hyperparams.confidence.kind = ConfidenceKind::fixed;
                if (conf.contains("alpha")) {
                    c.hyperparams.confidence.alpha = conf.at("alpha").get<double>();
                    c.hyperparams.confidence.calibrate = false;
                } else {
                    c.hyperparams.confidence.calibrate = true;
                    c.hyperparams.confidence.target_sparsity =
                        conf.value("target_sparsity", c.hyperparams.confidence.target_sparsity);
                }
            } else if (kind == "adaptive") {
                c.hyperparams.confidence.kind = ConfidenceKind::adaptive;
                c.hyperparams.confidence.beta1 = conf.value("beta1", c.hyperparams.confidence.beta1);
                c.hyperparams.confidence.beta2 = conf.value("beta2", c.hyperparams.confidence.beta2);
            } else if (kind == "none") {
                c.hyperparams.confidence.kind = ConfidenceKind::none;
            } else {
                throw std::invalid_argument("config: unknown confidence kind '" + kind + "'");
            }
        }
    }
    // Calibrated gate by default when the rule needs one and none is given.
    if (wants_confidence(c.optimizer) && c.hyperparams.confidence.kind == ConfidenceKind::none) {
        c.hyperparams.confidence.kind = ConfidenceKind::fixed;
        c.hyperparams.confidence.calibrate = true;
    }
    c.epochs = j.value("epochs", c.epochs);
    c.batch_size = j.value("batch_size", c.batch_size);
    c.seed = j.value("seed", c.seed);
    if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        if (s.contains("milestones")) {
            c.schedule.milestones = s.at("milestones").get<std::vector<std::int64_t>>();
        }
        c.schedule.factor = s.value("factor", c.schedule.factor);
    }
    c.sparsity_group = j.value("sparsity_group", c.sparsity_group);
    c.confidence_scope = j.value("confidence_scope", c.confidence_scope);
    if (j.contains("target_error")) {
        c.target_error = j.at("target_error").get<double>();
    }
    c.record_wall_time = j.value("record_wall_time", c.record_wall_time);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.validate();
    return c;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("config: cannot open " + path);
    }
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return from_json(text);
}

} // namespace signopt
