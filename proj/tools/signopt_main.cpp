// Experiment CLI: train/compare sign-based optimizers, run the
// convergence-bound harness, check gradients, inspect IDX files.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "signopt/dataset.hpp"
#include "signopt/grad_check.hpp"
#include "signopt/idx.hpp"
#include "signopt/logistic.hpp"
#include "signopt/mlp.hpp"
#include "signopt/quadratic.hpp"
#include "signopt/theory.hpp"
#include "signopt/trainer.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitThreshold = 1;
constexpr int kExitUsage = 2;

struct RunArgs {
    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_dir;
    bool quiet = false;
};

int cmd_run(const RunArgs& args) {
    signopt::ExperimentConfig config = signopt::ExperimentConfig::from_file(args.config_path);
    if (args.seed_set) {
        config.seed = args.seed;
    }
    if (!args.out_dir.empty()) {
        config.out_dir = args.out_dir;
    }
    std::ostream* log = args.quiet ? nullptr : &std::cout;
    const signopt::RunResult result = signopt::run_and_write(config, log);
    if (!args.quiet) {
        std::cout << result.summary.to_json() << '\n';
    }
    return kExitOk;
}

struct CompareArgs {
    std::vector<std::string> config_paths;
    std::uint64_t seed = 0;
    bool seed_set = false;
    double threshold = 0.01;
    std::string out_dir = ".";
    bool quiet = false;
};

int cmd_compare(const CompareArgs& args) {
    std::vector<signopt::ExperimentConfig> configs;
    for (const std::string& path : args.config_paths) {
        configs.push_back(signopt::ExperimentConfig::from_file(path));
    }
    const std::uint64_t seed = args.seed_set ? args.seed : configs.front().seed;
    std::ostream* log = args.quiet ? nullptr : &std::cout;
    const signopt::CompareResult result =
        signopt::compare_experiments(configs, seed, args.threshold, log);

    std::filesystem::create_directories(args.out_dir);
    const std::filesystem::path dir(args.out_dir);
    {
        std::ofstream csv(dir / "compare.csv", std::ios::binary);
        csv << result.to_csv();
    }
    {
        std::ofstream summary(dir / "summary.json", std::ios::binary);
        summary << result.to_json() << '\n';
    }
    if (!args.quiet) {
        std::cout << result.to_json() << '\n';
    }
    return kExitOk;
}

struct TheoryArgs {
    std::string spec_path;
    int seeds = 20;
    std::uint64_t seed = 7;
    std::string out_dir = ".";
    bool quiet = false;
};

int cmd_theory(const TheoryArgs& args) {
    signopt::TheoryProblemSpec spec;
    if (args.spec_path.empty()) {
        // Shipped default: the d=10 unit quadratic at K=100.
        spec.l_vec.assign(10, 1.0);
        spec.sigma_vec.assign(10, 1.0);
        spec.theta0.assign(10, 1.0);
        spec.beta = 0.9;
        spec.steps = 100;
    } else {
        std::ifstream in(args.spec_path, std::ios::binary);
        if (!in) {
            throw std::invalid_argument("theory: cannot open " + args.spec_path);
        }
        std::string text((std::istreambuf_iterator<char>(in)),
                         std::istreambuf_iterator<char>());
        try {
            spec = signopt::TheoryProblemSpec::from_json(text);
        } catch (const std::exception& e) {
            throw std::invalid_argument(std::string("theory: malformed spec: ") + e.what());
        }
    }

    const signopt::BoundReport report =
        signopt::run_convergence_experiment(spec, args.seeds, args.seed);
    std::filesystem::create_directories(args.out_dir);
    const std::filesystem::path out = std::filesystem::path(args.out_dir) / "theory_report.json";
    {
        std::ofstream f(out, std::ios::binary);
        f << report.to_json() << '\n';
    }
    if (!args.quiet) {
        std::cout << report.to_json() << '\n';
    }
    const bool momentum_ok = report.sign_momentum_max <= 1.0 + 1e-15;
    if (!report.satisfied || !report.drift.satisfied || !momentum_ok) {
        std::cerr << "theory: inequality violated (bound " << report.bound
                  << ", empirical " << report.empirical_signadam << ")\n";
        return kExitThreshold;
    }
    return kExitOk;
}

struct GradcheckArgs {
    std::string model = "quadratic";
    std::uint64_t seed = 1;
    bool quiet = false;
};

int cmd_gradcheck(const GradcheckArgs& args) {
    signopt::Rng rng(args.seed);
    std::unique_ptr<signopt::Objective> objective;
    signopt::Dataset data;
    double tolerance = 0.0;
    double step = 1e-5;
    double magnitude_floor = 0.0;
    std::size_t max_coords = 0;

    if (args.model == "quadratic") {
        signopt::Vec l(50);
        signopt::Vec sigma(50, 0.0);
        for (double& v : l) {
            v = rng.uniform(0.1, 3.0);
        }
        objective = std::make_unique<signopt::NoisyQuadratic>(l, sigma);
        tolerance = 1e-9;
        // The central difference of a quadratic is h-independent, so a
        // large probe step sidesteps cancellation noise entirely.
        step = 0.1;
    } else if (args.model == "logistic") {
        signopt::Rng data_rng = rng.split(1);
        data = signopt::synth_blobs(data_rng, 200, 20, 4, 0.5);
        objective = std::make_unique<signopt::LogisticRegression>(20, 4, &data);
        tolerance = 1e-6;
    } else if (args.model == "mlp-tanh" || args.model == "mlp-relu") {
        signopt::Rng data_rng = rng.split(1);
        data = signopt::synth_blobs(data_rng, 64, 784, 10, 0.5);
        const auto act = args.model == "mlp-tanh" ? signopt::Activation::tanh
                                                  : signopt::Activation::relu;
        objective = std::make_unique<signopt::Mlp>(
            std::vector<std::size_t>{784, 128, 10}, act, &data);
        tolerance = args.model == "mlp-tanh" ? 1e-6 : 1e-5;
        max_coords = 200;
        // sub-1e-4 gradients are unmeasurable by central differences at
        // this tolerance; screen them (reported in the summary line)
        magnitude_floor = 1e-4;
    } else {
        throw std::invalid_argument("gradcheck: unknown model '" + args.model +
                                    "' (quadratic|logistic|mlp-tanh|mlp-relu)");
    }

    signopt::Rng init_rng = rng.split(2);
    signopt::Vec theta = objective->init_params(init_rng);
    if (args.model == "quadratic") {
        for (double& v : theta) {
            // Bounded away from 0 so every coordinate has a measurable slope.
            v = (init_rng.next_double() < 0.5 ? -1.0 : 1.0) * init_rng.uniform(0.1, 0.6);
        }
    } else if (args.model == "logistic") {
        for (double& v : theta) {
            v = init_rng.uniform(-0.5, 0.5);
        }
    }
    const auto batch = args.model == "quadratic"
                           ? signopt::counting_batch(1)
                           : signopt::counting_batch(data.size());
    signopt::Rng sample_rng = rng.split(3);
    const signopt::GradCheckReport report =
        signopt::grad_check(*objective, theta, batch, tolerance, step, max_coords,
                            &sample_rng, magnitude_floor);

    if (!args.quiet) {
        std::printf("model=%s checked=%zu excluded=%zu screened=%zu max_rel_error=%.3e "
                    "(tolerance %.0e) worst=#%zu\n",
                    args.model.c_str(), report.checked, report.excluded.size(),
                    report.skipped_small.size(), report.max_rel_error, report.tolerance,
                    report.worst_coordinate);
    }
    return report.passed ? kExitOk : kExitThreshold;
}

int cmd_idx_info(const std::vector<std::string>& paths) {
    for (const std::string& path : paths) {
        const signopt::IdxInfo info = signopt::idx_info(path);
        std::printf("%s: magic=0x%08x dims=", path.c_str(), info.magic);
        for (std::size_t i = 0; i < info.dims.size(); ++i) {
            std::printf("%s%u", i == 0 ? "" : "x", info.dims[i]);
        }
        std::printf(" items=%zu kind=%s\n", info.item_count(),
                    info.magic == signopt::kIdxImagesMagic ? "images" : "labels");
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sign-based optimizer experiment runner"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "train one (objective, dataset, optimizer) config");
    run->add_option("--config", run_args.config_path, "experiment config (JSON)")
        ->required();
    run->add_option("--seed", run_args.seed, "override the config seed")
        ->each([&](const std::string&) { run_args.seed_set = true; });
    run->add_option("--out", run_args.out_dir, "override the output directory");
    run->add_flag("--quiet", run_args.quiet, "suppress progress output");

    CompareArgs cmp_args;
    CLI::App* compare = app.add_subcommand(
        "compare", "run several optimizers on an identical data stream");
    compare->add_option("--config", cmp_args.config_paths,
                        "experiment configs differing only in optimizer (repeatable)")
        ->required()
        ->expected(-2);
    compare->add_option("--seed", cmp_args.seed, "shared seed for all runs")
        ->each([&](const std::string&) { cmp_args.seed_set = true; });
    compare->add_option("--threshold", cmp_args.threshold,
                        "test-error tolerance for epochs-to-threshold");
    compare->add_option("--out", cmp_args.out_dir, "output directory");
    compare->add_flag("--quiet", cmp_args.quiet, "suppress progress output");

    TheoryArgs theory_args;
    CLI::App* theory = app.add_subcommand(
        "theory", "convergence-bound experiment and inequality checks");
    theory->add_option("--config", theory_args.spec_path,
                       "problem spec (JSON); the built-in d=10 quadratic when omitted");
    theory->add_option("--seeds", theory_args.seeds, "number of trials to average");
    theory->add_option("--seed", theory_args.seed, "root seed");
    theory->add_option("--out", theory_args.out_dir, "output directory");
    theory->add_flag("--quiet", theory_args.quiet, "suppress report output");

    GradcheckArgs gc_args;
    CLI::App* gradcheck = app.add_subcommand(
        "gradcheck", "analytic vs central-difference gradients");
    gradcheck->add_option("--model", gc_args.model,
                          "quadratic|logistic|mlp-tanh|mlp-relu");
    gradcheck->add_option("--seed", gc_args.seed, "seed");
    gradcheck->add_flag("--quiet", gc_args.quiet, "suppress report output");

    std::vector<std::string> idx_paths;
    CLI::App* idx = app.add_subcommand("idx-info", "print IDX file headers");
    idx->add_option("paths", idx_paths, "IDX files (optionally gzipped)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*run) {
            return cmd_run(run_args);
        }
        if (*compare) {
            return cmd_compare(cmp_args);
        }
        if (*theory) {
            return cmd_theory(theory_args);
        }
        if (*gradcheck) {
            return cmd_gradcheck(gc_args);
        }
        if (*idx) {
            return cmd_idx_info(idx_paths);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::logic_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
