// Emits the bundled MNIST-layout synthetic digit corpus as IDX files.

#include <cstdio>

#include "CLI11.hpp"

#include "signopt/synth_digits.hpp"

int main(int argc, char** argv) {
    CLI::App app{"generate a deterministic MNIST-layout digit corpus"};
    signopt::DigitGenParams params;
    std::string out_dir = "data";
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--train", params.train_count, "training sample count");
    app.add_option("--test", params.test_count, "test sample count");
    app.add_option("--seed", params.seed, "generation seed");
    app.add_option("--noise", params.noise_std, "additive pixel noise std");
    app.add_option("--max-shift", params.max_shift, "max per-axis translation (px)");
    app.add_flag("--gzip", params.gzip, "write .gz files");
    CLI11_PARSE(app, argc, argv);

    try {
        signopt::generate_digits_idx(out_dir, params);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    std::printf("wrote %zu train / %zu test samples to %s\n", params.train_count,
                params.test_count, out_dir.c_str());
    return 0;
}
