#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "qrbm/qrbm.h"

int main(int argc, char** argv)
{
    CLI::App app{"Sparse RBM Q-matrix estimation: simulate, train, cross-validate, evaluate"};
    app.set_version_flag("--version", std::string(qrbm_version()));

    std::string config;
    std::optional<std::uint64_t> seed;
    std::size_t threads = 0;
    std::string out = ".";
    app.add_option("--config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
    app.add_option("--seed", seed, "master seed, overrides the config");
    app.add_option("--threads", threads, "worker threads for cv (default: config, else 1)")
        ->check(CLI::PositiveNumber);
    app.add_option("--out", out, "output directory")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    const qrbm_status s =
        qrbm_run_config(config.c_str(), out.c_str(), seed ? &*seed : nullptr, threads);
    if (s != QRBM_OK) {
        std::cerr << "qrbm: " << qrbm_status_name(s) << ": " << qrbm_last_error() << "\n";
        return static_cast<int>(s);
    }
    return 0;
}
