// homoglab: config-driven batch harness for the homogenization laboratory.
//
//   homoglab <pipeline> --config <path> [--out <dir>] [--seed <n>] [--threads <n>]
//   homoglab replay <report.json>

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "homoglab/pipelines.hpp"

namespace {

int run_pipeline(const std::string& pipeline, const std::string& config_path,
                 const std::string& out_override, long seed_override, int threads) {
#ifdef _OPENMP
    if (threads > 0) omp_set_num_threads(threads);
#else
    (void)threads;
#endif
    homoglab::ExperimentConfig cfg;
    try {
        cfg = homoglab::ExperimentConfig::parse_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return homoglab::kStatusValidation;
    }
    if (cfg.pipeline.empty()) cfg.pipeline = pipeline;
    if (cfg.pipeline != pipeline) {
        std::cerr << "config error: config names pipeline '" << cfg.pipeline
                  << "' but the subcommand is '" << pipeline << "'\n";
        return homoglab::kStatusValidation;
    }
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (seed_override >= 0) cfg.seed = uint64_t(seed_override);

    const homoglab::RunResult res = homoglab::run(cfg);
    for (const std::string& m : res.messages)
        (res.status == homoglab::kStatusOk ? std::cout : std::cerr) << m << "\n";
    if (res.status == homoglab::kStatusOk)
        std::cout << "artifacts: " << cfg.out_dir << " (" << res.artifacts.size() << " files)\n";
    return res.status;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"numerical laboratory for elliptic periodic homogenization"};
    app.require_subcommand(1);

    std::string config_path, out_dir, report_path;
    long seed = -1;
    int threads = 0;

    const std::vector<std::string> pipelines = {"cell",      "solve",    "audit", "sweep",
                                                "propagate", "halfball", "lift"};
    for (const std::string& name : pipelines) {
        CLI::App* sub = app.add_subcommand(name, name + " pipeline");
        sub->add_option("--config", config_path, "experiment config file")->required();
        sub->add_option("--out", out_dir, "output directory (overrides config)");
        sub->add_option("--seed", seed, "seed (overrides config)");
        sub->add_option("--threads", threads, "solver threads");
    }
    CLI::App* rep = app.add_subcommand("replay", "re-run a report and diff");
    rep->add_option("report", report_path, "report.json path")->required();

    CLI11_PARSE(app, argc, argv);

    const std::string sub = app.get_subcommands().front()->get_name();
    if (sub == "replay") {
        try {
            const homoglab::ReplayResult res = homoglab::replay(report_path);
            if (res.diffs.empty() && res.status == homoglab::kStatusOk) {
                std::cout << "replay: empty diff\n";
                return 0;
            }
            for (const std::string& d : res.diffs) std::cout << d << "\n";
            return res.status == homoglab::kStatusOk ? 1 : res.status;
        } catch (const std::exception& e) {
            std::cerr << "replay error: " << e.what() << "\n";
            return homoglab::kStatusValidation;
        }
    }
    return run_pipeline(sub, config_path, out_dir, seed, threads);
}
