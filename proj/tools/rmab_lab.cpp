#include <cstdio>
#include <exception>

#include "rmab/cli.hpp"

int main(int argc, char** argv) {
    using namespace rmab::cli;
    try {
        ExperimentConfig config;
        if (!parse_command_line(argc, argv, config))
            return 0;
        const ResultBundle bundle = run_experiment(config);
        std::fputs(bundle.summary.c_str(), stdout);
        std::printf("manifest: %s\n", bundle.manifest_path.string().c_str());
        for (const auto& p : bundle.csv_paths)
            std::printf("csv: %s\n", p.string().c_str());
        return bundle.exit_code;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error in field '%s': %s\n", e.field().c_str(),
                     e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
