#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qrob/report.hpp"

int main(int argc, char** argv) {
    CLI::App app{"probability metrics, risk functionals and robustness checks"};
    app.require_subcommand(1);

    struct Args {
        std::string config;
        std::string out;
        std::string format;
        std::uint64_t seed = 0;
        bool seed_set = false;
    };

    const std::vector<std::string> experiments = {"metric", "risk", "lipschitz-check",
                                                  "robustness", "iqr-scan"};
    std::map<std::string, Args> args;
    for (const auto& name : experiments) {
        auto* sub = app.add_subcommand(name);
        auto& a = args[name];
        sub->add_option("--config", a.config, "experiment config file (JSON)")
            ->required();
        sub->add_option("--out", a.out, "report output path (default: stdout)");
        sub->add_option("--format", a.format, "csv or json")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--seed", a.seed, "override the config seed")
            ->each([&a](const std::string&) { a.seed_set = true; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) ? 1 : 0;
    }

    for (const auto& name : experiments) {
        if (!app.get_subcommand(name)->parsed()) continue;
        const Args& a = args[name];
        qrob::RunOverrides overrides;
        overrides.expect_experiment = name;
        if (!a.out.empty()) overrides.out = a.out;
        if (!a.format.empty()) overrides.format = a.format;
        if (a.seed_set) overrides.seed = a.seed;
        return qrob::run_experiment(a.config, overrides);
    }
    return 1;
}
