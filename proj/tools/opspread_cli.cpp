#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "opspread/harness.hpp"

namespace {

int exit_code_for(opspread::ErrorKind k) {
    switch (k) {
        case opspread::ErrorKind::InvalidConfig: return 2;
        case opspread::ErrorKind::BudgetExceeded: return 3;
        default: return 1;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Operator-spreading laboratory: lattice simulation, doubled-space identities, "
                 "Haar moments and closed-form hydrodynamics"};
    app.require_subcommand(1);

    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;

    struct Sub {
        const char* name;
        const char* help;
        opspread::RunKind kind;
    };
    const Sub subs[] = {
        {"simulate", "Averaged density profiles and front fit", opspread::RunKind::Simulate},
        {"analytic", "Closed-form hydrodynamic predictions over an epsilon grid", opspread::RunKind::Analytic},
        {"haar-avg", "Monte Carlo Haar moments and OTOC averages", opspread::RunKind::HaarAvg},
        {"memory-exact", "Exact doubled-space identity checks", opspread::RunKind::MemoryExact},
        {"compare", "Simulated fronts against predictions", opspread::RunKind::Compare},
    };
    for (const auto& s : subs) {
        CLI::App* sc = app.add_subcommand(s.name, s.help);
        sc->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
        sc->add_option("--out", out_dir, "Output directory (overrides output_dir)");
        sc->add_option("--seed", seed, "Seed (overrides the config seed)");
        sc->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    std::optional<opspread::RunKind> kind;
    for (const auto& s : subs)
        if (app.got_subcommand(s.name)) kind = s.kind;

    try {
        opspread::ExperimentConfig cfg = opspread::load_config(config_path, kind);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        opspread::ResultRecord rec = opspread::run(cfg);
        std::cout << opspread::to_json(rec).dump(2) << "\n";
        return 0;
    } catch (const opspread::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
