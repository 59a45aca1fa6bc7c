#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "opspread/haar.hpp"
#include "opspread/lattice.hpp"

namespace opspread {

enum class RunKind { Simulate, Analytic, HaarAvg, MemoryExact, Compare };

std::string to_string(RunKind k);
RunKind parse_run_kind(const std::string& s);

struct LatticeConfig {
    int q = 2;
    int N = 6;
    double epsilon = 0.7853981633974483;
    ScramblerMode mode = ScramblerMode::FullyRandom;
    Boundary boundary = Boundary::Open;
    int t_max = 8;
    int n_samples = 10;
    InitialOperatorPolicy initial = InitialOperatorPolicy::RightFront;
    // Fully-random runs only: replace sampling by the exact replica average.
    bool exact_average = false;
    FitWindowPolicy fit;
};

struct AnalyticConfig {
    int q = 2;
    std::vector<double> epsilons;
};

struct HaarMomentCase {
    std::string name;
    std::vector<CorrelatorFactor> factors;
};

struct HaarOtocCase {
    std::string name;
    Decoration decoration;
};

struct HaarConfig {
    int q = 16;
    long n_samples = 100000;
    std::vector<HaarMomentCase> moments;
    std::vector<HaarOtocCase> otocs;
};

struct MemoryConfig {
    int q = 2;
    int N = 3;
    double epsilon = 0.39269908169872414;
    std::vector<double> k{1.5707963267948966};
    double z_re = 0.0;
    double z_im = 0.1;
};

struct CompareConfig {
    int q = 2;
    int N = 8;
    std::vector<double> epsilons{0.7853981633974483};
    ScramblerMode mode = ScramblerMode::FullyRandom;
    int t_max = 12;
    int n_samples = 200;
    bool exact_average = false;
    FitWindowPolicy fit;
};

struct ExperimentConfig {
    RunKind run_kind = RunKind::Analytic;
    std::string output_dir = "out";
    std::uint64_t seed = 0;
    int threads = 1;
    std::optional<LatticeConfig> lattice;
    std::optional<AnalyticConfig> analytic;
    std::optional<HaarConfig> haar;
    std::optional<MemoryConfig> memory;
    std::optional<CompareConfig> compare;
};

// Validates every field and rejects unknown keys; throws invalid-config.
// `kind` supplies the run kind when the document omits it and must match it otherwise.
ExperimentConfig parse_config(const nlohmann::json& doc, std::optional<RunKind> kind = std::nullopt);
ExperimentConfig load_config(const std::string& path, std::optional<RunKind> kind = std::nullopt);

// Canonical form used for hashing; defaults are filled in.
nlohmann::json to_json(const ExperimentConfig& cfg);
std::string config_hash(const ExperimentConfig& cfg);

}  // namespace opspread
