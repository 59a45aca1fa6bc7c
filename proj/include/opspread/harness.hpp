#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "opspread/config.hpp"
#include "opspread/hydro.hpp"
#include "opspread/plot.hpp"

namespace opspread {

inline constexpr const char* kVersion = "0.1.0";

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    bool operator==(const CsvTable&) const = default;
};

// Values are written with 17 significant digits, so read_csv(write_csv(t)) == t.
std::string format_csv(const CsvTable& t);
CsvTable parse_csv(const std::string& text);
void write_csv(const std::string& path, const CsvTable& t);
CsvTable read_csv(const std::string& path);

struct Metric {
    std::string name;
    double value = 0;
    double stderr = 0;
};

struct ResultRecord {
    std::string run_kind;
    std::string config_hash;
    std::string started, finished;
    std::string version = kVersion;
    std::uint64_t seed = 0;
    std::vector<Metric> metrics;
    std::vector<std::string> files;  // relative to the output directory
    PlotData plots;
};

nlohmann::json to_json(const ResultRecord& r);

struct IdentityRecord {
    std::string operation;
    nlohmann::json parameters;
    cplx value;
    double residual = 0;
};

// Random Hermitian nearest-neighbour Hamiltonian on N qubits (open chain).
CMat random_two_local_hamiltonian(int N, Rng& rng);

// Exact doubled-space identity checks for one memory configuration.
std::vector<IdentityRecord> memory_identity_checks(const MemoryConfig& cfg, std::uint64_t seed);

// Density profiles for the lattice configuration (exact replica average when requested).
ProfileSeries simulate_profiles(const LatticeConfig& cfg, std::uint64_t seed, int threads);

struct ComparePoint {
    double epsilon = 0;
    FrontFit fit;
    HydroPrediction prediction;
    double v_sigma = 0;  // |v_fit - v_total| / stderr_v
    double D_sigma = 0;  // |D_fit - d0| / stderr_D
};

std::vector<ComparePoint> compare_points(const CompareConfig& cfg, std::uint64_t seed, int threads);

// Dispatches on run_kind, writes CSV/JSON/SVG into cfg.output_dir (created if needed)
// and returns the record that was also written to record.json.
ResultRecord run(const ExperimentConfig& cfg);

}  // namespace opspread
