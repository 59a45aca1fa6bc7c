#include "opspread/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "opspread/doubled.hpp"
#include "opspread/replica.hpp"

namespace opspread {

using nlohmann::json;

std::string format_csv(const CsvTable& t) {
    std::string out;
    for (std::size_t i = 0; i < t.header.size(); ++i) out += (i ? "," : "") + t.header[i];
    out += "\n";
    char buf[40];
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", row[i]);
            if (i) out += ",";
            out += buf;
        }
        out += "\n";
    }
    return out;
}

CsvTable parse_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::MissingSeries, "empty CSV");
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream rs(line);
        for (std::string cell; std::getline(rs, cell, ',');) row.push_back(std::strtod(cell.c_str(), nullptr));
        if (row.size() != t.header.size())
            throw Error(ErrorKind::DimensionMismatch, "CSV row width differs from header");
        t.rows.push_back(std::move(row));
    }
    return t;
}

void write_csv(const std::string& path, const CsvTable& t) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write '" + path + "'");
    out << format_csv(t);
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::MissingSeries, "cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_csv(ss.str());
}

json to_json(const ResultRecord& r) {
    json metrics = json::array();
    for (const auto& m : r.metrics) metrics.push_back({{"name", m.name}, {"value", m.value}, {"stderr", m.stderr}});
    return {{"run_kind", r.run_kind},
            {"config_hash", r.config_hash},
            {"started", r.started},
            {"finished", r.finished},
            {"provenance", {{"version", r.version}, {"seed", r.seed}}},
            {"metrics", metrics},
            {"files", r.files}};
}

namespace {

std::string utc_now() {
    std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json spec_json(const LatticeSpec& s) {
    return {{"q", s.q}, {"N", s.N}, {"boundary", to_string(s.boundary)}};
}

// Tr(rho_{<=x}^2) for a pure state, with site 0 the most significant index.
double cut_purity_direct(const CVec& psi, const LatticeSpec& spec, int x) {
    Eigen::Index left = Eigen::Index(spec.d_le(x)), right = Eigen::Index(spec.d_gt(x));
    Eigen::Map<const CMat> At(psi.data(), right, left);
    CMat rho = At.transpose() * At.conjugate();
    return rho.squaredNorm();
}

}  // namespace

CMat random_two_local_hamiltonian(int N, Rng& rng) {
    const int dH = 1 << N;
    CMat H = CMat::Zero(dH, dH);
    for (int j = 0; j + 1 < N; ++j) {
        CMat h(4, 4);
        for (int c = 0; c < 4; ++c)
            for (int r = 0; r < 4; ++r) h(r, c) = complex_gaussian(rng);
        h = (h + h.adjoint()).eval() / 2.0;
        CMat term = CMat::Zero(dH, dH);
        for (int a = 0; a < (1 << j); ++a)
            for (int b = 0; b < (1 << (N - j - 2)); ++b)
                for (int r = 0; r < 4; ++r)
                    for (int c = 0; c < 4; ++c) {
                        int stride = 1 << (N - j - 2);
                        term((a * 4 + r) * stride + b, (a * 4 + c) * stride + b) = h(r, c);
                    }
        H += term;
    }
    return H;
}

std::vector<IdentityRecord> memory_identity_checks(const MemoryConfig& cfg, std::uint64_t seed) {
    LatticeSpec spec{cfg.q, cfg.N, Boundary::Open};
    spec.validate();
    check_doubled_budget(spec);
    Rng rng = substream(seed, 0);
    CMat V = sample_haar_unitary(cfg.q, rng);
    CMat U = floquet_unitary(spec, cfg.epsilon, V);
    WBasis basis = build_basis(spec);
    std::vector<IdentityRecord> out;

    for (double k : cfg.k) {
        cplx om = omega_floquet(spec, cfg.epsilon, V, k);
        out.push_back({"omega_floquet", {{"epsilon", cfg.epsilon}, {"k", k}}, om,
                       std::abs(om - omega_closed_form(cfg.q, cfg.epsilon, k))});
    }
    double mis = 0;
    for (int x = 1; x < cfg.N; ++x) mis = std::max(mis, std::abs(cut_matrix_element(basis, U, 0, x)));
    out.push_back({"misaligned_cuts", {{"epsilon", cfg.epsilon}}, cplx(mis), mis});

    cplx z(cfg.z_re, cfg.z_im);
    for (double k : cfg.k) {
        SigmaResult s = sigma_exact(spec, cfg.epsilon, V, k, z);
        out.push_back({"sigma_exact", {{"epsilon", cfg.epsilon}, {"k", k}, {"z_re", cfg.z_re}, {"z_im", cfg.z_im}},
                       s.Sigma, s.residual});
    }
    AsymmetryPair ap = growth_asymmetry_check(spec, cfg.epsilon, V, 0, 1, 2);
    out.push_back({"growth_asymmetry", {{"x", 0}, {"y", 1}, {"t", 2}}, cplx(ap.lhs),
                   std::abs(ap.lhs - ap.rhs) / std::max(std::abs(ap.rhs), 1e-300)});
    double cont = continuity_residual(basis, U);
    out.push_back({"continuity", {{"epsilon", cfg.epsilon}}, cplx(cont), cont});

    DoubledVector probe{CMat(basis.W[0].mat.rows(), basis.W[0].mat.cols()), spec};
    for (Eigen::Index c = 0; c < probe.mat.cols(); ++c)
        for (Eigen::Index r = 0; r < probe.mat.rows(); ++r) probe.mat(r, c) = complex_gaussian(rng);
    SwapResiduals sw = swap_residuals(basis, U, probe);
    out.push_back({"replica_swap", json::object(), cplx(0),
                   std::max({sw.involution, sw.commutes, sw.maps_right_to_left})});

    AxiomResiduals ax = inner_product_axioms(basis, 50, seed ^ 0x5eedULL);
    out.push_back({"inner_product_axioms", {{"probes", 50}}, cplx(ax.min_gram_eigenvalue),
                   std::max(ax.conjugate_symmetry, ax.linearity)});

    CVec psi(Eigen::Index(spec.dim()));
    for (Eigen::Index i = 0; i < psi.size(); ++i) psi(i) = complex_gaussian(rng);
    psi.normalize();
    CMat rho = psi * psi.adjoint();
    double worst = 0;
    for (int x = 0; x < cfg.N; ++x)
        worst = std::max(worst, std::abs(purity_from_cut(basis, rho, x) - cut_purity_direct(psi, spec, x)));
    out.push_back({"purity_from_cut", json::object(), cplx(0), worst});

    if (cfg.q == 2) {
        CMat H = random_two_local_hamiltonian(cfg.N, rng);
        double om = omega_hamiltonian_check(spec, H);
        out.push_back({"hamiltonian_omega", json::object(), cplx(om), om});
    }
    for (auto& r : out) r.parameters["spec"] = spec_json(spec);
    return out;
}

ProfileSeries simulate_profiles(const LatticeConfig& cfg, std::uint64_t seed, int threads) {
    LatticeSpec spec{cfg.q, cfg.N, cfg.boundary};
    if (cfg.exact_average) return fully_random_exact(spec, cfg.epsilon, cfg.t_max);
    spec.validate();
    ScramblerPlan plan{cfg.mode, seed, cfg.epsilon};
    return averaged_profile(spec, plan, cfg.initial, cfg.t_max, cfg.n_samples, threads);
}

std::vector<ComparePoint> compare_points(const CompareConfig& cfg, std::uint64_t seed, int threads) {
    std::vector<ComparePoint> out;
    for (std::size_t i = 0; i < cfg.epsilons.size(); ++i) {
        LatticeConfig lc;
        lc.q = cfg.q;
        lc.N = cfg.N;
        lc.epsilon = cfg.epsilons[i];
        lc.mode = cfg.mode;
        lc.t_max = cfg.t_max;
        lc.n_samples = cfg.n_samples;
        lc.exact_average = cfg.exact_average;
        lc.fit = cfg.fit;
        ProfileSeries series = simulate_profiles(lc, splitmix64(seed + i), threads);
        ComparePoint p;
        p.epsilon = lc.epsilon;
        p.fit = fit_front(series, cfg.fit);
        p.prediction = velocity_corrections(lc.epsilon, cfg.q, cfg.mode);
        p.v_sigma = std::abs(p.fit.v - p.prediction.v_total) / p.fit.stderr_v;
        p.D_sigma = std::abs(p.fit.D - p.prediction.d0) / p.fit.stderr_D;
        out.push_back(p);
    }
    return out;
}

namespace {

void write_json(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::InvalidConfig, "cannot write '" + path + "'");
    out << j.dump(2) << "\n";
}

void run_simulate(const ExperimentConfig& cfg, const std::filesystem::path& dir, ResultRecord& rec) {
    const LatticeConfig& lc = *cfg.lattice;
    ProfileSeries series = simulate_profiles(lc, cfg.seed, cfg.threads);
    CsvTable prof{{"t", "x", "rho_mean", "rho_stderr"}, {}};
    for (int t = 0; t <= series.t_max; ++t) {
        for (int x = 0; x < series.N; ++x)
            prof.rows.push_back({double(t), double(x), series.mean[t].rho[x], series.rho_stderr[t][x]});
        rec.plots.grid.push_back(series.mean[t].rho);
    }
    write_csv((dir / "profile.csv").string(), prof);
    rec.files.push_back("profile.csv");

    CsvTable summary{{"v", "stderr_v", "D", "stderr_D", "window_lo", "window_hi"}, {}};
    try {
        FrontFit f = fit_front(series, lc.fit);
        summary.rows.push_back({f.v, f.stderr_v, f.D, f.stderr_D, double(f.window_lo), double(f.window_hi)});
        rec.metrics.push_back({"v", f.v, f.stderr_v});
        rec.metrics.push_back({"D", f.D, f.stderr_D});
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::InsufficientWindow) throw;
        double nan = std::nan("");
        summary.rows.push_back({nan, nan, nan, nan, nan, nan});
        rec.metrics.push_back({"insufficient_window", 1, 0});
    }
    write_csv((dir / "summary.csv").string(), summary);
    rec.files.push_back("summary.csv");
    write_plot((dir / "front_heat.svg").string(), rec.plots, PlotKind::FrontHeat);
    rec.files.push_back("front_heat.svg");
}

void run_analytic(const ExperimentConfig& cfg, const std::filesystem::path& dir, ResultRecord& rec) {
    const AnalyticConfig& ac = *cfg.analytic;
    CsvTable t{kHydroColumns, {}};
    for (double e : ac.epsilons) t.rows.push_back(hydro_row_values(hydro_row(e, ac.q)));
    write_csv((dir / "hydro.csv").string(), t);
    rec.files.push_back("hydro.csv");
    for (std::size_t c = 0; c < t.header.size(); ++c) {
        std::vector<double> col;
        for (const auto& row : t.rows) col.push_back(row[c]);
        rec.plots.series[t.header[c]] = col;
    }
    write_plot((dir / "f_curve.svg").string(), rec.plots, PlotKind::FCurve);
    write_plot((dir / "velocity_corrections.svg").string(), rec.plots, PlotKind::VelocityCorrections);
    rec.files.push_back("f_curve.svg");
    rec.files.push_back("velocity_corrections.svg");
    rec.metrics.push_back({"grid_points", double(t.rows.size()), 0});
}

void run_haar(const ExperimentConfig& cfg, const std::filesystem::path& dir, ResultRecord& rec) {
    const HaarConfig& hc = *cfg.haar;
    json arr = json::array();
    std::uint64_t idx = 0;
    auto emit = [&](const std::string& name, const std::vector<CorrelatorFactor>& factors, json prediction) {
        MomentEstimate est = mc_moment(factors, hc.q, hc.n_samples, splitmix64(cfg.seed + idx++), cfg.threads);
        json strings = json::array();
        for (const auto& f : factors) strings.push_back({{"times", f.times}, {"conjugate", f.conjugate}});
        json sig = nullptr;
        if (prediction.is_number())
            sig = std::abs(est.mean - cplx(prediction.get<double>())) / est.stderr;
        arr.push_back({{"name", name}, {"strings", strings}, {"q", hc.q}, {"n_samples", est.n_samples},
                       {"mean_re", est.mean.real()}, {"mean_im", est.mean.imag()}, {"stderr", est.stderr},
                       {"prediction", prediction}, {"sigmas", sig}});
        rec.metrics.push_back({name, est.mean.real(), est.stderr});
    };
    for (const auto& m : hc.moments) {
        json pred = nullptr;
        if (m.factors.size() == 2 && m.factors[0].conjugate != m.factors[1].conjugate) {
            const auto& a = m.factors[0].conjugate ? m.factors[1] : m.factors[0];
            const auto& b = m.factors[0].conjugate ? m.factors[0] : m.factors[1];
            pred = two_correlator_prediction(a.times, b.times, hc.q);
        }
        emit(m.name, m.factors, pred);
    }
    for (const auto& o : hc.otocs) emit(o.name, {{otoc_string(o.decoration), false}}, otoc_leading(o.decoration, hc.q));
    write_json((dir / "haar.json").string(), arr);
    rec.files.push_back("haar.json");
}

void run_memory(const ExperimentConfig& cfg, const std::filesystem::path& dir, ResultRecord& rec) {
    const MemoryConfig& mc = *cfg.memory;
    json arr = json::array();
    for (const auto& r : memory_identity_checks(mc, cfg.seed)) {
        json params = r.parameters;
        json spec = params["spec"];
        params.erase("spec");
        arr.push_back({{"operation", r.operation}, {"spec", spec}, {"parameters", params},
                       {"value_re", r.value.real()}, {"value_im", r.value.imag()}, {"residual", r.residual}});
        rec.metrics.push_back({r.operation, r.value.real(), r.residual});
    }
    write_json((dir / "memory.json").string(), arr);
    rec.files.push_back("memory.json");
}

void run_compare(const ExperimentConfig& cfg, const std::filesystem::path& dir, ResultRecord& rec) {
    const CompareConfig& cc = *cfg.compare;
    CsvTable t{{"epsilon", "q", "v_fit", "stderr_v", "v_pred", "v_sigma", "D_fit", "stderr_D", "d0", "D_sigma",
                "window_lo", "window_hi"},
               {}};
    for (const auto& p : compare_points(cc, cfg.seed, cfg.threads)) {
        t.rows.push_back({p.epsilon, double(cc.q), p.fit.v, p.fit.stderr_v, p.prediction.v_total, p.v_sigma,
                          p.fit.D, p.fit.stderr_D, p.prediction.d0, p.D_sigma, double(p.fit.window_lo),
                          double(p.fit.window_hi)});
        rec.metrics.push_back({"v_sigma", p.v_sigma, 0});
    }
    write_csv((dir / "compare.csv").string(), t);
    rec.files.push_back("compare.csv");
}

}  // namespace

ResultRecord run(const ExperimentConfig& cfg) {
    std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    ResultRecord rec;
    rec.run_kind = to_string(cfg.run_kind);
    rec.config_hash = config_hash(cfg);
    rec.seed = cfg.seed;
    rec.started = utc_now();
    switch (cfg.run_kind) {
        case RunKind::Simulate: run_simulate(cfg, dir, rec); break;
        case RunKind::Analytic: run_analytic(cfg, dir, rec); break;
        case RunKind::HaarAvg: run_haar(cfg, dir, rec); break;
        case RunKind::MemoryExact: run_memory(cfg, dir, rec); break;
        case RunKind::Compare: run_compare(cfg, dir, rec); break;
    }
    rec.finished = utc_now();
    write_json((dir / "record.json").string(), to_json(rec));
    return rec;
}

}  // namespace opspread
