#include "opspread/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

namespace opspread {

using nlohmann::json;

std::string to_string(RunKind k) {
    switch (k) {
        case RunKind::Simulate: return "simulate";
        case RunKind::Analytic: return "analytic";
        case RunKind::HaarAvg: return "haar-avg";
        case RunKind::MemoryExact: return "memory-exact";
        case RunKind::Compare: return "compare";
    }
    return "?";
}

RunKind parse_run_kind(const std::string& s) {
    for (RunKind k : {RunKind::Simulate, RunKind::Analytic, RunKind::HaarAvg, RunKind::MemoryExact,
                      RunKind::Compare})
        if (to_string(k) == s) return k;
    throw Error(ErrorKind::InvalidConfig, "unknown run kind '" + s + "'");
}

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::InvalidConfig, where + ": " + what);
}

// Reads fields of one JSON object and rejects any key that was never asked for.
class Section {
public:
    Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) bad(where_, "expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    template <class T>
    void get(const std::string& key, T& out) {
        if (!has(key)) return;
        try {
            out = j_.at(key).get<T>();
        } catch (const json::exception&) {
            bad(where_ + "." + key, "wrong type");
        }
    }

    const json& raw(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) bad(where_, "unknown key '" + it.key() + "'");
    }

    const std::string& where() const { return where_; }

private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& where, const std::string& what) {
    if (!ok) bad(where, what);
}

void check_finite(double v, const std::string& where) { require(std::isfinite(v), where, "must be finite"); }

FitWindowPolicy read_fit(const json& j, const std::string& where) {
    Section s(j, where);
    FitWindowPolicy f;
    s.get("margin", f.margin);
    s.get("t_min", f.t_min);
    s.get("t_max", f.t_max);
    s.finish();
    require(f.margin >= 0 && std::isfinite(f.margin), where, "margin must be >= 0");
    require(f.t_min >= 0, where, "t_min must be >= 0");
    require(f.t_max == -1 || f.t_max >= f.t_min, where, "t_max must be -1 or >= t_min");
    return f;
}

ScramblerMode read_mode(Section& s) {
    std::string m = "fully-random";
    s.get("scrambler_mode", m);
    return parse_scrambler_mode(m);
}

LatticeConfig read_lattice(const json& j) {
    Section s(j, "lattice");
    LatticeConfig c;
    s.get("q", c.q);
    s.get("N", c.N);
    s.get("epsilon", c.epsilon);
    c.mode = read_mode(s);
    std::string b = "open";
    s.get("boundary", b);
    c.boundary = parse_boundary(b);
    s.get("t_max", c.t_max);
    s.get("n_samples", c.n_samples);
    std::string init = "right-front";
    s.get("initial", init);
    if (init == "right-front")
        c.initial = InitialOperatorPolicy::RightFront;
    else if (init == "left-front")
        c.initial = InitialOperatorPolicy::LeftFront;
    else
        bad("lattice.initial", "expected right-front or left-front");
    s.get("exact_average", c.exact_average);
    if (s.has("fit_window_policy")) c.fit = read_fit(s.raw("fit_window_policy"), "lattice.fit_window_policy");
    s.finish();
    require(c.q >= 2, "lattice.q", "must be >= 2");
    require(c.N >= 2, "lattice.N", "must be >= 2");
    check_finite(c.epsilon, "lattice.epsilon");
    require(c.t_max >= 1, "lattice.t_max", "must be >= 1");
    require(c.n_samples >= 1, "lattice.n_samples", "must be >= 1");
    require(!c.exact_average || c.mode == ScramblerMode::FullyRandom, "lattice.exact_average",
            "only available for fully-random");
    require(!c.exact_average || c.boundary == Boundary::Open, "lattice.exact_average",
            "only available for open chains");
    return c;
}

AnalyticConfig read_analytic(const json& j) {
    Section s(j, "analytic");
    AnalyticConfig c;
    s.get("q", c.q);
    s.get("epsilons", c.epsilons);
    s.finish();
    require(c.q >= 2, "analytic.q", "must be >= 2");
    require(!c.epsilons.empty(), "analytic.epsilons", "must be non-empty");
    for (double e : c.epsilons) check_finite(e, "analytic.epsilons");
    return c;
}

std::vector<int> read_bits(Section& s, const std::string& key) {
    std::vector<int> v;
    require(s.has(key), s.where() + "." + key, "missing");
    s.get(key, v);
    for (int b : v) require(b == 0 || b == 1, s.where() + "." + key, "bits must be 0 or 1");
    return v;
}

HaarConfig read_haar(const json& j) {
    Section s(j, "haar");
    HaarConfig c;
    s.get("q", c.q);
    s.get("n_samples", c.n_samples);
    if (s.has("moments")) {
        const json& arr = s.raw("moments");
        require(arr.is_array(), "haar.moments", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string w = "haar.moments[" + std::to_string(i) + "]";
            Section m(arr[i], w);
            HaarMomentCase hc;
            m.get("name", hc.name);
            require(m.has("factors") && m.raw("factors").is_array(), w + ".factors", "expected an array");
            const json& fs = m.raw("factors");
            for (std::size_t k = 0; k < fs.size(); ++k) {
                Section f(fs[k], w + ".factors[" + std::to_string(k) + "]");
                CorrelatorFactor cf;
                f.get("times", cf.times);
                f.get("conjugate", cf.conjugate);
                f.finish();
                require(!minimal_form(cf.times).empty(), f.where(), "string reduces to the identity");
                hc.factors.push_back(cf);
            }
            m.finish();
            require(!hc.factors.empty(), w + ".factors", "must be non-empty");
            c.moments.push_back(hc);
        }
    }
    if (s.has("otocs")) {
        const json& arr = s.raw("otocs");
        require(arr.is_array(), "haar.otocs", "expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            std::string w = "haar.otocs[" + std::to_string(i) + "]";
            Section o(arr[i], w);
            HaarOtocCase oc;
            o.get("name", oc.name);
            oc.decoration.s1 = read_bits(o, "s1");
            oc.decoration.s1bar = read_bits(o, "s1bar");
            oc.decoration.s2 = read_bits(o, "s2");
            oc.decoration.s2bar = read_bits(o, "s2bar");
            o.finish();
            std::size_t n = oc.decoration.s1.size();
            require(oc.decoration.s1bar.size() == n && oc.decoration.s2.size() == n &&
                        oc.decoration.s2bar.size() == n,
                    w, "decoration strings must share length T-1");
            require(n >= 1, w, "T must be >= 2");
            c.otocs.push_back(oc);
        }
    }
    s.finish();
    require(c.q >= 2, "haar.q", "must be >= 2");
    require(c.n_samples >= 2, "haar.n_samples", "must be >= 2");
    require(!c.moments.empty() || !c.otocs.empty(), "haar", "needs moments or otocs");
    return c;
}

MemoryConfig read_memory(const json& j) {
    Section s(j, "memory");
    MemoryConfig c;
    s.get("q", c.q);
    s.get("N", c.N);
    s.get("epsilon", c.epsilon);
    s.get("k", c.k);
    s.get("z_re", c.z_re);
    s.get("z_im", c.z_im);
    s.finish();
    require(c.q >= 2, "memory.q", "must be >= 2");
    require(c.N >= 3, "memory.N", "must be >= 3");
    check_finite(c.epsilon, "memory.epsilon");
    for (double k : c.k) check_finite(k, "memory.k");
    check_finite(c.z_re, "memory.z_re");
    require(std::isfinite(c.z_im) && c.z_im > 0, "memory.z_im", "must be > 0");
    return c;
}

CompareConfig read_compare(const json& j) {
    Section s(j, "compare");
    CompareConfig c;
    s.get("q", c.q);
    s.get("N", c.N);
    s.get("epsilons", c.epsilons);
    c.mode = read_mode(s);
    s.get("t_max", c.t_max);
    s.get("n_samples", c.n_samples);
    s.get("exact_average", c.exact_average);
    if (s.has("fit_window_policy")) c.fit = read_fit(s.raw("fit_window_policy"), "compare.fit_window_policy");
    s.finish();
    require(c.q >= 2, "compare.q", "must be >= 2");
    require(c.N >= 2, "compare.N", "must be >= 2");
    require(!c.epsilons.empty(), "compare.epsilons", "must be non-empty");
    for (double e : c.epsilons) check_finite(e, "compare.epsilons");
    require(c.t_max >= 1, "compare.t_max", "must be >= 1");
    require(c.n_samples >= 2 || c.exact_average, "compare.n_samples", "must be >= 2");
    require(!c.exact_average || c.mode == ScramblerMode::FullyRandom, "compare.exact_average",
            "only available for fully-random");
    return c;
}

}  // namespace

ExperimentConfig parse_config(const json& doc, std::optional<RunKind> kind) {
    Section s(doc, "config");
    ExperimentConfig c;
    if (s.has("run_kind")) {
        std::string rk;
        s.get("run_kind", rk);
        c.run_kind = parse_run_kind(rk);
        if (kind && *kind != c.run_kind)
            bad("config.run_kind", "'" + rk + "' does not match the subcommand");
    } else if (kind) {
        c.run_kind = *kind;
    } else {
        bad("config", "missing run_kind");
    }
    s.get("output_dir", c.output_dir);
    s.get("seed", c.seed);
    s.get("threads", c.threads);
    if (s.has("lattice")) c.lattice = read_lattice(s.raw("lattice"));
    if (s.has("analytic")) c.analytic = read_analytic(s.raw("analytic"));
    if (s.has("haar")) c.haar = read_haar(s.raw("haar"));
    if (s.has("memory")) c.memory = read_memory(s.raw("memory"));
    if (s.has("compare")) c.compare = read_compare(s.raw("compare"));
    s.finish();
    require(c.threads >= 1, "config.threads", "must be >= 1");
    require(!c.output_dir.empty(), "config.output_dir", "must be non-empty");
    switch (c.run_kind) {
        case RunKind::Simulate: require(bool(c.lattice), "config", "simulate needs a lattice section"); break;
        case RunKind::Analytic: require(bool(c.analytic), "config", "analytic needs an analytic section"); break;
        case RunKind::HaarAvg: require(bool(c.haar), "config", "haar-avg needs a haar section"); break;
        case RunKind::MemoryExact: require(bool(c.memory), "config", "memory-exact needs a memory section"); break;
        case RunKind::Compare: require(bool(c.compare), "config", "compare needs a compare section"); break;
    }
    return c;
}

ExperimentConfig load_config(const std::string& path, std::optional<RunKind> kind) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidConfig, "cannot open config '" + path + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::InvalidConfig, std::string("malformed JSON: ") + e.what());
    }
    return parse_config(doc, kind);
}

namespace {

json fit_json(const FitWindowPolicy& f) {
    return {{"margin", f.margin}, {"t_min", f.t_min}, {"t_max", f.t_max}};
}

}  // namespace

json to_json(const ExperimentConfig& c) {
    json j;
    j["run_kind"] = to_string(c.run_kind);
    j["output_dir"] = c.output_dir;
    j["seed"] = c.seed;
    j["threads"] = c.threads;
    if (c.lattice) {
        const auto& l = *c.lattice;
        j["lattice"] = {{"q", l.q}, {"N", l.N}, {"epsilon", l.epsilon},
                        {"scrambler_mode", to_string(l.mode)}, {"boundary", to_string(l.boundary)},
                        {"t_max", l.t_max}, {"n_samples", l.n_samples},
                        {"initial", l.initial == InitialOperatorPolicy::RightFront ? "right-front" : "left-front"},
                        {"exact_average", l.exact_average}, {"fit_window_policy", fit_json(l.fit)}};
    }
    if (c.analytic) j["analytic"] = {{"q", c.analytic->q}, {"epsilons", c.analytic->epsilons}};
    if (c.haar) {
        json moments = json::array(), otocs = json::array();
        for (const auto& m : c.haar->moments) {
            json fs = json::array();
            for (const auto& f : m.factors) fs.push_back({{"times", f.times}, {"conjugate", f.conjugate}});
            moments.push_back({{"name", m.name}, {"factors", fs}});
        }
        for (const auto& o : c.haar->otocs)
            otocs.push_back({{"name", o.name}, {"s1", o.decoration.s1}, {"s1bar", o.decoration.s1bar},
                             {"s2", o.decoration.s2}, {"s2bar", o.decoration.s2bar}});
        j["haar"] = {{"q", c.haar->q}, {"n_samples", c.haar->n_samples}, {"moments", moments}, {"otocs", otocs}};
    }
    if (c.memory)
        j["memory"] = {{"q", c.memory->q}, {"N", c.memory->N}, {"epsilon", c.memory->epsilon},
                       {"k", c.memory->k}, {"z_re", c.memory->z_re}, {"z_im", c.memory->z_im}};
    if (c.compare) {
        const auto& k = *c.compare;
        j["compare"] = {{"q", k.q}, {"N", k.N}, {"epsilons", k.epsilons},
                        {"scrambler_mode", to_string(k.mode)}, {"t_max", k.t_max},
                        {"n_samples", k.n_samples}, {"exact_average", k.exact_average},
                        {"fit_window_policy", fit_json(k.fit)}};
    }
    return j;
}

std::string config_hash(const ExperimentConfig& cfg) {
    // FNV-1a over the canonical dump; output_dir and threads do not affect results.
    json j = to_json(cfg);
    j.erase("output_dir");
    j.erase("threads");
    std::string s = j.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace opspread
