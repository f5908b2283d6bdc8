#include "crossdiff/config.hpp"

#include <cmath>
#include <cstdint>
#include <set>

#include "json.hpp"

#include "crossdiff/entropy.hpp"

namespace crossdiff {

namespace {

using json = nlohmann::ordered_json;

std::string joined(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

[[noreturn]] void fail(const std::string& msg) { throw ConfigError(msg); }

const json& need(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.is_object() || !obj.contains(key)) {
        fail("missing key: " + joined(path, key));
    }
    return obj.at(key);
}

void check_known_keys(const json& obj, const std::string& path,
                      const std::set<std::string>& allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            fail("unknown key: " + joined(path, it.key()));
        }
    }
}

double get_double(const json& obj, const std::string& path, const std::string& key) {
    const json& v = need(obj, path, key);
    if (!v.is_number()) fail("expected a number at " + joined(path, key));
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail("non-finite value at " + joined(path, key));
    return d;
}

double get_double_or(const json& obj, const std::string& path, const std::string& key,
                     double fallback) {
    if (!obj.contains(key)) return fallback;
    return get_double(obj, path, key);
}

long long get_int(const json& obj, const std::string& path, const std::string& key) {
    const json& v = need(obj, path, key);
    if (!v.is_number_integer()) fail("expected an integer at " + joined(path, key));
    return v.get<long long>();
}

bool get_bool_or(const json& obj, const std::string& path, const std::string& key,
                 bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail("expected a boolean at " + joined(path, key));
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const std::string& key) {
    const json& v = need(obj, path, key);
    if (!v.is_string()) fail("expected a string at " + joined(path, key));
    return v.get<std::string>();
}

Vec2 get_vec2(const json& obj, const std::string& path, const std::string& key) {
    const json& v = need(obj, path, key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        fail("expected an array of two numbers at " + joined(path, key));
    }
    const Vec2 out(v[0].get<double>(), v[1].get<double>());
    if (!out.allFinite()) fail("non-finite value at " + joined(path, key));
    return out;
}

Mat2 get_mat2(const json& obj, const std::string& path, const std::string& key) {
    const json& v = need(obj, path, key);
    const auto bad = [&]() { fail("expected a 2x2 numeric matrix at " + joined(path, key)); };
    if (!v.is_array() || v.size() != 2) bad();
    Mat2 m;
    for (int i = 0; i < 2; ++i) {
        const json& row = v[i];
        if (!row.is_array() || row.size() != 2 || !row[0].is_number() || !row[1].is_number()) {
            bad();
        }
        m(i, 0) = row[0].get<double>();
        m(i, 1) = row[1].get<double>();
    }
    if (!m.allFinite()) fail("non-finite value at " + joined(path, key));
    return m;
}

double get_nonneg(const json& obj, const std::string& path, const std::string& key) {
    const double d = get_double(obj, path, key);
    if (d < 0.0) fail("expected a nonnegative number at " + joined(path, key));
    return d;
}

// Portable deterministic generator for the random initial preset (the C++
// standard distributions are implementation-defined, which would break
// byte-identical reruns across toolchains).
struct SplitMix64 {
    std::uint64_t s;

    double unit() {
        s += 0x9E3779B97F4A7C15ULL;
        std::uint64_t z = s;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        z ^= z >> 31;
        return static_cast<double>(z >> 11) * 0x1.0p-53;
    }
};

SktCoefficients parse_skt(const json& j, const std::string& path) {
    check_known_keys(j, path, {"a10", "a11", "a12", "a20", "a21", "a22"});
    SktCoefficients s;
    s.a10 = get_nonneg(j, path, "a10");
    s.a11 = get_nonneg(j, path, "a11");
    s.a12 = get_nonneg(j, path, "a12");
    s.a20 = get_nonneg(j, path, "a20");
    s.a21 = get_nonneg(j, path, "a21");
    s.a22 = get_nonneg(j, path, "a22");
    return s;
}

CoeffSet parse_matrix(const json& j, const std::string& path) {
    check_known_keys(j, path, {"alpha", "beta", "gamma"});
    CoeffSet c;
    c.alpha = get_mat2(j, path, "alpha");
    c.beta = get_mat2(j, path, "beta");
    c.gamma = get_mat2(j, path, "gamma");
    return c;
}

std::variant<NoReaction, LotkaVolterra> parse_reaction(const json& j, const std::string& path) {
    const std::string type = get_string(j, path, "type");
    if (type == "none") {
        check_known_keys(j, path, {"type"});
        return NoReaction{};
    }
    if (type == "lotka_volterra") {
        check_known_keys(j, path, {"type", "b10", "b11", "b12", "b20", "b21", "b22"});
        LotkaVolterra lv;
        lv.b10 = get_nonneg(j, path, "b10");
        lv.b11 = get_nonneg(j, path, "b11");
        lv.b12 = get_nonneg(j, path, "b12");
        lv.b20 = get_nonneg(j, path, "b20");
        lv.b21 = get_nonneg(j, path, "b21");
        lv.b22 = get_nonneg(j, path, "b22");
        return lv;
    }
    fail("unknown reaction type at " + joined(path, "type") +
         " (expected \"none\" or \"lotka_volterra\")");
}

InitialProfile parse_profile_name(const std::string& name, const std::string& path) {
    if (name == "constant") return InitialProfile::Constant;
    if (name == "cosine-perturbation") return InitialProfile::CosinePerturbation;
    if (name == "step") return InitialProfile::Step;
    if (name == "two-bump") return InitialProfile::TwoBump;
    if (name == "random") return InitialProfile::Random;
    fail("unknown initial profile at " + joined(path, "profile") + ": \"" + name + "\"");
}

InitialConfig parse_initial(const json& j, const std::string& path) {
    InitialConfig ic;
    ic.profile = parse_profile_name(get_string(j, path, "profile"), path);
    switch (ic.profile) {
        case InitialProfile::Constant:
            check_known_keys(j, path, {"profile", "base", "rescale"});
            ic.base = get_vec2(j, path, "base");
            break;
        case InitialProfile::CosinePerturbation: {
            check_known_keys(j, path, {"profile", "base", "amplitude", "modes", "rescale"});
            ic.base = get_vec2(j, path, "base");
            ic.amplitude = get_vec2(j, path, "amplitude");
            if (j.contains("modes")) {
                const json& m = j.at("modes");
                if (!m.is_array() || m.size() != 2 || !m[0].is_number_integer() ||
                    !m[1].is_number_integer()) {
                    fail("expected an array of two integers at " + joined(path, "modes"));
                }
                ic.modes << m[0].get<int>(), m[1].get<int>();
                if (ic.modes[0] < 1 || ic.modes[1] < 1) {
                    fail("mode numbers must be >= 1 at " + joined(path, "modes"));
                }
            }
            break;
        }
        case InitialProfile::Step:
            check_known_keys(j, path, {"profile", "left", "right", "interface", "rescale"});
            ic.left = get_vec2(j, path, "left");
            ic.right = get_vec2(j, path, "right");
            ic.interface_pos = get_double_or(j, path, "interface", 0.5);
            if (!(ic.interface_pos > 0.0 && ic.interface_pos < 1.0)) {
                fail("interface must lie in (0,1) at " + joined(path, "interface"));
            }
            break;
        case InitialProfile::TwoBump:
            check_known_keys(j, path,
                             {"profile", "base", "amplitude", "centers", "width", "rescale"});
            ic.base = get_vec2(j, path, "base");
            ic.amplitude = get_vec2(j, path, "amplitude");
            if (j.contains("centers")) ic.centers = get_vec2(j, path, "centers");
            ic.width = get_double_or(j, path, "width", 0.08);
            if (!(ic.width > 0.0)) fail("width must be positive at " + joined(path, "width"));
            break;
        case InitialProfile::Random:
            check_known_keys(j, path, {"profile", "base", "amplitude", "max_modes", "rescale"});
            ic.base = get_vec2(j, path, "base");
            ic.amplitude = get_vec2(j, path, "amplitude");
            if (j.contains("max_modes")) {
                const long long mm = get_int(j, path, "max_modes");
                if (mm < 1 || mm > 64) {
                    fail("max_modes must lie in [1, 64] at " + joined(path, "max_modes"));
                }
                ic.max_modes = static_cast<int>(mm);
            }
            break;
    }
    ic.rescale = get_bool_or(j, path, "rescale", true);
    return ic;
}

void validate_admissibility(const SimConfig& cfg) {
    if (const auto* lv = std::get_if<LotkaVolterra>(&cfg.reaction)) {
        const LvBandResult band = lv_band(*lv);
        if (!band.report.passed) {
            throw ConfigError("reaction: kinetic parameters violate the band condition "
                              "b_i0 <= min{b_i1, b_i2}",
                              band.report);
        }
    }
    if (std::holds_alternative<SktCoefficients>(cfg.coefficients)) {
        const ConditionReport rep = check_skt_corollary(*config_skt_params(cfg));
        if (!rep.passed) {
            throw ConfigError(
                "coefficients.skt: parameters fail the population-model admissibility "
                "conditions",
                rep);
        }
    } else {
        const CoeffSet c = config_coeffs(cfg);
        const ConditionReport sym = check_symmetry(c);
        if (!sym.passed) {
            throw ConfigError(
                "coefficients.matrix: coefficients lack the symmetric entropy structure", sym);
        }
        const ConditionReport thm = check_theorem_conditions(c);
        if (!thm.passed && !check_remark_case(c).passed) {
            throw ConfigError(
                "coefficients.matrix: coefficients satisfy neither the strict nor the "
                "zero-constant-part admissibility conditions",
                thm);
        }
    }
}

void validate_initial_region(const SimConfig& cfg) {
    const Field2 u = eval_initial_profile(cfg);
    for (int j = 0; j < cfg.grid.n_cells; ++j) {
        if (classify(Vec2(u.col(j))) == Region::Outside) {
            throw ConfigError("initial: profile leaves the closure of D at cell " +
                              std::to_string(j) + " (before any rescale)");
        }
    }
}

} // namespace

SimConfig parse_config(const std::string& document) {
    json root;
    try {
        root = json::parse(document);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("malformed document: ") + e.what());
    }
    if (!root.is_object()) fail("top-level document must be an object");
    check_known_keys(root, "", {"schema_version", "coefficients", "reaction", "grid", "initial",
                                "time", "output", "seed"});

    SimConfig cfg;

    const long long ver = get_int(root, "", "schema_version");
    if (ver != 1) fail("unsupported schema_version (expected 1)");
    cfg.schema_version = 1;

    const json& coeffs = need(root, "", "coefficients");
    if (!coeffs.is_object()) fail("expected an object at coefficients");
    const bool has_skt = coeffs.contains("skt");
    const bool has_matrix = coeffs.contains("matrix");
    if (has_skt == has_matrix) {
        fail("coefficients: exactly one of \"skt\" or \"matrix\" is required");
    }
    check_known_keys(coeffs, "coefficients", {"skt", "matrix"});
    if (has_skt) {
        cfg.coefficients = parse_skt(coeffs.at("skt"), "coefficients.skt");
    } else {
        cfg.coefficients = parse_matrix(coeffs.at("matrix"), "coefficients.matrix");
    }

    if (root.contains("reaction")) {
        const json& r = root.at("reaction");
        if (!r.is_object()) fail("expected an object at reaction");
        cfg.reaction = parse_reaction(r, "reaction");
    }

    const json& grid = need(root, "", "grid");
    if (!grid.is_object()) fail("expected an object at grid");
    check_known_keys(grid, "grid", {"n_cells", "length"});
    const long long n_cells = get_int(grid, "grid", "n_cells");
    if (n_cells < 2 || n_cells > 1000000) fail("grid.n_cells must lie in [2, 1e6]");
    const double length = get_double_or(grid, "grid", "length", 1.0);
    if (!(length > 0.0)) fail("grid.length must be positive");
    cfg.grid = Grid1D{static_cast<int>(n_cells), length};

    if (root.contains("initial")) {
        const json& ini = root.at("initial");
        if (!ini.is_object()) fail("expected an object at initial");
        cfg.initial = parse_initial(ini, "initial");
    }

    const json& time = need(root, "", "time");
    if (!time.is_object()) fail("expected an object at time");
    check_known_keys(time, "time", {"tau", "t_end"});
    cfg.tau = get_double(time, "time", "tau");
    if (!(cfg.tau > 0.0)) fail("time.tau must be positive");
    cfg.t_end = get_double(time, "time", "t_end");
    if (cfg.t_end < 0.0) fail("time.t_end must be nonnegative");

    if (root.contains("output")) {
        const json& outj = root.at("output");
        if (!outj.is_object()) fail("expected an object at output");
        check_known_keys(outj, "output", {"directory", "cadence", "plots"});
        if (outj.contains("directory")) {
            cfg.output.directory = get_string(outj, "output", "directory");
        }
        if (outj.contains("cadence")) {
            const long long cad = get_int(outj, "output", "cadence");
            if (cad < 1) fail("output.cadence must be >= 1");
            cfg.output.cadence = static_cast<int>(cad);
        }
        cfg.output.plots = get_bool_or(outj, "output", "plots", true);
    }

    if (root.contains("seed")) {
        const json& s = root.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0)) {
            fail("expected a nonnegative integer at seed");
        }
        cfg.seed = s.get<std::uint64_t>();
    }

    validate_admissibility(cfg);
    validate_initial_region(cfg);
    return cfg;
}

std::string serialize(const SimConfig& cfg) {
    json root;
    root["schema_version"] = cfg.schema_version;

    json coeffs;
    if (const auto* skt = std::get_if<SktCoefficients>(&cfg.coefficients)) {
        coeffs["skt"] = {{"a10", skt->a10}, {"a11", skt->a11}, {"a12", skt->a12},
                         {"a20", skt->a20}, {"a21", skt->a21}, {"a22", skt->a22}};
    } else {
        const CoeffSet& c = std::get<CoeffSet>(cfg.coefficients);
        const auto mat = [](const Mat2& m) {
            return json::array({json::array({m(0, 0), m(0, 1)}),
                                json::array({m(1, 0), m(1, 1)})});
        };
        coeffs["matrix"] = {{"alpha", mat(c.alpha)}, {"beta", mat(c.beta)},
                            {"gamma", mat(c.gamma)}};
    }
    root["coefficients"] = std::move(coeffs);

    if (const auto* lv = std::get_if<LotkaVolterra>(&cfg.reaction)) {
        root["reaction"] = {{"type", "lotka_volterra"}, {"b10", lv->b10}, {"b11", lv->b11},
                            {"b12", lv->b12}, {"b20", lv->b20}, {"b21", lv->b21},
                            {"b22", lv->b22}};
    } else {
        root["reaction"] = {{"type", "none"}};
    }

    root["grid"] = {{"n_cells", cfg.grid.n_cells}, {"length", cfg.grid.length}};

    json ini;
    const auto vec = [](const Vec2& v) { return json::array({v[0], v[1]}); };
    switch (cfg.initial.profile) {
        case InitialProfile::Constant:
            ini = {{"profile", "constant"}, {"base", vec(cfg.initial.base)}};
            break;
        case InitialProfile::CosinePerturbation:
            ini = {{"profile", "cosine-perturbation"},
                   {"base", vec(cfg.initial.base)},
                   {"amplitude", vec(cfg.initial.amplitude)},
                   {"modes", json::array({cfg.initial.modes[0], cfg.initial.modes[1]})}};
            break;
        case InitialProfile::Step:
            ini = {{"profile", "step"}, {"left", vec(cfg.initial.left)},
                   {"right", vec(cfg.initial.right)}, {"interface", cfg.initial.interface_pos}};
            break;
        case InitialProfile::TwoBump:
            ini = {{"profile", "two-bump"},
                   {"base", vec(cfg.initial.base)},
                   {"amplitude", vec(cfg.initial.amplitude)},
                   {"centers", vec(cfg.initial.centers)},
                   {"width", cfg.initial.width}};
            break;
        case InitialProfile::Random:
            ini = {{"profile", "random"},
                   {"base", vec(cfg.initial.base)},
                   {"amplitude", vec(cfg.initial.amplitude)},
                   {"max_modes", cfg.initial.max_modes}};
            break;
    }
    ini["rescale"] = cfg.initial.rescale;
    root["initial"] = std::move(ini);

    root["time"] = {{"tau", cfg.tau}, {"t_end", cfg.t_end}};
    root["output"] = {{"directory", cfg.output.directory}, {"cadence", cfg.output.cadence},
                      {"plots", cfg.output.plots}};
    root["seed"] = cfg.seed;
    return root.dump(2) + "\n";
}

CoeffSet config_coeffs(const SimConfig& cfg) {
    if (std::holds_alternative<SktCoefficients>(cfg.coefficients)) {
        return from_skt(*config_skt_params(cfg));
    }
    return std::get<CoeffSet>(cfg.coefficients);
}

std::optional<SktParams> config_skt_params(const SimConfig& cfg) {
    const auto* skt = std::get_if<SktCoefficients>(&cfg.coefficients);
    if (!skt) return std::nullopt;
    SktParams p;
    p.a10 = skt->a10;
    p.a11 = skt->a11;
    p.a12 = skt->a12;
    p.a20 = skt->a20;
    p.a21 = skt->a21;
    p.a22 = skt->a22;
    if (const auto* lv = std::get_if<LotkaVolterra>(&cfg.reaction)) {
        p.b10 = lv->b10;
        p.b11 = lv->b11;
        p.b12 = lv->b12;
        p.b20 = lv->b20;
        p.b21 = lv->b21;
        p.b22 = lv->b22;
    }
    return p;
}

ReactionSpec config_reaction(const SimConfig& cfg) {
    if (const auto* lv = std::get_if<LotkaVolterra>(&cfg.reaction)) return *lv;
    return NoReaction{};
}

Field2 eval_initial_profile(const SimConfig& cfg) {
    const int n = cfg.grid.n_cells;
    const double length = cfg.grid.length;
    const InitialConfig& ic = cfg.initial;
    Field2 u(2, n);

    switch (ic.profile) {
        case InitialProfile::Constant:
            u.colwise() = ic.base;
            break;
        case InitialProfile::CosinePerturbation:
            for (int j = 0; j < n; ++j) {
                const double x = cfg.grid.cell_center(j);
                for (int i = 0; i < 2; ++i) {
                    u(i, j) = ic.base[i] +
                              ic.amplitude[i] * std::cos(ic.modes[i] * M_PI * x / length);
                }
            }
            break;
        case InitialProfile::Step:
            for (int j = 0; j < n; ++j) {
                const double x = cfg.grid.cell_center(j);
                u.col(j) = x < ic.interface_pos * length ? ic.left : ic.right;
            }
            break;
        case InitialProfile::TwoBump:
            for (int j = 0; j < n; ++j) {
                const double x = cfg.grid.cell_center(j) / length;
                for (int i = 0; i < 2; ++i) {
                    const double arg = (x - ic.centers[i]) / ic.width;
                    u(i, j) = ic.base[i] + ic.amplitude[i] * std::exp(-arg * arg);
                }
            }
            break;
        case InitialProfile::Random: {
            // Smooth seeded Fourier perturbation with sup-norm at most
            // |amplitude| (coefficients are normalized by their 1-norm).
            for (int i = 0; i < 2; ++i) {
                SplitMix64 rng{cfg.seed * 2654435761ULL + static_cast<std::uint64_t>(i) + 1ULL};
                std::vector<double> coef(static_cast<std::size_t>(ic.max_modes));
                double norm = 0.0;
                for (double& cm : coef) {
                    cm = 2.0 * rng.unit() - 1.0;
                    norm += std::abs(cm);
                }
                norm = std::max(norm, 1e-12);
                for (int j = 0; j < n; ++j) {
                    const double x = cfg.grid.cell_center(j);
                    double phi = 0.0;
                    for (int m = 1; m <= ic.max_modes; ++m) {
                        phi += coef[static_cast<std::size_t>(m - 1)] *
                               std::cos(m * M_PI * x / length);
                    }
                    u(i, j) = ic.base[i] + ic.amplitude[i] * phi / norm;
                }
            }
            break;
        }
    }
    return u;
}

RunSetup to_run_setup(const SimConfig& cfg) {
    RunSetup s;
    s.grid = cfg.grid;
    s.coeffs = config_coeffs(cfg);
    s.reaction = config_reaction(cfg);
    s.initial_densities = eval_initial_profile(cfg);
    s.rescale_initial = cfg.initial.rescale;
    s.tau = cfg.tau;
    s.t_end = cfg.t_end;
    return s;
}

RunResult run(const SimConfig& cfg) { return run_simulation(to_run_setup(cfg)); }

CoeffDocument load_coeff_document(const std::string& document) {
    json root;
    try {
        root = json::parse(document);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("malformed document: ") + e.what());
    }
    if (!root.is_object()) fail("top-level document must be an object");

    const json* coeffs = &root;
    std::string path;
    if (root.contains("coefficients")) {
        coeffs = &root.at("coefficients");
        path = "coefficients";
        if (!coeffs->is_object()) fail("expected an object at coefficients");
    }

    CoeffDocument doc;
    if (coeffs->contains("skt")) {
        const json& skt = coeffs->at("skt");
        const std::string p = joined(path, "skt");
        // The standalone form may carry kinetic b-parameters so the
        // population-model report can be evaluated in full.
        check_known_keys(skt, p, {"a10", "a11", "a12", "a20", "a21", "a22", "b10", "b11", "b12",
                                  "b20", "b21", "b22"});
        SktParams s;
        s.a10 = get_double(skt, p, "a10");
        s.a11 = get_double(skt, p, "a11");
        s.a12 = get_double(skt, p, "a12");
        s.a20 = get_double(skt, p, "a20");
        s.a21 = get_double(skt, p, "a21");
        s.a22 = get_double(skt, p, "a22");
        s.b10 = get_double_or(skt, p, "b10", 0.0);
        s.b11 = get_double_or(skt, p, "b11", 0.0);
        s.b12 = get_double_or(skt, p, "b12", 0.0);
        s.b20 = get_double_or(skt, p, "b20", 0.0);
        s.b21 = get_double_or(skt, p, "b21", 0.0);
        s.b22 = get_double_or(skt, p, "b22", 0.0);
        doc.skt = s;
        doc.coeffs = from_skt(s);
        return doc;
    }
    if (coeffs->contains("matrix")) {
        doc.coeffs = parse_matrix(coeffs->at("matrix"), joined(path, "matrix"));
        return doc;
    }
    if (coeffs->contains("alpha")) {
        doc.coeffs = parse_matrix(*coeffs, path.empty() ? "(document)" : path);
        return doc;
    }
    fail("coefficient document needs one of \"skt\", \"matrix\", or alpha/beta/gamma");
}

} // namespace crossdiff
