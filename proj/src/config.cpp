#include "moire/config.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>
#include <numbers>

#include "moire/output.hpp"

namespace moire {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Typed view of one JSON object that rejects keys it was not told about.
class Section {
public:
    Section(const json& j, std::string prefix, std::initializer_list<const char*> allowed)
        : j_(j), prefix_(std::move(prefix)) {
        if (!j.is_object()) throw ValidationError(where("") + "expected an object");
        for (const auto& [key, _] : j.items()) {
            if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
                throw ValidationError("unknown key '" + where(key) + "'");
        }
    }

    bool has(const char* key) const { return j_.contains(key); }
    const json& at(const char* key) const { return j_.at(key); }
    std::string where(const std::string& key) const { return prefix_.empty() ? key : prefix_ + "." + key; }

    void number(const char* key, double& out) const {
        if (!has(key)) return;
        if (!at(key).is_number()) throw ValidationError(where(key) + ": expected a number");
        out = at(key).get<double>();
        if (!std::isfinite(out)) throw ValidationError(where(key) + ": must be finite");
    }

    void integer(const char* key, int& out) const {
        if (!has(key)) return;
        out = static_cast<int>(integral(key));
    }

    long long integral(const char* key) const {
        const json& v = at(key);
        if (v.is_number_integer()) return v.get<long long>();
        if (v.is_number_float()) {
            const double d = v.get<double>();
            if (d == std::floor(d) && std::abs(d) < 1e15) return static_cast<long long>(d);
        }
        throw ValidationError(where(key) + ": expected an integer");
    }

    void boolean(const char* key, bool& out) const {
        if (!has(key)) return;
        if (!at(key).is_boolean()) throw ValidationError(where(key) + ": expected true or false");
        out = at(key).get<bool>();
    }

    void string(const char* key, std::string& out) const {
        if (!has(key)) return;
        if (!at(key).is_string()) throw ValidationError(where(key) + ": expected a string");
        out = at(key).get<std::string>();
    }

    void grid(const char* key, std::array<int, 2>& out) const {
        if (!has(key)) return;
        const json& v = at(key);
        if (v.is_number_integer()) {
            out = {v.get<int>(), v.get<int>()};
        } else if (v.is_array() && v.size() == 2 && v[0].is_number_integer() && v[1].is_number_integer()) {
            out = {v[0].get<int>(), v[1].get<int>()};
        } else {
            throw ValidationError(where(key) + ": expected an integer or [n1, n2]");
        }
    }

    void mode(const char* key, EigenMode& out) const {
        if (!has(key)) return;
        std::string s;
        string(key, s);
        try {
            out = parse_eigen_mode(s);
        } catch (const ValidationError& e) {
            throw ValidationError(where(key) + ": " + e.what());
        }
    }

    std::optional<double> optional_number(const char* key, std::optional<double> fallback) const {
        if (!has(key)) return fallback;
        const json& v = at(key);
        if (v.is_string() && v.get<std::string>() == "auto") return std::nullopt;
        if (!v.is_number()) throw ValidationError(where(key) + ": expected a number or \"auto\"");
        return v.get<double>();
    }

    Section sub(const char* key, std::initializer_list<const char*> allowed) const {
        static const json empty = json::object();
        return Section(has(key) ? at(key) : empty, where(key), allowed);
    }

private:
    const json& j_;
    std::string prefix_;
};

void require_positive(int v, const std::string& key) {
    if (v < 1) throw ValidationError(key + " must be a positive integer");
}

}  // namespace

RunConfig config_from_json(const json& j) {
    const Section top(j, "",
                      {"alpha", "beta", "U", "phi", "h", "gcut", "landscape", "bands", "chern", "agmon", "scan",
                       "harmonic", "wells", "well", "fourier-check"});
    RunConfig c;
    if (!top.has("h")) throw ValidationError("missing required key 'h'");
    top.number("alpha", c.params.alpha);
    top.number("beta", c.params.beta);
    top.number("U", c.params.U);
    top.number("phi", c.params.phi);
    top.number("h", c.params.h);
    c.params.validate();
    c.gcut = top.optional_number("gcut", std::nullopt);
    if (c.gcut && !(*c.gcut > 0.0)) throw ValidationError("gcut must be positive or \"auto\"");

    {
        const Section s = top.sub("landscape", {"n", "mode"});
        s.integer("n", c.landscape.n);
        s.mode("mode", c.landscape.mode);
        require_positive(c.landscape.n, "landscape.n");
    }
    {
        const Section s = top.sub("bands", {"path", "n_per_segment", "nbands"});
        if (s.has("path")) {
            const json& v = s.at("path");
            if (!v.is_array()) throw ValidationError("bands.path: expected an array of labels");
            c.bands.path.clear();
            for (const auto& e : v) {
                if (!e.is_string()) throw ValidationError("bands.path: expected an array of labels");
                c.bands.path.push_back(e.get<std::string>());
            }
            if (c.bands.path.size() < 2) throw ValidationError("bands.path needs at least two labels");
            for (const auto& l : c.bands.path) {
                try {
                    parse_symmetry_point(l);
                } catch (const ValidationError& e) {
                    throw ValidationError(std::string("bands.path: ") + e.what());
                }
            }
        }
        s.integer("n_per_segment", c.bands.n_per_segment);
        s.integer("nbands", c.bands.nbands);
        require_positive(c.bands.n_per_segment, "bands.n_per_segment");
        require_positive(c.bands.nbands, "bands.nbands");
    }
    {
        const Section s = top.sub("chern", {"nbands", "grid"});
        s.integer("nbands", c.chern.nbands);
        s.grid("grid", c.chern.grid);
        require_positive(c.chern.nbands, "chern.nbands");
        if (c.chern.grid[0] < 2 || c.chern.grid[1] < 2) throw ValidationError("chern.grid must be at least 2 x 2");
    }
    {
        const Section s = top.sub("agmon", {"E", "resolution", "stencil_radius", "dump_rho"});
        c.agmon.E = s.optional_number("E", std::nullopt);
        s.integer("resolution", c.agmon.resolution);
        s.integer("stencil_radius", c.agmon.stencil_radius);
        s.boolean("dump_rho", c.agmon.dump_rho);
        if (c.agmon.resolution < 8) throw ValidationError("agmon.resolution must be at least 8");
        require_positive(c.agmon.stencil_radius, "agmon.stencil_radius");
    }
    {
        const Section s = top.sub("scan", {"h_list", "nbands", "grid", "agmon_resolution"});
        if (s.has("h_list")) {
            const json& v = s.at("h_list");
            if (!v.is_array() || v.empty()) throw ValidationError("scan.h_list: expected a non-empty array");
            c.scan.h_list.clear();
            for (const auto& e : v) {
                if (!e.is_number() || !(e.get<double>() > 0.0))
                    throw ValidationError("scan.h_list: entries must be positive numbers");
                c.scan.h_list.push_back(e.get<double>());
            }
        }
        s.integer("nbands", c.scan.nbands);
        s.grid("grid", c.scan.grid);
        s.integer("agmon_resolution", c.scan.agmon_resolution);
        require_positive(c.scan.nbands, "scan.nbands");
        if (c.scan.grid[0] < 6 || c.scan.grid[1] < 6) throw ValidationError("scan.grid must be at least 6 x 6");
        if (c.scan.agmon_resolution < 8) throw ValidationError("scan.agmon_resolution must be at least 8");
    }
    {
        const Section s = top.sub("harmonic", {"mode", "nlevels", "compare_bloch"});
        s.string("mode", c.harmonic.mode);
        if (c.harmonic.mode != "numeric" && c.harmonic.mode != "papermode")
            throw ValidationError("harmonic.mode: expected \"numeric\" or \"papermode\"");
        s.integer("nlevels", c.harmonic.nlevels);
        s.boolean("compare_bloch", c.harmonic.compare_bloch);
        require_positive(c.harmonic.nlevels, "harmonic.nlevels");
    }
    {
        const Section s = top.sub("wells", {"grid_n", "mode"});
        s.integer("grid_n", c.wells.grid_n);
        s.mode("mode", c.wells.mode);
        if (c.wells.grid_n < 64) throw ValidationError("wells.grid_n must be at least 64");
    }
    {
        const Section s = top.sub("well", {"L", "n", "nev", "delta1", "delta2"});
        s.number("L", c.well.L);
        s.integer("n", c.well.n);
        s.integer("nev", c.well.nev);
        s.number("delta1", c.well.delta1);
        s.number("delta2", c.well.delta2);
        if (c.well.n != 0 && c.well.n < 64) throw ValidationError("well.n must be 0 (auto) or at least 64");
        if (c.well.nev < 1 || c.well.nev > 20) throw ValidationError("well.nev must lie in [1, 20]");
    }
    {
        const Section s = top.sub("fourier-check", {"samples", "points", "seed"});
        s.integer("samples", c.fourier.samples);
        s.integer("points", c.fourier.points);
        if (s.has("seed")) {
            const long long seed = s.integral("seed");
            if (seed < 0) throw ValidationError("fourier-check.seed must be non-negative");
            c.fourier.seed = static_cast<std::uint64_t>(seed);
        }
        if (c.fourier.samples < 8) throw ValidationError("fourier-check.samples must be at least 8");
        require_positive(c.fourier.points, "fourier-check.points");
    }
    return c;
}

RunConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    return config_from_json(j);
}

ordered_json config_to_json(const RunConfig& c) {
    ordered_json j;
    j["alpha"] = c.params.alpha;
    j["beta"] = c.params.beta;
    j["U"] = c.params.U;
    j["phi"] = c.params.phi;
    j["h"] = c.params.h;
    j["gcut"] = c.gcut ? ordered_json(*c.gcut) : ordered_json("auto");
    j["landscape"] = {{"n", c.landscape.n}, {"mode", to_string(c.landscape.mode)}};
    j["bands"] = {{"path", c.bands.path}, {"n_per_segment", c.bands.n_per_segment}, {"nbands", c.bands.nbands}};
    j["chern"] = {{"nbands", c.chern.nbands}, {"grid", c.chern.grid}};
    j["agmon"] = {{"E", c.agmon.E ? ordered_json(*c.agmon.E) : ordered_json("auto")},
                  {"resolution", c.agmon.resolution},
                  {"stencil_radius", c.agmon.stencil_radius},
                  {"dump_rho", c.agmon.dump_rho}};
    j["scan"] = {{"h_list", c.scan.h_list},
                 {"nbands", c.scan.nbands},
                 {"grid", c.scan.grid},
                 {"agmon_resolution", c.scan.agmon_resolution}};
    j["harmonic"] = {
        {"mode", c.harmonic.mode}, {"nlevels", c.harmonic.nlevels}, {"compare_bloch", c.harmonic.compare_bloch}};
    j["wells"] = {{"grid_n", c.wells.grid_n}, {"mode", to_string(c.wells.mode)}};
    j["well"] = {{"L", c.well.L},
                 {"n", c.well.n},
                 {"nev", c.well.nev},
                 {"delta1", c.well.delta1},
                 {"delta2", c.well.delta2}};
    j["fourier-check"] = {{"samples", c.fourier.samples}, {"points", c.fourier.points}, {"seed", c.fourier.seed}};
    return j;
}

std::string serialize_config(const RunConfig& c) { return dump_json(config_to_json(c)); }

std::vector<std::string> preset_names() {
    return {"p0", "fig1-a", "fig1-b", "fig1-c", "fig1-d", "fig2-a", "fig2-b", "fig2-c", "fig4-a", "fig4-b"};
}

RunConfig preset(const std::string& name) {
    constexpr double pi = std::numbers::pi;
    RunConfig c;
    c.params = reference_params(0.05);
    auto set = [&](double U, double beta, double phi) {
        c.params.U = U;
        c.params.beta = beta;
        c.params.phi = phi;
    };
    if (name == "p0") {
    } else if (name == "fig1-a") {
        set(2.0, 0.0, 4.0 * pi / 3.0);
    } else if (name == "fig1-b") {
        set(2.0, 5.0, 4.0 * pi / 3.0);
    } else if (name == "fig1-c") {
        set(0.0, 5.0, 4.0 * pi / 3.0);
    } else if (name == "fig1-d") {
        set(0.0, 0.0, 4.0 * pi / 3.0);
    } else if (name == "fig2-a") {
        set(0.0, 1.0, 1.32);
    } else if (name == "fig2-b") {
        set(0.0, 1.0, 1.94);
    } else if (name == "fig2-c") {
        set(0.0, 1.0, 2.31);
    } else if (name == "fig4-a" || name == "fig4-b") {
        set(0.0, 1.0 / 9.0, name == "fig4-a" ? 0.0 : 2.0 * pi / 3.0);
        c.params.h = 1.0 / 9.0;
    } else {
        std::string known;
        for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
        throw ValidationError("unknown preset '" + name + "' (known: " + known + ")");
    }
    return c;
}

}  // namespace moire
