#include "herd/cli.hpp"

#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <string_view>
#include <vector>

#include "herd/equilibria.hpp"

namespace herd::cli {

using json = nlohmann::json;

namespace {

constexpr std::array<std::string_view, 7> kCommands = {"simulate", "equilibria", "regimes",         "sweep",
                                                       "basins",   "compare",    "extinction-check"};

std::string join(const std::string& path, std::string_view key) {
    return path.empty() ? std::string(key) : path + "." + std::string(key);
}

void check_keys(const json& obj, const std::string& path, std::initializer_list<std::string_view> allowed) {
    if (!obj.is_object()) throw ConfigError(path, "expected an object");
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const auto key : allowed) ok = ok || key == item.key();
        if (!ok) throw ConfigError(join(path, item.key()), "unknown key");
    }
}

double number(const json& obj, const std::string& path, std::string_view key) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) throw ConfigError(join(path, key), "missing");
    if (!it->is_number()) throw ConfigError(join(path, key), "expected a number");
    const double v = it->get<double>();
    if (!std::isfinite(v)) throw ConfigError(join(path, key), "must be finite");
    return v;
}

double number_or(const json& obj, const std::string& path, std::string_view key, double fallback) {
    return obj.contains(std::string(key)) ? number(obj, path, key) : fallback;
}

int integer(const json& v, const std::string& path) {
    if (!v.is_number_integer()) throw ConfigError(path, "expected an integer");
    return v.get<int>();
}

std::array<double, 2> range(const json& obj, const std::string& path, std::string_view key) {
    const auto it = obj.find(std::string(key));
    if (it == obj.end()) throw ConfigError(join(path, key), "missing");
    if (!it->is_array() || it->size() != 2 || !(*it)[0].is_number() || !(*it)[1].is_number()) {
        throw ConfigError(join(path, key), "expected [lo, hi]");
    }
    return {(*it)[0].get<double>(), (*it)[1].get<double>()};
}

json jnum(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return v;
}

json state_json(const State& s) {
    if (s.rep == Representation::Dimensional) return {{"Q", jnum(s.first)}, {"P", jnum(s.second)}};
    return {{"X", jnum(s.first)}, {"Y", jnum(s.second)}};
}

json integrator_json(const IntegratorConfig& c) {
    return {{"rel_tol", c.rel_tol},       {"abs_tol", c.abs_tol}, {"max_step", c.max_step},
            {"min_step", c.min_step},     {"extinction_eps", c.extinction_eps},
            {"t_max", c.t_max},           {"blowup_factor", c.blowup_factor}};
}

json model_json(const ModelSpec& model) {
    if (const auto* k = std::get_if<DimParams>(&model)) {
        json params = {{"r", k->r}, {"m", k->m}, {"p", k->p}, {"q", k->q}};
        if (k->uses_k_p()) {
            params["K_Q"] = k->k_q;
            params["K_P"] = k->k_p;
        } else {
            params["K"] = k->k_q;
        }
        return {{"family", to_string(k->family)}, {"params", params}};
    }
    const auto& n = std::get<NondimParams>(model);
    json nd;
    switch (n.family) {
    case Family::SymbHerd:
    case Family::CompHerd: nd = {{"a", n.a}, {"b", n.b}, {"c", n.c}}; break;
    case Family::PPPackIndiv: nd = {{"b", n.b}, {"c", n.c}}; break;
    default: nd = {{"e", n.e}, {"f", n.f}}; break;
    }
    return {{"family", to_string(n.family)}, {"nondim", nd}};
}

// --- parsing -----------------------------------------------------------------

// `implied` is the family used when the config omits one (may be null).
ModelSpec parse_model(const json& m, const Family* implied) {
    const std::string path = "model";
    check_keys(m, path, {"family", "params", "nondim"});
    Family family{};
    if (m.contains("family")) {
        if (!m["family"].is_string()) throw ConfigError("model.family", "expected a string");
        const auto f = family_from_string(m["family"].get<std::string>());
        if (!f) throw ConfigError("model.family", "unknown family '" + m["family"].get<std::string>() + "'");
        family = *f;
    } else if (implied != nullptr) {
        family = *implied;
    } else {
        throw ConfigError("model.family", "missing");
    }

    const bool has_params = m.contains("params");
    const bool has_nondim = m.contains("nondim");
    if (has_params == has_nondim) throw ConfigError(path, "exactly one of 'params' and 'nondim' is required");

    try {
        if (has_params) {
            const json& p = m["params"];
            const std::string pp = "model.params";
            DimParams k;
            k.family = family;
            if (is_predator_prey(family)) {
                check_keys(p, pp, {"r", "m", "p", "q", "K"});
                k.k_q = number(p, pp, "K");
                if (!(k.k_q > 0.0)) throw ConfigError("model.params.K", "must be > 0");
            } else {
                check_keys(p, pp, {"r", "m", "p", "q", "K_Q", "K_P"});
                k.k_q = number(p, pp, "K_Q");
                k.k_p = number(p, pp, "K_P");
                if (!(k.k_q > 0.0)) throw ConfigError("model.params.K_Q", "must be > 0");
                if (!(k.k_p > 0.0)) throw ConfigError("model.params.K_P", "must be > 0");
            }
            for (const auto& [key, field] : std::initializer_list<std::pair<const char*, double*>>{
                     {"r", &k.r}, {"m", &k.m}, {"p", &k.p}, {"q", &k.q}}) {
                *field = number(p, pp, key);
                if (*field < 0.0) throw ConfigError(join(pp, key), "must be >= 0");
            }
            (void)k.validate();
            return k;
        }
        if (!is_herd(family)) throw ConfigError("model.nondim", "only herd families have nondimensional forms");
        const json& p = m["nondim"];
        const std::string pp = "model.nondim";
        NondimParams n;
        n.family = family;
        std::vector<std::pair<const char*, double*>> fields;
        switch (family) {
        case Family::SymbHerd:
        case Family::CompHerd:
            check_keys(p, pp, {"a", "b", "c"});
            fields = {{"a", &n.a}, {"b", &n.b}, {"c", &n.c}};
            break;
        case Family::PPPackIndiv:
            check_keys(p, pp, {"b", "c"});
            fields = {{"b", &n.b}, {"c", &n.c}};
            break;
        default:
            check_keys(p, pp, {"e", "f"});
            fields = {{"e", &n.e}, {"f", &n.f}};
            break;
        }
        for (const auto& [key, field] : fields) {
            *field = number(p, pp, key);
            if (*field < 0.0) throw ConfigError(join(pp, key), "must be >= 0");
        }
        n.validate();
        return n;
    } catch (const DomainError& err) {
        throw ConfigError(path, err.what());
    }
}

State parse_state(const json& s, Representation rep) {
    const std::string path = "initial_state";
    const bool dim = rep == Representation::Dimensional;
    check_keys(s, path, dim ? std::initializer_list<std::string_view>{"Q", "P"}
                            : std::initializer_list<std::string_view>{"X", "Y"});
    const double a = number(s, path, dim ? "Q" : "X");
    const double b = number(s, path, dim ? "P" : "Y");
    if (a < 0.0) throw ConfigError(join(path, dim ? "Q" : "X"), "must be >= 0");
    if (b < 0.0) throw ConfigError(join(path, dim ? "P" : "Y"), "must be >= 0");
    return {a, b, rep};
}

IntegratorConfig parse_integrator(const json& j) {
    const std::string path = "integrator";
    check_keys(j, path, {"rel_tol", "abs_tol", "max_step", "min_step", "extinction_eps", "t_max", "blowup_factor"});
    IntegratorConfig c;
    c.rel_tol = number_or(j, path, "rel_tol", c.rel_tol);
    c.abs_tol = number_or(j, path, "abs_tol", c.abs_tol);
    c.max_step = number_or(j, path, "max_step", c.max_step);
    c.min_step = number_or(j, path, "min_step", c.min_step);
    c.extinction_eps = number_or(j, path, "extinction_eps", c.extinction_eps);
    c.t_max = number_or(j, path, "t_max", c.t_max);
    c.blowup_factor = number_or(j, path, "blowup_factor", c.blowup_factor);
    try {
        c.validate();
    } catch (const DomainError& err) {
        throw ConfigError(path, err.what());
    }
    return c;
}

SweepAxis parse_axis(const json& j, const std::string& path) {
    check_keys(j, path, {"parameter", "range", "steps"});
    SweepAxis axis;
    if (!j.contains("parameter") || !j["parameter"].is_string()) throw ConfigError(join(path, "parameter"), "expected a string");
    axis.parameter = j["parameter"].get<std::string>();
    const auto r = range(j, path, "range");
    axis.lo = r[0];
    axis.hi = r[1];
    if (!j.contains("steps")) throw ConfigError(join(path, "steps"), "missing");
    axis.steps = integer(j["steps"], join(path, "steps"));
    if (axis.steps < 2) throw ConfigError(join(path, "steps"), "must be >= 2");
    if (!(axis.lo >= 0.0) || !(axis.hi > axis.lo)) throw ConfigError(join(path, "range"), "need 0 <= lo < hi");
    return axis;
}

}  // namespace

RunConfig parse_config(const json& config) {
    check_keys(config, "", {"command", "model", "initial_state", "integrator", "scenario", "grid", "sweep", "limit_cycle"});
    RunConfig rc;
    if (!config.contains("command") || !config["command"].is_string()) throw ConfigError("command", "missing");
    rc.command = config["command"].get<std::string>();
    bool known = false;
    for (const auto c : kCommands) known = known || c == rc.command;
    if (!known) throw ConfigError("command", "unknown command '" + rc.command + "'");
    const std::string& cmd = rc.command;

    rc.integrator = config.contains("integrator") ? parse_integrator(config["integrator"]) : IntegratorConfig{};

    if (cmd == "compare") {
        if (!config.contains("scenario") || !config["scenario"].is_string()) throw ConfigError("scenario", "missing");
        try {
            rc.scenario = scenario_from_string(config["scenario"].get<std::string>());
        } catch (const UsageError&) {
            throw ConfigError("scenario", "unknown scenario '" + config["scenario"].get<std::string>() + "'");
        }
    } else if (config.contains("scenario")) {
        throw ConfigError("scenario", "only used by compare");
    }

    if (!config.contains("model")) throw ConfigError("model", "missing");
    const Family implied = rc.scenario ? scenario_families(*rc.scenario)[0] : Family::SymbHerd;
    rc.model = parse_model(config["model"], rc.scenario ? &implied : nullptr);
    const Family family = family_of(*rc.model);
    const bool dimensional = std::holds_alternative<DimParams>(*rc.model);

    if (rc.scenario) {
        const auto pair = scenario_families(*rc.scenario);
        if (!dimensional) throw ConfigError("model", "compare needs dimensional params");
        if (family != pair[0] && family != pair[1]) {
            throw ConfigError("model.family", "does not belong to scenario " + std::string(to_string(*rc.scenario)));
        }
        auto k = std::get<DimParams>(*rc.model);
        k.family = pair[0];
        rc.model = k;
    }
    if ((cmd == "regimes" || cmd == "sweep" || cmd == "basins") && !is_herd(family)) {
        throw ConfigError("model.family", cmd + " needs a herd family");
    }
    if ((cmd == "basins" || cmd == "extinction-check") && !dimensional) {
        throw ConfigError("model", cmd + " needs dimensional params");
    }
    if (cmd == "extinction-check" && family != Family::PPPackHerd) {
        throw ConfigError("model.family", "extinction-check needs PP_PackHerd");
    }

    const Representation rep = dimensional ? Representation::Dimensional : Representation::Nondimensional;
    if (config.contains("initial_state")) {
        rc.initial = parse_state(config["initial_state"], rep);
    } else if (cmd == "extinction-check") {
        throw ConfigError("initial_state", "missing");
    } else if (cmd == "simulate" || cmd == "compare") {
        rc.initial = dimensional ? default_initial_state(std::get<DimParams>(*rc.model)) : State::nondim(0.5, 0.5);
    }
    if (cmd == "extinction-check" && !(rc.initial->first > 0.0 && rc.initial->second > 0.0)) {
        throw ConfigError("initial_state", "Q and P must be > 0");
    }

    if (cmd == "basins") {
        const auto& k = std::get<DimParams>(*rc.model);
        BasinGrid grid = default_basin_grid(k);
        if (config.contains("grid")) {
            const json& g = config["grid"];
            check_keys(g, "grid", {"Q", "P", "resolution", "match_radius"});
            if (g.contains("Q")) {
                const auto r = range(g, "grid", "Q");
                grid.q_lo = r[0];
                grid.q_hi = r[1];
            }
            if (g.contains("P")) {
                const auto r = range(g, "grid", "P");
                grid.p_lo = r[0];
                grid.p_hi = r[1];
            }
            if (g.contains("resolution")) {
                const json& res = g["resolution"];
                if (!res.is_array() || res.size() != 2) throw ConfigError("grid.resolution", "expected [nq, np]");
                grid.nq = integer(res[0], "grid.resolution");
                grid.np = integer(res[1], "grid.resolution");
            }
            rc.basin_options.match_radius = number_or(g, "grid", "match_radius", rc.basin_options.match_radius);
            if (!(rc.basin_options.match_radius > 0.0)) throw ConfigError("grid.match_radius", "must be > 0");
        }
        try {
            grid.validate();
        } catch (const DomainError& err) {
            throw ConfigError("grid", err.what());
        }
        rc.grid = grid;
    } else if (config.contains("grid")) {
        throw ConfigError("grid", "only used by basins");
    }
    rc.basin_options.integrator = rc.integrator;

    if (cmd == "sweep") {
        if (!config.contains("sweep")) throw ConfigError("sweep", "missing");
        const json& s = config["sweep"];
        check_keys(s, "sweep", {"mode", "axis1", "axis2", "start"});
        SweepSpec spec;
        spec.base = dimensional ? to_nondim(std::get<DimParams>(*rc.model)).params : std::get<NondimParams>(*rc.model);
        if (s.contains("mode")) {
            const std::string mode = s["mode"].is_string() ? s["mode"].get<std::string>() : "";
            if (mode == "analytic") spec.mode = SweepMode::Analytic;
            else if (mode == "numeric") spec.mode = SweepMode::Numeric;
            else throw ConfigError("sweep.mode", "expected 'analytic' or 'numeric'");
        }
        if (!s.contains("axis1")) throw ConfigError("sweep.axis1", "missing");
        if (!s.contains("axis2")) throw ConfigError("sweep.axis2", "missing");
        spec.axis1 = parse_axis(s["axis1"], "sweep.axis1");
        spec.axis2 = parse_axis(s["axis2"], "sweep.axis2");
        if (s.contains("start")) {
            const State st = parse_state(s["start"], Representation::Nondimensional);
            spec.start_x = st.first;
            spec.start_y = st.second;
        }
        spec.integrator = rc.integrator;
        for (const auto* axis : {&spec.axis1, &spec.axis2}) {
            NondimParams probe = spec.base;
            try {
                set_parameter(probe, axis->parameter, axis->lo);
            } catch (const UsageError& err) {
                throw ConfigError(axis == &spec.axis1 ? "sweep.axis1.parameter" : "sweep.axis2.parameter", err.what());
            }
        }
        if (spec.axis1.parameter == spec.axis2.parameter) throw ConfigError("sweep.axis2.parameter", "axes must differ");
        rc.sweep = spec;
    } else if (config.contains("sweep")) {
        throw ConfigError("sweep", "only used by sweep");
    }

    if (config.contains("limit_cycle")) {
        if (cmd != "regimes") throw ConfigError("limit_cycle", "only used by regimes");
        if (!dimensional || family != Family::PPPackHerd) {
            throw ConfigError("limit_cycle", "needs dimensional PP_PackHerd params");
        }
        const json& l = config["limit_cycle"];
        check_keys(l, "limit_cycle", {"horizon"});
        LimitCycleSpec spec;
        spec.horizon = number_or(l, "limit_cycle", "horizon", spec.horizon);
        if (!(spec.horizon > 0.0)) throw ConfigError("limit_cycle.horizon", "must be > 0");
        rc.limit_cycle = spec;
        if (!rc.initial) rc.initial = default_initial_state(std::get<DimParams>(*rc.model));
    }

    // Canonical echo with every default spelled out.
    json& e = rc.effective;
    e["command"] = rc.command;
    e["model"] = model_json(*rc.model);
    if (rc.initial) e["initial_state"] = state_json(*rc.initial);
    e["integrator"] = integrator_json(rc.integrator);
    if (rc.scenario) e["scenario"] = to_string(*rc.scenario);
    if (rc.grid) {
        e["grid"] = {{"Q", {rc.grid->q_lo, rc.grid->q_hi}},
                     {"P", {rc.grid->p_lo, rc.grid->p_hi}},
                     {"resolution", {rc.grid->nq, rc.grid->np}},
                     {"match_radius", rc.basin_options.match_radius}};
    }
    if (rc.sweep) {
        auto axis = [](const SweepAxis& a) {
            return json{{"parameter", a.parameter}, {"range", {a.lo, a.hi}}, {"steps", a.steps}};
        };
        e["sweep"] = {{"mode", to_string(rc.sweep->mode)},
                      {"axis1", axis(rc.sweep->axis1)},
                      {"axis2", axis(rc.sweep->axis2)},
                      {"start", {{"X", rc.sweep->start_x}, {"Y", rc.sweep->start_y}}}};
    }
    if (rc.limit_cycle) e["limit_cycle"] = {{"horizon", rc.limit_cycle->horizon}};
    return rc;
}

std::string config_hash(const json& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const unsigned char ch : config.dump()) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

// --- commands ----------------------------------------------------------------

namespace {

class Outputs {
public:
    Outputs(std::filesystem::path dir, std::string hash) : dir_(std::move(dir)), hash_(std::move(hash)) {}

    void write_json(const std::string& name, json body) {
        body["config_hash"] = hash_;
        open(name) << body.dump(2) << '\n';
    }

    std::ofstream open(const std::string& name) {
        files_.push_back(name);
        std::ofstream out(dir_ / name, std::ios::binary);
        if (!out) throw ConfigError("--out", "cannot write " + (dir_ / name).string());
        return out;
    }

    [[nodiscard]] const std::vector<std::string>& files() const { return files_; }
    [[nodiscard]] const std::string& hash() const { return hash_; }

private:
    std::filesystem::path dir_;
    std::string hash_;
    std::vector<std::string> files_;
};

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
    out << (traj.rep == Representation::Dimensional ? "t,Q,P\n" : "t,X,Y\n");
    char buf[96];
    for (const auto& s : traj.samples) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g\n", s.time, s.state.first, s.state.second);
        out << buf;
    }
}

json events_json(const Trajectory& traj) {
    json list = json::array();
    for (const auto& ev : traj.events) list.push_back({{"time", ev.time}, {"kind", to_string(ev.kind)}});
    return list;
}

json oscillation_json(const OscillationReport& o) {
    return {{"kind", to_string(o.kind)},
            {"period", o.period},
            {"amplitude", o.amplitude},
            {"peak_ratio", o.peak_ratio},
            {"extrema", o.extrema}};
}

json equilibrium_json(const Equilibrium& eq, const std::optional<ScaleMap>& to_dim) {
    json j = {{"kind", to_string(eq.kind)},
              {"location", state_json(eq.location)},
              {"classification", to_string(eq.classification)},
              {"feasible", eq.feasible},
              {"merged", eq.merged}};
    json eig = json::array();
    for (const auto& ev : eq.eigenvalues) eig.push_back({{"re", jnum(ev.real())}, {"im", jnum(ev.imag())}});
    j["eigenvalues"] = eig;
    if (to_dim && eq.location.rep == Representation::Nondimensional && std::isfinite(eq.location.first) &&
        std::isfinite(eq.location.second) && eq.location.first >= 0.0 && eq.location.second >= 0.0) {
        j["location_dimensional"] = state_json(map_state(*to_dim, eq.location, MapDirection::ToDimensional));
    }
    return j;
}

json regime_json(const RegimeReport& r) {
    json bif = json::array();
    for (const auto& b : r.bifurcations) {
        bif.push_back({{"kind", to_string(b.kind)}, {"threshold", b.threshold}, {"distance", b.distance}});
    }
    return {{"params", model_json(r.params)["nondim"]},
            {"regime", to_string(r.regime)},
            {"stable_coexistence", r.stable_coexistence},
            {"bifurcations", bif},
            {"notes", r.notes}};
}

std::optional<ScaleMap> dimensional_map(const ModelSpec& model) {
    if (const auto* k = std::get_if<DimParams>(&model); k && is_herd(k->family)) return scale_map(*k);
    return std::nullopt;
}

void cmd_simulate(const RunConfig& rc, Outputs& out) {
    const Trajectory traj = integrate(*rc.model, *rc.initial, rc.integrator);
    {
        auto file = out.open("trajectory.csv");
        write_trajectory_csv(file, traj);
    }
    out.write_json("events.json", {{"events", events_json(traj)},
                                   {"terminal", state_json(traj.terminal())},
                                   {"oscillation", oscillation_json(detect_oscillation(traj))}});
}

void cmd_equilibria(const RunConfig& rc, Outputs& out) {
    const auto to_dim = dimensional_map(*rc.model);
    json list = json::array();
    json notes = json::array();
    for (const auto& eq : all_equilibria(*rc.model)) list.push_back(equilibrium_json(eq, to_dim));
    json body = {{"equilibria", list}};

    const Family family = family_of(*rc.model);
    if (family == Family::SymbClassic) {
        const auto co = classical_coexistence(std::get<DimParams>(*rc.model));
        if (!co.feasible) notes.push_back("coexistence infeasible (rm <= pq K_P K_Q): unbounded trajectories");
    }
    if (family == Family::CompHerd) {
        const NondimParams n = std::holds_alternative<DimParams>(*rc.model)
                                   ? to_nondim(std::get<DimParams>(*rc.model)).params
                                   : std::get<NondimParams>(*rc.model);
        const CompetitionRoots roots = comp_coexistence(n.a, n.b, n.c);
        body["on_boundary"] = roots.on_boundary;
        body["raw_roots"] = roots.raw_roots;
        if (roots.on_boundary) notes.push_back("a = bc treated as infeasible");
    }
    if (is_herd(family) && std::holds_alternative<DimParams>(*rc.model)) {
        body["nondim"] = model_json(to_nondim(std::get<DimParams>(*rc.model)).params)["nondim"];
    }
    body["notes"] = notes;
    out.write_json("equilibria.json", body);
}

void cmd_regimes(const RunConfig& rc, Outputs& out) {
    const auto* dim = std::get_if<DimParams>(&*rc.model);
    const NondimParams n = dim ? to_nondim(*dim).params : std::get<NondimParams>(*rc.model);
    json body = regime_json(classify_regime(n));
    if (dim && rc.initial && (dim->family == Family::CompHerd || dim->family == Family::PPPackHerd)) {
        body["origin_collapse"] = origin_collapse_predicate(*dim, *rc.initial);
    }
    if (rc.limit_cycle) {
        const LimitCycleResult lc = limit_cycle_experiment(*dim, *rc.initial, rc.limit_cycle->horizon, rc.integrator);
        Trajectory cycle;
        cycle.rep = Representation::Dimensional;
        cycle.samples = lc.cycle;
        {
            auto file = out.open("cycle.csv");
            write_trajectory_csv(file, cycle);
        }
        body["limit_cycle"] = {{"oscillation", oscillation_json(lc.oscillation)},
                               {"coexistence", equilibrium_json(lc.coexistence, scale_map(*dim))},
                               {"terminal", state_json(lc.trajectory.terminal())},
                               {"events", events_json(lc.trajectory)},
                               {"cycle_samples", lc.cycle.size()},
                               {"cycle_file", "cycle.csv"}};
    }
    out.write_json("regime.json", body);
}

void cmd_sweep(const RunConfig& rc, Outputs& out) {
    const SweepResult result = sweep(*rc.sweep);
    {
        auto file = out.open("sweep.csv");
        write_sweep_csv(file, result);
    }
    json cells = json::array();
    for (const auto& c : result.cells) {
        json cell = {{"axis1", c.v1}, {"axis2", c.v2}, {"report", regime_json(c.report)}};
        if (c.outcome) cell["outcome"] = to_string(*c.outcome);
        cells.push_back(cell);
    }
    json body = {{"mode", to_string(rc.sweep->mode)}, {"cells", cells}};
    if (rc.sweep->mode == SweepMode::Numeric) {
        const Agreement a = cross_mode_agreement(result);
        body["agreement"] = {{"compared", a.compared}, {"agreed", a.agreed}, {"excluded", a.excluded},
                             {"fraction", a.fraction()}};
    }
    out.write_json("sweep.json", body);
}

void cmd_basins(const RunConfig& rc, Outputs& out) {
    const auto& k = std::get<DimParams>(*rc.model);
    const BasinMap map = basin_map(k, *rc.grid, rc.basin_options);
    {
        auto file = out.open("basins.csv");
        write_basin_csv(file, map);
    }
    const ScaleMap sm = scale_map(k);
    json attractors = json::array();
    for (const auto& a : map.attractors) {
        json j = equilibrium_json(a.equilibrium, sm);
        j["label"] = to_string(a.label);
        attractors.push_back(j);
    }
    json counts = json::object();
    for (const BasinLabel l : {BasinLabel::AxisQ, BasinLabel::AxisP, BasinLabel::Coexistence, BasinLabel::Origin,
                               BasinLabel::Undecided}) {
        counts[std::string(to_string(l))] = map.count(l);
    }
    out.write_json("attractors.json", {{"attractors", attractors}, {"counts", counts}, {"basins_file", "basins.csv"}});
}

void cmd_compare(const RunConfig& rc, Outputs& out) {
    const ComparisonResult r = compare_models(*rc.scenario, std::get<DimParams>(*rc.model), rc.initial, rc.integrator);
    {
        auto file = out.open("herd_trajectory.csv");
        write_trajectory_csv(file, r.herd.trajectory);
    }
    {
        auto file = out.open("classical_trajectory.csv");
        write_trajectory_csv(file, r.classical.trajectory);
    }
    auto run_json = [](const ComparisonRun& run, const char* file) {
        return json{{"family", to_string(run.params.family)},
                    {"terminal", state_json(run.terminal)},
                    {"settled", run.settled},
                    {"unbounded", run.unbounded},
                    {"trajectory_file", file}};
    };
    out.write_json("comparison.json", {{"scenario", to_string(r.scenario)},
                                       {"initial_state", state_json(r.initial)},
                                       {"horizon", r.horizon},
                                       {"herd", run_json(r.herd, "herd_trajectory.csv")},
                                       {"classical", run_json(r.classical, "classical_trajectory.csv")},
                                       {"verdict", {{"Q", to_string(r.verdict[0])}, {"P", to_string(r.verdict[1])}}}});
}

void cmd_extinction(const RunConfig& rc, Outputs& out) {
    const auto& k = std::get<DimParams>(*rc.model);
    const ExtinctionVerdict v = extinction_set(k, *rc.initial);
    const Trajectory traj = integrate(k, *rc.initial, rc.integrator);
    {
        auto file = out.open("trajectory.csv");
        write_trajectory_csv(file, traj);
    }
    json body = {{"in_Xi", v.in_xi}, {"tau_star", v.tau_star ? json(*v.tau_star) : json(nullptr)}};
    const auto t_ext = traj.first_event(EventKind::ExtinctQ);
    body["extinct_q_time"] = t_ext ? json(*t_ext) : json(nullptr);
    if (v.tau_star) body["within_bound"] = t_ext.has_value() && *t_ext <= *v.tau_star;
    body["events"] = events_json(traj);
    out.write_json("extinction.json", body);
}

}  // namespace

int run(const Invocation& inv, std::ostream& log) {
    try {
        std::ifstream in(inv.config);
        if (!in) throw ConfigError("--config", "cannot read " + inv.config.string());
        json config;
        try {
            config = json::parse(in);
        } catch (const json::parse_error& err) {
            throw ConfigError("--config", std::string("invalid JSON: ") + err.what());
        }
        if (config.is_object() && !config.contains("command") && !inv.command.empty()) config["command"] = inv.command;
        if (config.is_object() && config.contains("command") && config["command"].is_string() && !inv.command.empty() &&
            config["command"].get<std::string>() != inv.command) {
            throw ConfigError("command", "config says '" + config["command"].get<std::string>() +
                                             "' but '" + inv.command + "' was requested");
        }
        const RunConfig rc = parse_config(config);

        std::error_code ec;
        std::filesystem::create_directories(inv.out, ec);
        if (ec) throw ConfigError("--out", ec.message());

        Outputs out(inv.out, config_hash(rc.effective));
        const std::string& cmd = rc.command;
        if (cmd == "simulate") cmd_simulate(rc, out);
        else if (cmd == "equilibria") cmd_equilibria(rc, out);
        else if (cmd == "regimes") cmd_regimes(rc, out);
        else if (cmd == "sweep") cmd_sweep(rc, out);
        else if (cmd == "basins") cmd_basins(rc, out);
        else if (cmd == "compare") cmd_compare(rc, out);
        else cmd_extinction(rc, out);

        json meta = {{"tool", "herdsim"},
                     {"version", kVersion},
                     {"command", cmd},
                     {"config", rc.effective},
                     {"seed", inv.seed ? json(*inv.seed) : json(nullptr)},
                     {"outputs", out.files()}};
        out.write_json("metadata.json", meta);
        return kExitOk;
    } catch (const ConfigError& err) {
        log << "config error: " << err.what() << '\n';
        return kExitConfig;
    } catch (const UsageError& err) {
        log << "config error: " << err.what() << '\n';
        return kExitConfig;
    } catch (const DomainError& err) {
        log << "config error: " << err.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& err) {
        log << "numeric error: " << err.what() << '\n';
        return kExitNumeric;
    }
}

}  // namespace herd::cli
