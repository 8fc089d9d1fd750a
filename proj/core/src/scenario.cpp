#include "vhrd/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vhrd/errors.hpp"

namespace vhrd {

using nlohmann::json;

const std::array<std::string, 8> kCoefficientNames = {"delta1", "delta2", "lambda", "beta",
                                                      "sigma1", "sigma2", "mu",     "h_u"};
const std::array<std::string, 3> kInitialNames = {"h_i", "v_u", "v_i"};

namespace {

const json& require(const json& j, const std::string& key, const std::string& ctx) {
    auto it = j.find(key);
    if (it == j.end()) throw ConfigError(ctx + ": missing field '" + key + "'");
    return *it;
}

double require_number(const json& j, const std::string& key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number()) throw ConfigError(ctx + ": field '" + key + "' must be a number");
    double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(ctx + ": field '" + key + "' must be finite");
    return d;
}

double optional_number(const json& j, const std::string& key, double fallback,
                       const std::string& ctx) {
    if (!j.contains(key)) return fallback;
    return require_number(j, key, ctx);
}

int require_int(const json& j, const std::string& key, const std::string& ctx) {
    const json& v = require(j, key, ctx);
    if (!v.is_number_integer()) throw ConfigError(ctx + ": field '" + key + "' must be an integer");
    return v.get<int>();
}

Profile parse_profile(const json& j, const std::string& ctx) {
    if (j.is_number()) return ConstantProfile{j.get<double>()};
    if (!j.is_object()) throw ConfigError(ctx + ": profile must be a number or an object");
    std::string type = require(j, "type", ctx).get<std::string>();
    if (type == "constant") return ConstantProfile{require_number(j, "value", ctx)};
    if (type == "ramp")
        return RampProfile{require_number(j, "from", ctx), require_number(j, "to", ctx)};
    if (type == "bump")
        return BumpProfile{require_number(j, "base", ctx), require_number(j, "amplitude", ctx),
                           require_number(j, "center", ctx), require_number(j, "width", ctx)};
    if (type == "nodes") {
        const json& vals = require(j, "values", ctx);
        if (!vals.is_array()) throw ConfigError(ctx + ": 'values' must be an array");
        NodesProfile p;
        for (const auto& v : vals) {
            if (!v.is_number()) throw ConfigError(ctx + ": 'values' entries must be numbers");
            p.values.push_back(v.get<double>());
        }
        return p;
    }
    throw ConfigError(ctx + ": unknown profile type '" + type + "'");
}

json profile_to_json(const Profile& p) {
    json j;
    if (const auto* c = std::get_if<ConstantProfile>(&p)) {
        j["type"] = "constant";
        j["value"] = c->value;
    } else if (const auto* n = std::get_if<NodesProfile>(&p)) {
        j["type"] = "nodes";
        j["values"] = n->values;
    } else if (const auto* r = std::get_if<RampProfile>(&p)) {
        j["type"] = "ramp";
        j["from"] = r->from;
        j["to"] = r->to;
    } else if (const auto* b = std::get_if<BumpProfile>(&p)) {
        j["type"] = "bump";
        j["base"] = b->base;
        j["amplitude"] = b->amplitude;
        j["center"] = b->center;
        j["width"] = b->width;
    }
    return j;
}

Grid parse_grid(const json& j) {
    int dim = require_int(j, "dim", "grid");
    if (dim == 1) return build_grid(require_int(j, "nx", "grid"), require_number(j, "length", "grid"));
    if (dim == 2)
        return build_grid(require_int(j, "nx", "grid"), require_int(j, "ny", "grid"),
                          require_number(j, "lx", "grid"), require_number(j, "ly", "grid"));
    throw ConfigError("grid: dim must be 1 or 2");
}

json grid_to_json(const Grid& g) {
    json j;
    j["dim"] = g.dim;
    j["nx"] = g.nx;
    if (g.dim == 1) {
        j["length"] = g.lx;
    } else {
        j["ny"] = g.ny;
        j["lx"] = g.lx;
        j["ly"] = g.ly;
    }
    return j;
}

SolverOptions parse_solver(const json& root) {
    SolverOptions s;
    if (!root.contains("solver")) return s;
    const json& j = root["solver"];
    if (!j.is_object()) throw ConfigError("solver: must be an object");
    s.linear_tol = optional_number(j, "linear_tol", s.linear_tol, "solver");
    s.eigen_tol = optional_number(j, "eigen_tol", s.eigen_tol, "solver");
    s.equilibrium_tol = optional_number(j, "equilibrium_tol", s.equilibrium_tol, "solver");
    s.dt = optional_number(j, "dt", s.dt, "solver");
    s.horizon = optional_number(j, "horizon", s.horizon, "solver");
    s.settle_tol = optional_number(j, "settle_tol", s.settle_tol, "solver");
    s.sample_dt = optional_number(j, "sample_dt", s.sample_dt, "solver");
    if (j.contains("snapshot_times")) {
        const json& ts = j["snapshot_times"];
        if (!ts.is_array()) throw ConfigError("solver: 'snapshot_times' must be an array");
        for (const auto& t : ts) {
            if (!t.is_number()) throw ConfigError("solver: snapshot times must be numbers");
            s.snapshot_times.push_back(t.get<double>());
        }
    }
    for (auto kv : {std::pair{"linear_tol", s.linear_tol}, {"eigen_tol", s.eigen_tol},
                    {"equilibrium_tol", s.equilibrium_tol}, {"horizon", s.horizon},
                    {"settle_tol", s.settle_tol}, {"sample_dt", s.sample_dt}})
        if (!(kv.second > 0.0))
            throw ConfigError(std::string("solver: '") + kv.first + "' must be positive");
    if (s.dt < 0.0) throw ConfigError("solver: 'dt' must be nonnegative (0 = automatic)");
    return s;
}

} // namespace

Scenario parse_scenario(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");

    Scenario s;
    if (root.contains("schema")) {
        if (!root["schema"].is_number_integer())
            throw ConfigError("config: 'schema' must be an integer");
        s.schema = root["schema"].get<int>();
        if (s.schema != 1) throw ConfigError("config: unsupported schema version");
    }
    s.solver = parse_solver(root);

    if (root.contains("grid")) {
        s.grid = parse_grid(root["grid"]);
        const json& coeffs = require(root, "coefficients", "config");
        for (std::size_t k = 0; k < kCoefficientNames.size(); ++k)
            s.coefficients[k] =
                parse_profile(require(coeffs, kCoefficientNames[k], "coefficients"),
                              "coefficients." + kCoefficientNames[k]);
        const json& init = require(root, "initial", "config");
        for (std::size_t k = 0; k < kInitialNames.size(); ++k)
            s.initial[k] = parse_profile(require(init, kInitialNames[k], "initial"),
                                         "initial." + kInitialNames[k]);
        s.has_pde = true;
    }

    if (root.contains("sweep")) {
        const json& j = root["sweep"];
        SweepSpec sw;
        sw.parameter = require(j, "parameter", "sweep").get<std::string>();
        bool known = sw.parameter == "delta";
        for (const auto& n : kCoefficientNames) known = known || sw.parameter == n;
        if (!known) throw ConfigError("sweep: unknown parameter '" + sw.parameter + "'");
        const json& vals = require(j, "values", "sweep");
        if (!vals.is_array() || vals.empty())
            throw ConfigError("sweep: 'values' must be a nonempty array");
        for (const auto& v : vals) {
            if (!v.is_number() || !(v.get<double>() > 0.0))
                throw ConfigError("sweep: values must be positive numbers");
            sw.values.push_back(v.get<double>());
        }
        if (j.contains("simulate")) {
            if (!j["simulate"].is_boolean()) throw ConfigError("sweep: 'simulate' must be a boolean");
            sw.simulate = j["simulate"].get<bool>();
        }
        s.sweep = std::move(sw);
    }

    if (root.contains("ode")) {
        const json& j = root["ode"];
        OdeSpec spec;
        const json& params = require(j, "params", "ode");
        spec.params.lambda = require_number(params, "lambda", "ode.params");
        spec.params.sigma1 = require_number(params, "sigma1", "ode.params");
        spec.params.sigma2 = require_number(params, "sigma2", "ode.params");
        spec.params.beta = require_number(params, "beta", "ode.params");
        spec.params.mu = require_number(params, "mu", "ode.params");
        spec.params.h_u = require_number(params, "h_u", "ode.params");
        validate_params(spec.params);
        const json& init = require(j, "initial", "ode");
        spec.initial.h_i = require_number(init, "h_i", "ode.initial");
        spec.initial.v_u = require_number(init, "v_u", "ode.initial");
        spec.initial.v_i = require_number(init, "v_i", "ode.initial");
        for (double v : {spec.initial.h_i, spec.initial.v_u, spec.initial.v_i})
            if (v < 0.0) throw ConfigError("ode.initial: values must be nonnegative");
        s.ode = spec;
    }

    if (!s.has_pde && !s.ode) throw ConfigError("config: needs a 'grid' or an 'ode' block");
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string serialize_scenario(const Scenario& s) {
    json root;
    root["schema"] = s.schema;
    if (s.has_pde && s.grid) {
        root["grid"] = grid_to_json(*s.grid);
        json coeffs;
        for (std::size_t k = 0; k < kCoefficientNames.size(); ++k)
            coeffs[kCoefficientNames[k]] = profile_to_json(s.coefficients[k]);
        root["coefficients"] = coeffs;
        json init;
        for (std::size_t k = 0; k < kInitialNames.size(); ++k)
            init[kInitialNames[k]] = profile_to_json(s.initial[k]);
        root["initial"] = init;
    }
    json solver;
    solver["linear_tol"] = s.solver.linear_tol;
    solver["eigen_tol"] = s.solver.eigen_tol;
    solver["equilibrium_tol"] = s.solver.equilibrium_tol;
    solver["dt"] = s.solver.dt;
    solver["horizon"] = s.solver.horizon;
    solver["settle_tol"] = s.solver.settle_tol;
    solver["sample_dt"] = s.solver.sample_dt;
    if (!s.solver.snapshot_times.empty()) solver["snapshot_times"] = s.solver.snapshot_times;
    root["solver"] = solver;
    if (s.sweep) {
        json sw;
        sw["parameter"] = s.sweep->parameter;
        sw["values"] = s.sweep->values;
        sw["simulate"] = s.sweep->simulate;
        root["sweep"] = sw;
    }
    if (s.ode) {
        json j;
        j["params"] = {{"lambda", s.ode->params.lambda}, {"sigma1", s.ode->params.sigma1},
                       {"sigma2", s.ode->params.sigma2}, {"beta", s.ode->params.beta},
                       {"mu", s.ode->params.mu},         {"h_u", s.ode->params.h_u}};
        j["initial"] = {{"h_i", s.ode->initial.h_i},
                        {"v_u", s.ode->initial.v_u},
                        {"v_i", s.ode->initial.v_i}};
        root["ode"] = j;
    }
    return root.dump(2) + "\n";
}

namespace {

void require_pde(const Scenario& s) {
    if (!s.has_pde || !s.grid)
        throw ConfigError("config: this command needs 'grid', 'coefficients' and 'initial' blocks");
}

} // namespace

ModelCoefficients build_coefficients(const Scenario& s) {
    require_pde(s);
    const Grid& g = *s.grid;
    ModelCoefficients c{field_from_profile(g, s.coefficients[0]),
                        field_from_profile(g, s.coefficients[1]),
                        field_from_profile(g, s.coefficients[2]),
                        field_from_profile(g, s.coefficients[3]),
                        field_from_profile(g, s.coefficients[4]),
                        field_from_profile(g, s.coefficients[5]),
                        field_from_profile(g, s.coefficients[6]),
                        field_from_profile(g, s.coefficients[7])};
    validate_coefficients(c);
    return c;
}

ModelCoefficients build_swept_coefficients(const Scenario& s, const std::string& parameter,
                                           double value) {
    require_pde(s);
    Scenario local = s;
    auto replace_constant = [&](std::size_t k) { local.coefficients[k] = ConstantProfile{value}; };
    auto scale = [&](std::size_t k) {
        Field f = field_from_profile(*s.grid, s.coefficients[k]);
        for (auto& v : f.values) v *= value;
        local.coefficients[k] = NodesProfile{f.values};
    };
    if (parameter == "delta") {
        replace_constant(0);
        replace_constant(1);
    } else if (parameter == "delta1") {
        replace_constant(0);
    } else if (parameter == "delta2") {
        replace_constant(1);
    } else {
        bool found = false;
        for (std::size_t k = 0; k < kCoefficientNames.size(); ++k)
            if (kCoefficientNames[k] == parameter) {
                scale(k);
                found = true;
            }
        if (!found) throw ConfigError("sweep: unknown parameter '" + parameter + "'");
    }
    return build_coefficients(local);
}

std::array<Field, 3> build_initial_fields(const Scenario& s) {
    require_pde(s);
    std::array<Field, 3> out;
    for (std::size_t k = 0; k < kInitialNames.size(); ++k) {
        out[k] = field_from_profile(*s.grid, s.initial[k]);
        for (double v : out[k].values)
            if (v < 0.0 || !std::isfinite(v))
                throw ConfigError("initial." + kInitialNames[k] + ": values must be nonnegative");
    }
    return out;
}

} // namespace vhrd
