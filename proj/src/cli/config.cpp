#include "vkshell/cli/config.hpp"

#include "vkshell/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace vkshell::cli {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
    throw ConfigError(where + ": " + what);
}

void allow_keys(const json& j, const std::string& where, std::initializer_list<const char*> keys) {
    if (!j.is_object()) fail(where, "expected an object");
    std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, _] : j.items())
        if (!ok.count(k)) fail(where, "unknown key '" + k + "'");
}

double get_number(const json& j, const std::string& where) {
    if (!j.is_number()) fail(where, "expected a number");
    const double x = j.get<double>();
    if (!std::isfinite(x)) fail(where, "must be finite");
    return x;
}

int get_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) fail(where, "expected an integer");
    return j.get<int>();
}

std::string get_string(const json& j, const std::string& where) {
    if (!j.is_string()) fail(where, "expected a string");
    return j.get<std::string>();
}

Wave parse_wave(const json& j, const std::string& where) {
    const auto s = get_string(j, where);
    if (s == "one") return Wave::One;
    if (s == "sin") return Wave::Sin;
    if (s == "cos") return Wave::Cos;
    if (s == "exp") return Wave::Exp;
    fail(where, "unknown wave '" + s + "' (one|sin|cos|exp)");
}

const char* wave_name(Wave w) {
    switch (w) {
    case Wave::One: return "one";
    case Wave::Sin: return "sin";
    case Wave::Cos: return "cos";
    case Wave::Exp: return "exp";
    }
    return "one";
}

Term parse_term(const json& j, const std::string& where) {
    Term t;
    if (j.is_array()) {
        if (j.size() != 3) fail(where, "term triple must be [coef, p, q]");
        t.coef = get_number(j[0], where + "[0]");
        t.f1.power = get_int(j[1], where + "[1]");
        t.f2.power = get_int(j[2], where + "[2]");
    } else {
        allow_keys(j, where, {"coef", "p", "q", "t1", "k1", "phase1", "t2", "k2", "phase2"});
        if (!j.contains("coef")) fail(where, "term needs 'coef'");
        t.coef = get_number(j["coef"], where + ".coef");
        if (j.contains("p")) t.f1.power = get_int(j["p"], where + ".p");
        if (j.contains("q")) t.f2.power = get_int(j["q"], where + ".q");
        if (j.contains("t1")) t.f1.wave = parse_wave(j["t1"], where + ".t1");
        if (j.contains("k1")) t.f1.k = get_number(j["k1"], where + ".k1");
        if (j.contains("phase1")) t.f1.phase = get_number(j["phase1"], where + ".phase1");
        if (j.contains("t2")) t.f2.wave = parse_wave(j["t2"], where + ".t2");
        if (j.contains("k2")) t.f2.k = get_number(j["k2"], where + ".k2");
        if (j.contains("phase2")) t.f2.phase = get_number(j["phase2"], where + ".phase2");
    }
    if (t.f1.power < 0 || t.f2.power < 0) fail(where, "powers must be nonnegative");
    return t;
}

ClosedForm preset(const std::string& name, double amp, const Box& d, const std::string& where) {
    if (name == "zero") return {};
    if (name == "saddle") return ClosedForm::monomial(amp, 1, 1);
    if (name == "paraboloid") return ClosedForm::monomial(0.5 * amp, 2, 0) + ClosedForm::monomial(0.5 * amp, 0, 2);
    if (name == "sine") {
        const double k1 = 2.0 * std::numbers::pi / d.width(), k2 = 2.0 * std::numbers::pi / d.height();
        return ClosedForm::wave(amp, Wave::Sin, k1, -k1 * d.a1, Wave::Sin, k2, -k2 * d.a2);
    }
    fail(where, "unknown preset '" + name + "' (zero|saddle|paraboloid|sine)");
}

} // namespace

const char* to_string(Command c) {
    switch (c) {
    case Command::Verify: return "verify";
    case Command::Minimize: return "minimize";
    case Command::SolveVK: return "solve-vk";
    case Command::Scaling: return "scaling";
    }
    return "?";
}

ClosedForm parse_closed_form(const json& j, const Box& domain, const std::string& where) {
    if (j.is_string()) return preset(j.get<std::string>(), 1.0, domain, where);
    if (j.is_array()) {
        std::vector<Term> terms;
        for (std::size_t k = 0; k < j.size(); ++k) terms.push_back(parse_term(j[k], where + "[" + std::to_string(k) + "]"));
        return ClosedForm(std::move(terms));
    }
    if (j.is_object()) {
        if (j.contains("preset")) {
            allow_keys(j, where, {"preset", "amplitude"});
            const double amp = j.contains("amplitude") ? get_number(j["amplitude"], where + ".amplitude") : 1.0;
            return preset(get_string(j["preset"], where + ".preset"), amp, domain, where);
        }
        allow_keys(j, where, {"terms"});
        if (!j.contains("terms")) fail(where, "expected 'preset' or 'terms'");
        return parse_closed_form(j["terms"], domain, where + ".terms");
    }
    fail(where, "expected a preset name, a term list or an object");
}

json closed_form_to_json(const ClosedForm& f) {
    json arr = json::array();
    for (const auto& t : f.terms()) {
        arr.push_back({{"coef", t.coef},
                       {"p", t.f1.power},
                       {"q", t.f2.power},
                       {"t1", wave_name(t.f1.wave)},
                       {"k1", t.f1.k},
                       {"phase1", t.f1.phase},
                       {"t2", wave_name(t.f2.wave)},
                       {"k2", t.f2.k},
                       {"phase2", t.f2.phase}});
    }
    return arr;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

Grid2D ExperimentConfig::make_grid() const { return Grid2D(grid.nx, grid.ny, grid.domain, grid.bc); }

Material ExperimentConfig::material() const { return Material(mu, lambda); }

ExperimentConfig parse_config(const json& doc) {
    ExperimentConfig cfg;
    allow_keys(doc, "config", {"grid", "material", "growth", "geometry", "state", "run"});

    if (doc.contains("grid")) {
        const auto& g = doc["grid"];
        allow_keys(g, "grid", {"nx", "ny", "domain", "bc"});
        if (g.contains("nx")) cfg.grid.nx = get_int(g["nx"], "grid.nx");
        if (g.contains("ny")) cfg.grid.ny = get_int(g["ny"], "grid.ny");
        if (g.contains("domain")) {
            const auto& d = g["domain"];
            if (!d.is_array() || d.size() != 4) fail("grid.domain", "expected [a1, b1, a2, b2]");
            cfg.grid.domain = {get_number(d[0], "grid.domain[0]"), get_number(d[1], "grid.domain[1]"),
                               get_number(d[2], "grid.domain[2]"), get_number(d[3], "grid.domain[3]")};
        }
        if (g.contains("bc")) {
            const auto bc = get_string(g["bc"], "grid.bc");
            if (bc == "periodic") cfg.grid.bc = BoundaryMode::Periodic;
            else if (bc == "dirichlet" || bc == "dirichlet-ghost") cfg.grid.bc = BoundaryMode::DirichletGhost;
            else fail("grid.bc", "expected 'periodic' or 'dirichlet'");
        }
    }
    // Grid sizing is checked eagerly so that bad sizes surface as configuration errors.
    try {
        (void)cfg.make_grid();
    } catch (const SizingError& e) {
        fail("grid", e.what());
    }
    const Box& dom = cfg.grid.domain;

    if (doc.contains("material")) {
        const auto& m = doc["material"];
        allow_keys(m, "material", {"mu", "lambda"});
        if (m.contains("mu")) cfg.mu = get_number(m["mu"], "material.mu");
        if (m.contains("lambda")) cfg.lambda = get_number(m["lambda"], "material.lambda");
    }
    try {
        (void)cfg.material();
    } catch (const InputError& e) {
        fail("material", e.what());
    }

    if (doc.contains("growth")) {
        const auto& gr = doc["growth"];
        if (!gr.is_object()) fail("growth", "expected an object");
        for (const auto& [key, val] : gr.items()) {
            int i = 0, j = 0;
            char tail = 0;
            std::string kind;
            if (key.rfind("eps.", 0) == 0) kind = "eps";
            else if (key.rfind("kappa.", 0) == 0) kind = "kappa";
            else fail("growth", "unknown key '" + key + "' (expected eps.i.j or kappa.i.j)");
            const std::string idx = key.substr(kind.size() + 1);
            if (std::sscanf(idx.c_str(), "%d.%d%c", &i, &j, &tail) != 2 || i < 1 || i > 3 || j < 1 || j > 3)
                fail("growth", "bad tensor index in '" + key + "'");
            auto& slot = kind == "eps" ? cfg.growth.eps[i - 1][j - 1] : cfg.growth.kappa[i - 1][j - 1];
            slot = parse_closed_form(val, dom, "growth." + key);
        }
        try {
            cfg.growth.validate();
        } catch (const SpecError& e) {
            fail("growth", e.what());
        }
    }

    if (doc.contains("geometry")) {
        const auto& ge = doc["geometry"];
        allow_keys(ge, "geometry", {"v0", "alpha"});
        if (ge.contains("v0")) cfg.v0 = parse_closed_form(ge["v0"], dom, "geometry.v0");
        if (ge.contains("alpha")) cfg.alpha = get_number(ge["alpha"], "geometry.alpha");
        if (cfg.alpha < 0.0) fail("geometry.alpha", "must be nonnegative");
    }

    if (doc.contains("state")) {
        const auto& st = doc["state"];
        allow_keys(st, "state", {"v", "w1", "w2", "vtilde"});
        RecoveryState rs;
        if (st.contains("v")) rs.v = parse_closed_form(st["v"], dom, "state.v");
        if (st.contains("w1")) rs.w[0] = parse_closed_form(st["w1"], dom, "state.w1");
        if (st.contains("w2")) rs.w[1] = parse_closed_form(st["w2"], dom, "state.w2");
        if (st.contains("vtilde")) rs.vtilde = parse_closed_form(st["vtilde"], dom, "state.vtilde");
        cfg.state = rs;
    }

    if (doc.contains("run")) {
        const auto& r = doc["run"];
        allow_keys(r, "run",
                   {"command", "functional", "model", "tol", "max_iter", "h_list", "n_t", "penalty", "relaxation",
                    "route", "seed", "init", "init_amplitude", "output_dir"});
        auto& rc = cfg.run;
        if (r.contains("command")) {
            const auto c = get_string(r["command"], "run.command");
            if (c == "verify") rc.command = Command::Verify;
            else if (c == "minimize") rc.command = Command::Minimize;
            else if (c == "solve-vk") rc.command = Command::SolveVK;
            else if (c == "scaling") rc.command = Command::Scaling;
            else fail("run.command", "expected verify|minimize|solve-vk|scaling");
        }
        if (r.contains("functional")) {
            const auto f = get_string(r["functional"], "run.functional");
            if (f == "I40") rc.functional = Functional::I40;
            else if (f == "I41") rc.functional = Functional::I41;
            else if (f == "I4INF") rc.functional = Functional::I4INF;
            else fail("run.functional", "expected I40|I41|I4INF");
        }
        if (r.contains("model")) {
            const auto m = get_string(r["model"], "run.model");
            if (m == "old") rc.model = VKModel::Old;
            else if (m == "new") rc.model = VKModel::New;
            else fail("run.model", "expected old|new");
        }
        if (r.contains("tol")) rc.tol = get_number(r["tol"], "run.tol");
        if (r.contains("max_iter")) rc.max_iter = get_int(r["max_iter"], "run.max_iter");
        if (rc.max_iter < 0) fail("run.max_iter", "must be nonnegative");
        if (r.contains("h_list")) {
            if (!r["h_list"].is_array() || r["h_list"].empty()) fail("run.h_list", "expected a nonempty array");
            rc.h_list.clear();
            for (std::size_t k = 0; k < r["h_list"].size(); ++k) {
                rc.h_list.push_back(get_number(r["h_list"][k], "run.h_list"));
                if (!(rc.h_list.back() > 0.0)) fail("run.h_list", "thicknesses must be positive");
                if (k > 0 && !(rc.h_list[k] < rc.h_list[k - 1])) fail("run.h_list", "must be strictly decreasing");
            }
        }
        if (r.contains("n_t")) rc.n_t = get_int(r["n_t"], "run.n_t");
        if (rc.n_t < 3 || rc.n_t % 2 == 0) fail("run.n_t", "must be an odd integer >= 3");
        if (r.contains("penalty")) {
            const auto& p = r["penalty"];
            allow_keys(p, "run.penalty", {"initial", "factor", "stages"});
            if (p.contains("initial")) rc.penalty.initial = get_number(p["initial"], "run.penalty.initial");
            if (p.contains("factor")) rc.penalty.factor = get_number(p["factor"], "run.penalty.factor");
            if (p.contains("stages")) rc.penalty.stages = get_int(p["stages"], "run.penalty.stages");
            if (!(rc.penalty.initial >= 0.0) || !(rc.penalty.factor >= 1.0) || rc.penalty.stages < 1)
                fail("run.penalty", "need initial >= 0, factor >= 1, stages >= 1");
        }
        if (r.contains("relaxation")) rc.relaxation = get_number(r["relaxation"], "run.relaxation");
        if (!(rc.relaxation > 0.0 && rc.relaxation <= 1.0)) fail("run.relaxation", "must lie in (0, 1]");
        if (r.contains("route")) {
            const auto rt = get_string(r["route"], "run.route");
            if (rt == "direct") rc.route = EnergyRoute::Direct;
            else if (rt == "pulled-back") rc.route = EnergyRoute::PulledBack;
            else fail("run.route", "expected direct|pulled-back");
        }
        if (r.contains("seed")) {
            if (!r["seed"].is_number_unsigned()) fail("run.seed", "expected a nonnegative integer");
            rc.seed = r["seed"].get<std::uint64_t>();
        }
        if (r.contains("init")) {
            rc.init = get_string(r["init"], "run.init");
            if (rc.init != "zero" && rc.init != "random" && rc.init != "state")
                fail("run.init", "expected zero|random|state");
            if (rc.init == "state" && !cfg.state) fail("run.init", "'state' requires a state block");
        }
        if (r.contains("init_amplitude")) rc.init_amplitude = get_number(r["init_amplitude"], "run.init_amplitude");
        if (r.contains("output_dir")) rc.output_dir = get_string(r["output_dir"], "run.output_dir");
    }

    // Canonical echo.
    json res;
    res["grid"] = {{"nx", cfg.grid.nx},
                   {"ny", cfg.grid.ny},
                   {"domain", {dom.a1, dom.b1, dom.a2, dom.b2}},
                   {"bc", cfg.grid.bc == BoundaryMode::Periodic ? "periodic" : "dirichlet"}};
    res["material"] = {{"mu", cfg.mu}, {"lambda", cfg.lambda}};
    json gr = json::object();
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            const std::string ij = std::to_string(i + 1) + "." + std::to_string(j + 1);
            if (!cfg.growth.eps[i][j].terms().empty()) gr["eps." + ij] = closed_form_to_json(cfg.growth.eps[i][j]);
            if (!cfg.growth.kappa[i][j].terms().empty())
                gr["kappa." + ij] = closed_form_to_json(cfg.growth.kappa[i][j]);
        }
    }
    res["growth"] = gr;
    res["geometry"] = {{"v0", closed_form_to_json(cfg.v0)}, {"alpha", cfg.alpha}};
    if (cfg.state) {
        res["state"] = {{"v", closed_form_to_json(cfg.state->v)},
                        {"w1", closed_form_to_json(cfg.state->w[0])},
                        {"w2", closed_form_to_json(cfg.state->w[1])},
                        {"vtilde", closed_form_to_json(cfg.state->vtilde)}};
    }
    const auto& rc = cfg.run;
    res["run"] = {{"command", to_string(rc.command)},
                  {"functional", vkshell::to_string(rc.functional)},
                  {"model", vkshell::to_string(rc.model)},
                  {"tol", rc.tol},
                  {"max_iter", rc.max_iter},
                  {"h_list", rc.h_list},
                  {"n_t", rc.n_t},
                  {"penalty", {{"initial", rc.penalty.initial}, {"factor", rc.penalty.factor}, {"stages", rc.penalty.stages}}},
                  {"relaxation", rc.relaxation},
                  {"route", rc.route == EnergyRoute::Direct ? "direct" : "pulled-back"},
                  {"seed", rc.seed},
                  {"init", rc.init},
                  {"init_amplitude", rc.init_amplitude},
                  {"output_dir", rc.output_dir}};
    cfg.resolved = res;
    cfg.hash = fnv1a_hex(res.dump());
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

} // namespace vkshell::cli
