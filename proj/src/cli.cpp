#include "fieldroad/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fieldroad/checks.hpp"
#include "fieldroad/csv.hpp"
#include "fieldroad/errors.hpp"
#include "fieldroad/geometry.hpp"
#include "fieldroad/parallel.hpp"
#include "fieldroad/paths.hpp"

namespace fieldroad {

namespace {

using json = nlohmann::ordered_json;

// ------------------------------------------------------------ parsing ---

double parse_double(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw ConfigError("cannot parse " + what + " from '" + text + "'");
    }
    if (used != text.size() || !std::isfinite(v)) throw ConfigError("cannot parse " + what + " from '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) parts.push_back(item);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

std::vector<double> parse_list(const std::string& text, const std::string& what) {
    std::vector<double> out;
    for (const auto& part : split(text, ',')) out.push_back(parse_double(part, what));
    if (out.empty()) throw ConfigError(what + " list is empty");
    return out;
}

std::array<double, 2> parse_point(const std::string& text) {
    const auto v = parse_list(text, "point");
    if (v.size() != 2) throw ConfigError("a point is 'x,y', got '" + text + "'");
    return {v[0], v[1]};
}

std::size_t parse_count(double v, const std::string& what) {
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError(what + " must be a positive integer");
    return static_cast<std::size_t>(v);
}

GridSpec parse_grid(const std::string& text) {
    const auto v = parse_list(text, "grid");
    if (v.size() != 6) throw ConfigError("a grid is 'x_min,x_max,y_min,y_max,nx,ny', got '" + text + "'");
    GridSpec g{v[0], v[1], v[2], v[3], parse_count(v[4], "nx"), parse_count(v[5], "ny")};
    validate(g);
    return g;
}

PartialParams parse_fixed(const std::string& text) {
    PartialParams fixed;
    for (const auto& item : split(text, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ConfigError("fixed parameters are 'name=value', got '" + item + "'");
        const std::string name = item.substr(0, eq);
        const double value = parse_double(item.substr(eq + 1), "fixed " + name);
        if (name == "a") {
            fixed.a = value;
        } else if (name == "b") {
            fixed.b = value;
        } else if (name == "c") {
            fixed.c = value;
        } else {
            throw ConfigError("unknown fixed parameter '" + name + "'");
        }
    }
    return fixed;
}

EdgePlacement parse_placement(const std::string& name) {
    if (name == "linear") return EdgePlacement::Linear;
    if (name == "exact") return EdgePlacement::ExactRoot;
    throw ConfigError("unknown placement '" + name + "' (expected linear or exact)");
}

// -------------------------------------------------------------- json ---

json grid_to_json(const GridSpec& g) {
    return {{"x_min", g.x_min}, {"x_max", g.x_max}, {"y_min", g.y_min},
            {"y_max", g.y_max}, {"nx", g.nx},       {"ny", g.ny}};
}

class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
        if (!node_.is_object()) throw ConfigError(path_ + " must be an object");
    }

    template <class T>
    void get(const char* key, T& out) {
        seen_.emplace_back(key);
        const auto it = node_.find(key);
        if (it == node_.end()) return;
        try {
            out = it->template get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(path_ + "." + key + ": " + e.what());
        }
    }

    Reader child(const char* key) {
        seen_.emplace_back(key);
        const auto it = node_.find(key);
        return it == node_.end() ? Reader(empty(), path_ + "." + key) : Reader(*it, path_ + "." + key);
    }

    void finish() const {
        for (const auto& item : node_.items()) {
            if (std::find(seen_.begin(), seen_.end(), item.key()) == seen_.end()) {
                throw ConfigError("unknown config key " + path_ + "." + item.key());
            }
        }
    }

private:
    static const json& empty() {
        static const json e = json::object();
        return e;
    }

    const json& node_;
    std::string path_;
    std::vector<std::string> seen_;
};

void read_grid(Reader r, GridSpec& g) {
    r.get("x_min", g.x_min);
    r.get("x_max", g.x_max);
    r.get("y_min", g.y_min);
    r.get("y_max", g.y_max);
    r.get("nx", g.nx);
    r.get("ny", g.ny);
    r.finish();
}

void read_road(Reader r, RoadParams& road) {
    r.get("a", road.a);
    r.get("b", road.b);
    r.finish();
}

json config_json(const RunConfig& c) {
    json points = json::array();
    for (const auto& p : c.points) points.push_back({p[0], p[1]});
    return {
        {"command", c.command},
        {"params", {{"a", c.params.a}, {"b", c.params.b}, {"c", c.params.c}}},
        {"t", c.t},
        {"points", points},
        {"grid", grid_to_json(c.grid)},
        {"level", c.level},
        {"placement", c.placement},
        {"fixed", c.fixed},
        {"vary", c.vary},
        {"samples", c.samples},
        {"thetas", c.thetas},
        {"cone",
         {{"alpha", c.cone.alpha},
          {"road0", {{"a", c.cone.road0.a}, {"b", c.cone.road0.b}}},
          {"road_alpha", {{"a", c.cone.road_alpha.a}, {"b", c.cone.road_alpha.b}}},
          {"field_advection", c.cone.field_advection},
          {"r_max", c.r_max},
          {"condition_samples", c.condition_samples},
          {"override_unverified", c.override_unverified}}},
        {"hj",
         {{"grid", grid_to_json(c.hj.spec)},
          {"cfl", c.hj.cfl},
          {"t_end", c.hj.t_end},
          {"k_init", c.hj.k_init},
          {"scheme", to_string(c.hj.scheme)},
          {"collar", c.collar}}},
        {"kpp",
         {{"eps", c.kpp.eps},
          {"grid", grid_to_json(c.kpp.spec)},
          {"t_end", c.kpp.t_end},
          {"dt", c.kpp.dt},
          {"cfl", c.kpp.cfl},
          {"k_init", c.kpp.k_init},
          {"eps_values", c.eps_values}}},
        {"strip",
         {{"delta", c.strip.delta},
          {"a", c.strip.a_target},
          {"b", c.strip.b_target},
          {"grid", grid_to_json(c.strip.spec)},
          {"strip_rows", c.strip.strip_rows},
          {"x_collar", c.strip.x_collar},
          {"dt", c.strip.dt},
          {"t_end", c.strip.t_end},
          {"x_uniform_initial", c.strip.x_uniform_initial},
          {"deltas", c.deltas}}},
        {"check", {{"quick", c.quick}, {"only", c.only}}},
        {"io", {{"output", c.output}, {"meta", c.meta}, {"field_dump", c.field_dump}}},
        {"threads", c.threads},
        {"seed", c.seed},
    };
}

// --------------------------------------------------------------- io ---

class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : path_(path), out_(&fallback) {
        if (path != "-") {
            file_.open(path, std::ios::binary);
            if (!file_) throw IoError("cannot open '" + path + "' for writing");
            out_ = &file_;
        }
    }

    std::ostream& stream() { return *out_; }

    void close() {
        out_->flush();
        if (!*out_) throw IoError("write to '" + path_ + "' failed");
    }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* out_;
};

void emit_table(const RunConfig& cfg, std::ostream& out, const CsvTable& table) {
    Sink sink(cfg.output, out);
    write_csv(sink.stream(), table);
    sink.close();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void emit_meta(const RunConfig& cfg, const json& results, double wall) {
    if (cfg.meta.empty()) return;
    json meta = {{"command", cfg.command},
                 {"created_at", utc_timestamp()},
                 {"wall_seconds", wall},
                 {"config", config_json(cfg)},
                 {"results", results}};
    std::ofstream f(cfg.meta, std::ios::binary);
    if (!f) throw IoError("cannot open '" + cfg.meta + "' for writing");
    f << meta.dump(2) << '\n';
    if (!f) throw IoError("write to '" + cfg.meta + "' failed");
}

std::string format_bool(bool v) { return v ? "1" : "0"; }

// ---------------------------------------------------------- commands ---

struct CommandOutcome {
    json results = json::object();
    int exit_code = 0;
};

CommandOutcome run_eval(const RunConfig& cfg, std::ostream& out) {
    CsvTable table{{"x", "y", "t", "s_star", "phi_star", "J", "v", "regime"}, {}};
    for (const auto& p : cfg.points) {
        const auto e = solve_minimizer(cfg.params, {p[0], p[1], cfg.t});
        table.add_row({format_number(p[0]), format_number(p[1]), format_number(cfg.t), format_number(e.s_star),
                       format_number(e.phi_star), format_number(e.J), format_number(e.v), to_string(e.regime)});
    }
    emit_table(cfg, out, table);
    return {{{"points", cfg.points.size()}, {"outside_theorem_scope", !cfg.params.in_theorem_scope()}}, 0};
}

CommandOutcome run_contour(const RunConfig& cfg, std::ostream& out) {
    const auto placement = parse_placement(cfg.placement);
    const auto field = eval_field(cfg.params, cfg.grid, cfg.t);
    if (!field.poisoned.empty()) {
        throw DomainError(std::to_string(field.poisoned.size()) + " grid nodes failed to evaluate");
    }
    const auto polys = extract_phi_contour(cfg.params, field, cfg.t, cfg.level, placement);
    emit_table(cfg, out, contour_table("level", cfg.level, polys));
    if (!cfg.field_dump.empty()) write_csv(std::filesystem::path(cfg.field_dump), field_table(field));
    json info = json::array();
    for (const auto& c : polys) {
        info.push_back({{"vertices", c.vertices.size()},
                        {"closed_by_boundary", c.closed_by_boundary},
                        {"convex", c.vertices.size() >= 3 && convexity_audit(c).passed}});
    }
    return {{{"polylines", info}}, 0};
}

CommandOutcome run_sweep(const RunConfig& cfg, std::ostream& out) {
    const auto range = parse_sweep_range(cfg.vary);
    const auto entries =
        sweep_figure2(parse_fixed(cfg.fixed), range.name, range.values, cfg.grid, cfg.level, parse_placement(cfg.placement));
    CsvTable table{{"param_name", "param_value", "polyline_id", "vertex_index", "x", "y"}, {}};
    json info = json::array();
    for (const auto& e : entries) {
        append_contours(table, range.name, e.value, e.contours);
        info.push_back({{"value", e.value},
                        {"x_max", e.x_max},
                        {"road_extent", e.road_extent},
                        {"touches_window", e.touches_window},
                        {"polylines", e.contours.size()}});
    }
    emit_table(cfg, out, table);
    return {{{"name", range.name}, {"entries", info}}, 0};
}

SpaceTimePoint single_point(const RunConfig& cfg) {
    if (cfg.points.size() != 1) throw ConfigError("this command takes exactly one --point");
    return {cfg.points[0][0], cfg.points[0][1], cfg.t};
}

CommandOutcome run_path(const RunConfig& cfg, std::ostream& out) {
    const auto p = single_point(cfg);
    const auto plan = build_optimal_plan(cfg.params, p);
    CsvTable table{{"tau", "x", "y", "on_road"}, {}};
    for (std::size_t k = 0; k <= cfg.samples; ++k) {
        const double tau = p.t * static_cast<double>(k) / static_cast<double>(cfg.samples);
        const auto g = plan.position(tau);
        table.add_row({format_number(tau), format_number(g[0]), format_number(g[1]),
                       format_bool(plan.segment_at(tau).on_road)});
    }
    emit_table(cfg, out, table);
    const auto e = solve_minimizer(cfg.params, p);
    return {{{"regime", to_string(plan.regime)},
             {"s_bar", plan.s_bar},
             {"t0", plan.t0},
             {"x0", plan.x0},
             {"payoff", path_payoff(cfg.params, plan, p).value},
             {"J", e.J},
             {"jensen_residual", jensen_equality_residual(plan)}},
            0};
}

CommandOutcome run_freidlin(const RunConfig& cfg, std::ostream& out) {
    CsvTable table{{"theta", "x", "y", "t", "regime", "min_margin", "equality_error", "surplus_error", "passed"}, {}};
    std::size_t failed = 0;
    for (double theta : cfg.thetas) {
        const auto p = locate_front_point(cfg.params, theta, cfg.t);
        const auto r = freidlin_check(cfg.params, p, cfg.samples);
        if (!r.passed) ++failed;
        table.add_row({format_number(theta), format_number(p.x), format_number(p.y), format_number(p.t),
                       to_string(r.regime), format_number(r.min_margin), format_number(r.equality_error),
                       format_number(r.surplus_error), format_bool(r.passed)});
    }
    emit_table(cfg, out, table);
    return {{{"front_points", cfg.thetas.size()}, {"failed", failed}}, 0};
}

CommandOutcome run_cone(const RunConfig& cfg, std::ostream& out) {
    validate(cfg.cone);
    const auto rep = theorem5_condition(cfg.cone, cfg.r_max, cfg.condition_samples);
    if (!rep.passed && !cfg.override_unverified) {
        throw DomainError("the road pair fails the admissibility condition; pass --override to evaluate anyway");
    }
    std::vector<SpaceTimePoint> points;
    for (const auto& p : cfg.points) points.push_back({p[0], p[1], cfg.t});
    emit_table(cfg, out, cone_table(cfg.cone, points));
    json results = {{"condition_passed", rep.passed},
                    {"max_violation", rep.max_violation},
                    {"max_abs_gap", rep.max_abs_gap}};
    if (!rep.passed) results["warning"] = "w_alpha evaluated without a verified admissibility condition";
    return {results, 0};
}

CommandOutcome run_hj(const RunConfig& cfg, std::ostream& out) {
    const auto run = solve(cfg.hj, cfg.params);
    const auto rep = compare_to_closed_form(run, cfg.params, run.t_final, cfg.hj.spec, cfg.collar);
    emit_table(cfg, out, field_table(run.field));
    return {{{"grid", grid_to_json(cfg.hj.spec)},
             {"cfl", cfg.hj.cfl},
             {"k_init", cfg.hj.k_init},
             {"scheme", to_string(cfg.hj.scheme)},
             {"t_final", run.t_final},
             {"steps", run.steps},
             {"dt_min", run.dt_min},
             {"dt_max", run.dt_max},
             {"solve_seconds", run.wall_seconds},
             {"linf", rep.linf},
             {"l1", rep.l1},
             {"collar", rep.collar},
             {"x_at_linf", rep.x_at_linf},
             {"y_at_linf", rep.y_at_linf}},
            0};
}

CommandOutcome run_kpp(const RunConfig& cfg, std::ostream& out) {
    const auto gaps = eps_trend(cfg.params, cfg.kpp, cfg.eps_values);
    emit_table(cfg, out, gap_table(gaps));
    json info = json::array();
    for (const auto& g : gaps) {
        info.push_back({{"eps", g.eps},
                        {"sup_gap", g.sup},
                        {"collar", g.collar},
                        {"n_compared", g.n_compared},
                        {"x_at_sup", g.x_at_sup},
                        {"y_at_sup", g.y_at_sup}});
    }
    return {{{"runs", info}}, 0};
}

CommandOutcome run_strip(const RunConfig& cfg, std::ostream& out) {
    std::vector<StripReport> reports;
    json info = json::array();
    for (double delta : cfg.deltas) {
        StripConfig sc = cfg.strip;
        sc.delta = delta;
        const auto r = solve_thin_strip(sc);
        reports.push_back(r);
        info.push_back({{"delta", r.delta},
                        {"residual", r.residual},
                        {"interface_flux", r.interface_flux},
                        {"flux_mismatch", r.flux_mismatch},
                        {"flux_scale", r.flux_scale},
                        {"mass_change", r.mass_change},
                        {"reaction_integral", r.reaction_integral},
                        {"steps", r.steps},
                        {"solve_seconds", r.wall_seconds}});
    }
    emit_table(cfg, out, residual_table(reports));
    return {{{"runs", info}}, 0};
}

CommandOutcome run_check_command(const RunConfig& cfg, std::ostream& out) {
    CheckOptions opt;
    opt.seed = cfg.seed;
    opt.quick = cfg.quick;
    const auto ids = cfg.only.empty() ? all_check_ids() : cfg.only;
    Sink sink(cfg.output, out);
    json info = json::array();
    std::vector<int> failed;
    for (int id : ids) {
        const auto r = run_check(id, opt);
        sink.stream() << format_check_line(r) << '\n';
        sink.stream().flush();
        if (!r.passed) failed.push_back(id);
        info.push_back({{"id", r.id}, {"name", r.name}, {"passed", r.passed}, {"detail", r.detail}, {"seconds", r.seconds}});
    }
    sink.close();
    return {{{"checks", info}, {"failed", failed}}, failed.empty() ? 0 : 2};
}

CommandOutcome dispatch(const RunConfig& cfg, std::ostream& out) {
    if (cfg.command == "eval") return run_eval(cfg, out);
    if (cfg.command == "contour") return run_contour(cfg, out);
    if (cfg.command == "sweep") return run_sweep(cfg, out);
    if (cfg.command == "path") return run_path(cfg, out);
    if (cfg.command == "freidlin") return run_freidlin(cfg, out);
    if (cfg.command == "cone") return run_cone(cfg, out);
    if (cfg.command == "hj") return run_hj(cfg, out);
    if (cfg.command == "kpp") return run_kpp(cfg, out);
    if (cfg.command == "strip") return run_strip(cfg, out);
    if (cfg.command == "check") return run_check_command(cfg, out);
    throw ConfigError("unknown command '" + cfg.command + "'");
}

void error_line(std::ostream& err, const std::string& kind, const std::string& message) {
    err << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read config '" + path + "'");
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

// Strings collected from flags that need parsing after CLI11 is done.
struct Pending {
    std::vector<std::string> points;
    std::string grid;
    std::string thetas;
    std::string eps;
    std::string deltas;
    std::string only;
    std::string scheme;
    std::string save_config;
};

void add_params(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--a", cfg.params.a, "road diffusivity (default 2)");
    sub->add_option("--b", cfg.params.b, "road drift (default 2)");
    sub->add_option("--c", cfg.params.c, "field advection (default 2)");
}

}  // namespace

std::string config_to_json(const RunConfig& config) { return config_json(config).dump(2); }

RunConfig config_from_json(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig c;
    Reader r(root, "config");
    r.get("command", c.command);
    {
        auto p = r.child("params");
        p.get("a", c.params.a);
        p.get("b", c.params.b);
        p.get("c", c.params.c);
        p.finish();
    }
    r.get("t", c.t);
    r.get("points", c.points);
    read_grid(r.child("grid"), c.grid);
    r.get("level", c.level);
    r.get("placement", c.placement);
    r.get("fixed", c.fixed);
    r.get("vary", c.vary);
    r.get("samples", c.samples);
    r.get("thetas", c.thetas);
    {
        auto k = r.child("cone");
        k.get("alpha", c.cone.alpha);
        read_road(k.child("road0"), c.cone.road0);
        read_road(k.child("road_alpha"), c.cone.road_alpha);
        k.get("field_advection", c.cone.field_advection);
        k.get("r_max", c.r_max);
        k.get("condition_samples", c.condition_samples);
        k.get("override_unverified", c.override_unverified);
        k.finish();
    }
    {
        auto h = r.child("hj");
        read_grid(h.child("grid"), c.hj.spec);
        h.get("cfl", c.hj.cfl);
        h.get("t_end", c.hj.t_end);
        h.get("k_init", c.hj.k_init);
        std::string scheme = to_string(c.hj.scheme);
        h.get("scheme", scheme);
        c.hj.scheme = scheme_from_string(scheme);
        h.get("collar", c.collar);
        h.finish();
    }
    {
        auto k = r.child("kpp");
        k.get("eps", c.kpp.eps);
        read_grid(k.child("grid"), c.kpp.spec);
        k.get("t_end", c.kpp.t_end);
        k.get("dt", c.kpp.dt);
        k.get("cfl", c.kpp.cfl);
        k.get("k_init", c.kpp.k_init);
        k.get("eps_values", c.eps_values);
        k.finish();
    }
    {
        auto s = r.child("strip");
        s.get("delta", c.strip.delta);
        s.get("a", c.strip.a_target);
        s.get("b", c.strip.b_target);
        read_grid(s.child("grid"), c.strip.spec);
        s.get("strip_rows", c.strip.strip_rows);
        s.get("x_collar", c.strip.x_collar);
        s.get("dt", c.strip.dt);
        s.get("t_end", c.strip.t_end);
        s.get("x_uniform_initial", c.strip.x_uniform_initial);
        s.get("deltas", c.deltas);
        s.finish();
    }
    {
        auto k = r.child("check");
        k.get("quick", c.quick);
        k.get("only", c.only);
        k.finish();
    }
    {
        auto io = r.child("io");
        io.get("output", c.output);
        io.get("meta", c.meta);
        io.get("field_dump", c.field_dump);
        io.finish();
    }
    r.get("threads", c.threads);
    r.get("seed", c.seed);
    r.finish();
    if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
        throw ConfigError("unknown command '" + c.command + "' in config");
    }
    return c;
}

SweepRange parse_sweep_range(const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw ConfigError("a sweep is 'name=start:stop:step', got '" + spec + "'");
    SweepRange range;
    range.name = spec.substr(0, eq);
    const auto parts = split(spec.substr(eq + 1), ':');
    if (range.name.empty() || parts.size() != 3) {
        throw ConfigError("a sweep is 'name=start:stop:step', got '" + spec + "'");
    }
    const double start = parse_double(parts[0], "sweep start");
    const double stop = parse_double(parts[1], "sweep stop");
    const double step = parse_double(parts[2], "sweep step");
    if (step == 0.0 || (stop - start) * step < 0.0) throw ConfigError("sweep step does not move from start to stop");
    const double span = (stop - start) / step;
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-9));
    if (n > 100000) throw ConfigError("sweep has too many values");
    for (std::size_t k = 0; k <= n; ++k) range.values.push_back(start + static_cast<double>(k) * step);
    // Land exactly on an endpoint that the step reaches up to rounding.
    if (std::abs(span - std::round(span)) <= 1e-9) range.values.back() = stop;
    return range;
}

int parse_and_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    Pending pending;
    std::string config_path;
    CLI::App app{"fieldroad: field-road propagation, closed forms and numerical oracles", "fieldroad"};
    app.fallthrough();
    app.require_subcommand(0, 1);
    app.add_option("--config", config_path, "JSON run configuration");
    app.add_option("--threads", cfg.threads, "worker thread cap (0 = hardware)")->envname("FIELDROAD_THREADS");
    app.add_option("--seed", cfg.seed, "seed for randomized audits (default 0)");
    app.add_option("-o,--output", cfg.output, "CSV destination, '-' for stdout");
    app.add_option("--meta", cfg.meta, "metadata JSON destination");
    app.add_option("--save-config", pending.save_config, "write the resolved configuration as JSON");

    auto* eval = app.add_subcommand("eval", "phi*, s*, J, v and regime at points");
    add_params(eval, cfg);
    eval->add_option("--t", cfg.t, "time (default 1)");
    eval->add_option("--point", pending.points, "x,y (repeatable)");

    auto* contour = app.add_subcommand("contour", "level set of phi*(., ., t)");
    add_params(contour, cfg);
    contour->add_option("--t", cfg.t, "time (default 1)");
    contour->add_option("--level", cfg.level, "level (default 1)");
    contour->add_option("--grid", pending.grid, "x_min,x_max,y_min,y_max,nx,ny");
    contour->add_option("--placement", cfg.placement, "linear | exact");
    contour->add_option("--field-dump", cfg.field_dump, "also write the sampled field as x,y,value");

    auto* sweep = app.add_subcommand("sweep", "parameter sweep of level-1 contours");
    sweep->add_option("--fixed", cfg.fixed, "fixed parameters, e.g. a=2,b=2");
    sweep->add_option("--vary", cfg.vary, "name=start:stop:step, both ends included");
    sweep->add_option("--level", cfg.level, "level (default 1)");
    sweep->add_option("--grid", pending.grid, "x_min,x_max,y_min,y_max,nx,ny");
    sweep->add_option("--placement", cfg.placement, "linear | exact");

    auto* path = app.add_subcommand("path", "optimal trajectory sampled in time");
    add_params(path, cfg);
    path->add_option("--t", cfg.t, "time (default 1)");
    path->add_option("--point", pending.points, "x,y");
    path->add_option("--samples", cfg.samples, "time samples (default 64)");

    auto* freidlin = app.add_subcommand("freidlin", "Freidlin condition at front points");
    add_params(freidlin, cfg);
    freidlin->add_option("--t", cfg.t, "time (default 1)");
    freidlin->add_option("--theta", pending.thetas, "ray angles from (ct, 0), comma separated");
    freidlin->add_option("--samples", cfg.samples, "samples along each path (default 64)");

    auto* cone = app.add_subcommand("cone", "two-road cone payoff");
    cone->add_option("--alpha", cfg.cone.alpha, "half opening angle (default pi/4)");
    cone->add_option("--a0", cfg.cone.road0.a, "Gamma_0 diffusivity");
    cone->add_option("--b0", cfg.cone.road0.b, "Gamma_0 drift");
    cone->add_option("--a1", cfg.cone.road_alpha.a, "Gamma_alpha diffusivity");
    cone->add_option("--b1", cfg.cone.road_alpha.b, "Gamma_alpha drift");
    cone->add_option("--t", cfg.t, "time (default 1)");
    cone->add_option("--point", pending.points, "x,y (repeatable)");
    cone->add_option("--r-max", cfg.r_max, "radius range of the admissibility check");
    cone->add_option("--condition-samples", cfg.condition_samples, "radii in the admissibility check");
    cone->add_flag("--override", cfg.override_unverified, "evaluate w_alpha even if the check fails");

    auto* hj = app.add_subcommand("hj", "grid solve of the obstacle problem");
    add_params(hj, cfg);
    hj->add_option("--grid", pending.grid, "x_min,x_max,y_min,y_max,nx,ny");
    hj->add_option("--cfl", cfg.hj.cfl, "CFL number (default 0.4)");
    hj->add_option("--t-end", cfg.hj.t_end, "final time (default 1)");
    hj->add_option("--k", cfg.hj.k_init, "initial steepness (default 50)");
    hj->add_option("--scheme", pending.scheme, "godunov | lax_friedrichs");
    hj->add_option("--collar", cfg.collar, "nodes excluded at truncation edges (default 5)");

    auto* kpp = app.add_subcommand("kpp", "eps-phase runs against the closed form");
    add_params(kpp, cfg);
    kpp->add_option("--eps", pending.eps, "eps values, comma separated");
    kpp->add_option("--grid", pending.grid, "x_min,x_max,y_min,y_max,nx,ny");
    kpp->add_option("--t-end", cfg.kpp.t_end, "final time (default 1)");
    kpp->add_option("--cfl", cfg.kpp.cfl, "CFL number (default 0.4)");
    kpp->add_option("--k", cfg.kpp.k_init, "initial steepness (default 50)");

    auto* strip = app.add_subcommand("strip", "thin-strip Wentzell residual");
    strip->add_option("--a", cfg.strip.a_target, "limit road diffusivity (default 2)");
    strip->add_option("--b", cfg.strip.b_target, "limit road drift (default 2)");
    strip->add_option("--delta", pending.deltas, "strip widths, comma separated");
    strip->add_option("--grid", pending.grid, "x_min,x_max,0,field_height,nx,field_rows");
    strip->add_option("--strip-rows", cfg.strip.strip_rows, "cells across the strip (default 8)");
    strip->add_option("--dt", cfg.strip.dt, "time step, 0 for 0.025 delta^2");
    strip->add_option("--t-end", cfg.strip.t_end, "final time (default 1)");
    strip->add_flag("--x-uniform", cfg.strip.x_uniform_initial, "initial data independent of x");

    auto* check = app.add_subcommand("check", "property suite, exit 2 on any failure");
    check->add_flag("--quick", cfg.quick, "reduced sizes");
    check->add_option("--only", pending.only, "criterion ids, comma separated");

    try {
        // The config file supplies the defaults that flags then override.
        for (std::size_t k = 0; k < args.size(); ++k) {
            if (args[k] == "--config" && k + 1 < args.size()) config_path = args[k + 1];
            if (args[k].rfind("--config=", 0) == 0) config_path = args[k].substr(9);
        }
        const bool from_file = !config_path.empty();
        bool file_names_command = false;
        if (from_file) {
            const std::string text = read_file(config_path);
            cfg = config_from_json(text);
            file_names_command = json::parse(text).contains("command");
        }
        const std::string file_command = cfg.command;

        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);

        const auto subs = app.get_subcommands();
        if (!subs.empty()) {
            const std::string chosen = subs.front()->get_name();
            if (file_names_command && file_command != chosen) {
                throw ConfigError("config command '" + file_command + "' conflicts with subcommand '" + chosen + "'");
            }
            cfg.command = chosen;
        } else if (!from_file) {
            throw ConfigError("no command given; run with --help for the list");
        }

        if (!pending.points.empty()) {
            cfg.points.clear();
            for (const auto& p : pending.points) cfg.points.push_back(parse_point(p));
        }
        if (!pending.grid.empty()) {
            const auto g = parse_grid(pending.grid);
            if (cfg.command == "hj") {
                cfg.hj.spec = g;
            } else if (cfg.command == "kpp") {
                cfg.kpp.spec = g;
            } else if (cfg.command == "strip") {
                cfg.strip.spec = g;
            } else {
                cfg.grid = g;
            }
        }
        if (!pending.thetas.empty()) cfg.thetas = parse_list(pending.thetas, "theta");
        if (!pending.eps.empty()) cfg.eps_values = parse_list(pending.eps, "eps");
        if (!pending.deltas.empty()) cfg.deltas = parse_list(pending.deltas, "delta");
        if (!pending.scheme.empty()) cfg.hj.scheme = scheme_from_string(pending.scheme);
        if (!pending.only.empty()) {
            cfg.only.clear();
            for (double v : parse_list(pending.only, "criterion id")) {
                cfg.only.push_back(static_cast<int>(parse_count(v, "criterion id")));
            }
        }
        if (!pending.save_config.empty()) {
            std::ofstream f(pending.save_config, std::ios::binary);
            if (!f) throw IoError("cannot open '" + pending.save_config + "' for writing");
            f << config_to_json(cfg) << '\n';
        }

        set_thread_cap(cfg.threads);
        const auto start = std::chrono::steady_clock::now();
        auto outcome = dispatch(cfg, out);
        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        emit_meta(cfg, outcome.results, wall);
        if (outcome.exit_code == 2) {
            error_line(err, "property_audit_failed",
                       "failing criteria: " + outcome.results["failed"].dump());
        }
        return outcome.exit_code;
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e, out, err);
        error_line(err, "usage_error", e.what());
        return 1;
    } catch (const Error& e) {
        error_line(err, e.kind(), e.what());
        return 1;
    } catch (const json::exception& e) {
        error_line(err, "config_error", e.what());
        return 1;
    }
}

}  // namespace fieldroad
