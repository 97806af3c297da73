#pragma once

#include "qflow/flows.hpp"
#include "qflow/geometry.hpp"
#include "qflow/harmonics.hpp"
#include "qflow/spheregrid.hpp"

#include "json.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace qflow::io {

using nlohmann::json;

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

namespace detail {

inline void require_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed)
{
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& item : obj.items()) {
        if (!allowed.count(item.key()))
            throw ConfigError(where + ": unknown key \"" + item.key() + "\"");
    }
}

template <typename T>
T field(const json& obj, const std::string& where, const std::string& key)
{
    if (!obj.contains(key)) throw ConfigError(where + ": missing required key \"" + key + "\"");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

template <typename T>
T field_or(const json& obj, const std::string& where, const std::string& key, T fallback)
{
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + "." + key + ": wrong type");
    }
}

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

struct HarmonicTerm {
    int l = 0;
    int m = 0;
    double amplitude = 0.0;
};

struct ShapeSpec {
    enum class Type { harmonic, spheroid, random_band, translated_ball };
    Type type = Type::harmonic;
    std::vector<HarmonicTerm> harmonic;
    double spheroid_a = 1.0;
    double spheroid_c = 1.0;
    int band_l_min = 2;
    int band_l_max = 4;
    double band_target_c2 = 0.05;
    std::array<double, 3> ball_center{0.0, 0.0, 0.0};
    bool symmetrize = false;
};

enum class RunMode { flow, analyze, verify };

struct RunConfig {
    RunMode mode = RunMode::analyze;
    flows::FlowConfig flow;
    ShapeSpec shape;
    int n_lat = 64;
    int n_lon = 128;
    std::string output_dir = "out";
    bool emit_svg = false;
    std::uint64_t seed = 0;
};

[[nodiscard]] inline ShapeSpec parse_shape(const json& j)
{
    detail::require_keys(j, "shape",
                         {"type", "harmonic", "spheroid", "random_band", "translated_ball",
                          "symmetrize"});
    ShapeSpec s;
    const std::string type = detail::field<std::string>(j, "shape", "type");
    s.symmetrize = detail::field_or<bool>(j, "shape", "symmetrize", false);
    if (type == "harmonic") {
        s.type = ShapeSpec::Type::harmonic;
        const json terms = detail::field<json>(j, "shape", "harmonic");
        if (!terms.is_array() || terms.empty())
            throw ConfigError("shape.harmonic: expected a nonempty array");
        for (const auto& t : terms) {
            detail::require_keys(t, "shape.harmonic[]", {"l", "m", "amplitude"});
            HarmonicTerm term;
            term.l = detail::field<int>(t, "shape.harmonic[]", "l");
            term.m = detail::field<int>(t, "shape.harmonic[]", "m");
            term.amplitude = detail::field<double>(t, "shape.harmonic[]", "amplitude");
            if (term.l < 0 || std::abs(term.m) > term.l)
                throw ConfigError("shape.harmonic[]: need l >= 0 and |m| <= l");
            s.harmonic.push_back(term);
        }
    } else if (type == "spheroid") {
        s.type = ShapeSpec::Type::spheroid;
        const json sp = detail::field<json>(j, "shape", "spheroid");
        detail::require_keys(sp, "shape.spheroid", {"a", "c"});
        s.spheroid_a = detail::field<double>(sp, "shape.spheroid", "a");
        s.spheroid_c = detail::field<double>(sp, "shape.spheroid", "c");
        if (!(s.spheroid_a > 0.0) || !(s.spheroid_c > 0.0))
            throw ConfigError("shape.spheroid: semi-axes must be positive");
    } else if (type == "random_band") {
        s.type = ShapeSpec::Type::random_band;
        const json b = detail::field<json>(j, "shape", "random_band");
        detail::require_keys(b, "shape.random_band", {"l_min", "l_max", "target_c2"});
        s.band_l_min = detail::field<int>(b, "shape.random_band", "l_min");
        s.band_l_max = detail::field<int>(b, "shape.random_band", "l_max");
        s.band_target_c2 = detail::field<double>(b, "shape.random_band", "target_c2");
        if (s.band_l_min < 1 || s.band_l_max < s.band_l_min)
            throw ConfigError("shape.random_band: need 1 <= l_min <= l_max");
        if (!(s.band_target_c2 > 0.0))
            throw ConfigError("shape.random_band: target_c2 must be positive");
    } else if (type == "translated_ball") {
        s.type = ShapeSpec::Type::translated_ball;
        const json b = detail::field<json>(j, "shape", "translated_ball");
        detail::require_keys(b, "shape.translated_ball", {"center"});
        const auto center = detail::field<std::vector<double>>(b, "shape.translated_ball", "center");
        if (center.size() != 3) throw ConfigError("shape.translated_ball.center: expected 3 numbers");
        std::copy(center.begin(), center.end(), s.ball_center.begin());
        const double norm = std::sqrt(center[0] * center[0] + center[1] * center[1] +
                                      center[2] * center[2]);
        if (norm >= 1.0) throw ConfigError("shape.translated_ball: |center| must be < 1");
    } else {
        throw ConfigError("shape.type: unknown value \"" + type + "\"");
    }
    return s;
}

[[nodiscard]] inline flows::FlowConfig parse_flow(const json& j)
{
    detail::require_keys(j, "flow",
                         {"kind", "n", "k", "alpha", "t_end", "dt_init", "dt_max", "cfl_safety",
                          "symmetrize", "diag_stride", "barycenter_K", "pinching_cp",
                          "initial_c2_gate"});
    flows::FlowConfig f;
    const std::string kind = detail::field<std::string>(j, "flow", "kind");
    if (kind == "inverse")
        f.kind = flows::FlowKind::inverse;
    else if (kind == "volume_preserving")
        f.kind = flows::FlowKind::volume_preserving;
    else
        throw ConfigError("flow.kind: unknown value \"" + kind + "\"");
    f.dim = detail::field_or<int>(j, "flow", "n", 2);
    f.k = detail::field<int>(j, "flow", "k");
    f.alpha = detail::field_or<double>(j, "flow", "alpha", 1.0);
    f.t_end = detail::field<double>(j, "flow", "t_end");
    f.dt_init = detail::field_or<double>(j, "flow", "dt_init", 0.0);
    f.dt_max = detail::field_or<double>(j, "flow", "dt_max", 0.05);
    f.cfl_safety = detail::field_or<double>(j, "flow", "cfl_safety", 0.85);
    f.symmetrize = detail::field_or<bool>(j, "flow", "symmetrize", false);
    f.diag_stride = detail::field_or<int>(j, "flow", "diag_stride", 25);
    f.barycenter_K = detail::field_or<double>(j, "flow", "barycenter_K", 1.0);
    f.pinching_cp = detail::field_or<double>(j, "flow", "pinching_cp", -1.0);
    f.initial_c2_gate = detail::field_or<double>(j, "flow", "initial_c2_gate", 0.3);
    flows::validate(f);
    return f;
}

[[nodiscard]] inline RunConfig parse_config(const json& j)
{
    detail::require_keys(j, "config",
                         {"mode", "flow", "shape", "grid", "output_dir", "emit_svg", "seed"});
    RunConfig cfg;
    const std::string mode = detail::field<std::string>(j, "config", "mode");
    if (mode == "flow")
        cfg.mode = RunMode::flow;
    else if (mode == "analyze")
        cfg.mode = RunMode::analyze;
    else if (mode == "verify")
        cfg.mode = RunMode::verify;
    else
        throw ConfigError("mode: unknown value \"" + mode + "\"");

    if (j.contains("grid")) {
        const json g = j.at("grid");
        detail::require_keys(g, "grid", {"n", "n_lat", "n_lon"});
        cfg.n_lat = detail::field_or<int>(g, "grid", "n_lat", 64);
        cfg.n_lon = detail::field_or<int>(g, "grid", "n_lon", 128);
    }
    cfg.output_dir = detail::field_or<std::string>(j, "config", "output_dir", "out");
    cfg.emit_svg = detail::field_or<bool>(j, "config", "emit_svg", false);
    cfg.seed = detail::field_or<std::uint64_t>(j, "config", "seed", 0);

    if (cfg.mode == RunMode::flow) {
        if (!j.contains("flow")) throw ConfigError("config: mode \"flow\" needs a flow block");
        cfg.flow = parse_flow(j.at("flow"));
    } else if (j.contains("flow")) {
        cfg.flow = parse_flow(j.at("flow"));
    }
    if (cfg.mode != RunMode::verify) {
        if (!j.contains("shape")) throw ConfigError("config: needs a shape block");
        cfg.shape = parse_shape(j.at("shape"));
    }
    const int dim = cfg.mode == RunMode::flow ? cfg.flow.dim : 2;
    if (dim == 2 && j.contains("grid")) {
        const int n = detail::field_or<int>(j.at("grid"), "grid", "n", 2);
        if (n != dim) throw ConfigError("grid.n: does not match flow.n");
    }
    return cfg;
}

[[nodiscard]] inline json to_json(const ShapeSpec& s)
{
    json j;
    j["symmetrize"] = s.symmetrize;
    switch (s.type) {
        case ShapeSpec::Type::harmonic: {
            j["type"] = "harmonic";
            json terms = json::array();
            for (const auto& t : s.harmonic)
                terms.push_back({{"l", t.l}, {"m", t.m}, {"amplitude", t.amplitude}});
            j["harmonic"] = terms;
            break;
        }
        case ShapeSpec::Type::spheroid:
            j["type"] = "spheroid";
            j["spheroid"] = {{"a", s.spheroid_a}, {"c", s.spheroid_c}};
            break;
        case ShapeSpec::Type::random_band:
            j["type"] = "random_band";
            j["random_band"] = {{"l_min", s.band_l_min},
                                {"l_max", s.band_l_max},
                                {"target_c2", s.band_target_c2}};
            break;
        case ShapeSpec::Type::translated_ball:
            j["type"] = "translated_ball";
            j["translated_ball"] = {
                {"center", {s.ball_center[0], s.ball_center[1], s.ball_center[2]}}};
            break;
    }
    return j;
}

[[nodiscard]] inline json to_json(const flows::FlowConfig& f)
{
    json j;
    j["kind"] = f.kind == flows::FlowKind::inverse ? "inverse" : "volume_preserving";
    j["n"] = f.dim;
    j["k"] = f.k;
    j["alpha"] = f.alpha;
    j["t_end"] = f.t_end;
    j["dt_init"] = f.dt_init;
    j["dt_max"] = f.dt_max;
    j["cfl_safety"] = f.cfl_safety;
    j["symmetrize"] = f.symmetrize;
    j["diag_stride"] = f.diag_stride;
    j["barycenter_K"] = f.barycenter_K;
    j["pinching_cp"] = f.pinching_cp;
    j["initial_c2_gate"] = f.initial_c2_gate;
    return j;
}

[[nodiscard]] inline json to_json(const RunConfig& cfg)
{
    json j;
    j["mode"] = cfg.mode == RunMode::flow ? "flow" : (cfg.mode == RunMode::analyze ? "analyze" : "verify");
    const int dim = cfg.mode == RunMode::flow ? cfg.flow.dim : 2;
    j["grid"] = {{"n", dim}, {"n_lat", cfg.n_lat}, {"n_lon", cfg.n_lon}};
    if (cfg.mode == RunMode::flow) j["flow"] = to_json(cfg.flow);
    if (cfg.mode != RunMode::verify) j["shape"] = to_json(cfg.shape);
    j["output_dir"] = cfg.output_dir;
    j["emit_svg"] = cfg.emit_svg;
    j["seed"] = cfg.seed;
    return j;
}

/// Instantiate a shape on a grid. Random shapes draw from the given seed.
[[nodiscard]] inline geometry::Hypersurface build_shape(const ShapeSpec& s, const grid::GridPtr& g,
                                                        std::uint64_t seed)
{
    grid::ScalarField u(g);
    switch (s.type) {
        case ShapeSpec::Type::harmonic: {
            for (const auto& term : s.harmonic) {
                if (g->dim == 2) {
                    for (int id = 0; id < g->node_count(); ++id)
                        u.values[static_cast<std::size_t>(id)] +=
                            term.amplitude *
                            harmonics::real_harmonic(term.l, term.m, g->node_theta(id), g->node_phi(id));
                } else {
                    for (int id = 0; id < g->node_count(); ++id)
                        u.values[static_cast<std::size_t>(id)] +=
                            term.amplitude *
                            harmonics::circle_harmonic(term.l, term.m >= 0 ? 1 : -1, g->node_theta(id));
                }
            }
            break;
        }
        case ShapeSpec::Type::spheroid: {
            for (int id = 0; id < g->node_count(); ++id) {
                const double t = g->node_theta(id);
                const double st = std::sin(t), ct = std::cos(t);
                const double radius =
                    1.0 / std::sqrt(st * st / (s.spheroid_a * s.spheroid_a) +
                                    ct * ct / (s.spheroid_c * s.spheroid_c));
                u.values[static_cast<std::size_t>(id)] = radius - 1.0;
            }
            break;
        }
        case ShapeSpec::Type::random_band: {
            std::mt19937_64 rng(seed);
            std::normal_distribution<double> dist(0.0, 1.0);
            harmonics::HarmonicSpectrum spec;
            spec.dim = g->dim;
            spec.l_max = s.band_l_max;
            spec.coeff.assign(static_cast<std::size_t>(spec.count()), 0.0);
            spec.for_each([&](int l, int m, double) {
                if (l < s.band_l_min || l > s.band_l_max) return;
                if (s.symmetrize && (l % 2 != 0 || m < 0 || m % 2 != 0)) return;
                spec.coeff[static_cast<std::size_t>(spec.index(l, m))] =
                    dist(rng) / (1.0 + spec.eigenvalue(l));
            });
            u = harmonics::synthesize(spec, g);
            const auto norms = grid::sup_norms(u);
            if (norms.c2 > 0.0) {
                const double scale = s.band_target_c2 / norms.c2;
                for (double& v : u.values) v *= scale;
            }
            break;
        }
        case ShapeSpec::Type::translated_ball: {
            const auto& c = s.ball_center;
            const double c2 = c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
            for (int id = 0; id < g->node_count(); ++id) {
                const auto& p = g->position[static_cast<std::size_t>(id)];
                const double beta = p[0] * c[0] + p[1] * c[1] + p[2] * c[2];
                u.values[static_cast<std::size_t>(id)] =
                    beta + std::sqrt(1.0 - c2 + beta * beta) - 1.0;
            }
            break;
        }
    }
    if (s.symmetrize) u = grid::symmetrized(u);
    return geometry::make_hypersurface(std::move(u));
}

inline const char* csv_header()
{
    return "t,I_k,I_km1,Vol,A,S,alpha,vp_ratio,bar_x,bar_y,bar_z,C0,C1,C2,cone_margin";
}

/// Write the diagnostics time series; missing values become empty cells.
inline void emit_csv(const std::vector<flows::DiagnosticsRow>& rows, const std::string& path)
{
    if (rows.empty()) throw std::domain_error("emit_csv: no rows");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_csv: cannot open " + path);
    out << csv_header() << "\n";
    const auto opt = [](const std::optional<double>& v) {
        return v ? detail::format_double(*v) : std::string();
    };
    for (const auto& r : rows) {
        out << detail::format_double(r.t) << ',' << detail::format_double(r.quermass_k) << ','
            << detail::format_double(r.quermass_km1) << ',' << detail::format_double(r.volume)
            << ',' << opt(r.a_functional) << ',' << opt(r.stability_ratio) << ','
            << detail::format_double(r.alpha_fraenkel) << ',' << opt(r.vp_ratio) << ','
            << detail::format_double(r.bar[0]) << ',' << detail::format_double(r.bar[1]) << ','
            << detail::format_double(r.bar[2]) << ',' << detail::format_double(r.c0) << ','
            << detail::format_double(r.c1) << ',' << detail::format_double(r.c2) << ','
            << detail::format_double(r.cone_margin) << "\n";
    }
    if (!out) throw std::runtime_error("emit_csv: write failed for " + path);
}

namespace detail {

struct Series {
    std::string name;
    std::vector<double> t;
    std::vector<double> value;
};

inline double column_value(const flows::DiagnosticsRow& r, const std::string& name, bool& ok)
{
    ok = true;
    if (name == "I_k") return r.quermass_k;
    if (name == "I_km1") return r.quermass_km1;
    if (name == "Vol") return r.volume;
    if (name == "A") {
        ok = r.a_functional.has_value();
        return ok ? *r.a_functional : 0.0;
    }
    if (name == "S") {
        ok = r.stability_ratio.has_value();
        return ok ? *r.stability_ratio : 0.0;
    }
    if (name == "alpha") return r.alpha_fraenkel;
    if (name == "vp_ratio") {
        ok = r.vp_ratio.has_value();
        return ok ? *r.vp_ratio : 0.0;
    }
    if (name == "bar_x") return r.bar[0];
    if (name == "bar_y") return r.bar[1];
    if (name == "bar_z") return r.bar[2];
    if (name == "C0") return r.c0;
    if (name == "C1") return r.c1;
    if (name == "C2") return r.c2;
    if (name == "cone_margin") return r.cone_margin;
    throw std::domain_error("emit_svg: unknown column \"" + name + "\"");
}

}  // namespace detail

/// Minimal multi-series line plot. With log_scale, values are plotted as
/// log10 and nonpositive samples are dropped.
inline void emit_svg(const std::vector<flows::DiagnosticsRow>& rows,
                     const std::vector<std::string>& columns, const std::string& path,
                     bool log_scale = false)
{
    if (rows.empty()) throw std::domain_error("emit_svg: no rows");
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    std::vector<detail::Series> series;
    for (const auto& name : columns) {
        detail::Series s;
        s.name = name;
        for (const auto& r : rows) {
            bool ok = false;
            const double v = detail::column_value(r, name, ok);
            if (!ok) continue;
            if (log_scale && !(v > 0.0)) continue;
            s.t.push_back(r.t);
            s.value.push_back(log_scale ? std::log10(v) : v);
        }
        if (!s.t.empty()) series.push_back(std::move(s));
    }
    if (series.empty()) throw std::domain_error("emit_svg: no drawable samples");

    double t_lo = 1e300, t_hi = -1e300, v_lo = 1e300, v_hi = -1e300;
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.t.size(); ++i) {
            t_lo = std::min(t_lo, s.t[i]);
            t_hi = std::max(t_hi, s.t[i]);
            v_lo = std::min(v_lo, s.value[i]);
            v_hi = std::max(v_hi, s.value[i]);
        }
    }
    if (t_hi <= t_lo) t_hi = t_lo + 1.0;
    if (v_hi <= v_lo) v_hi = v_lo + 1.0;

    const double width = 960, height = 540, ml = 70, mr = 20, mt = 20, mb = 45;
    const auto x_of = [&](double t) { return ml + (t - t_lo) / (t_hi - t_lo) * (width - ml - mr); };
    const auto y_of = [&](double v) {
        return height - mb - (v - v_lo) / (v_hi - v_lo) * (height - mt - mb);
    };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << width << " " << height
        << "\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << height - mb << "\" x2=\"" << width - mr
        << "\" y2=\"" << height - mb << "\" stroke=\"black\"/>\n";
    svg << "<line x1=\"" << ml << "\" y1=\"" << mt << "\" x2=\"" << ml << "\" y2=\""
        << height - mb << "\" stroke=\"black\"/>\n";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "t in [%.3g, %.3g]", t_lo, t_hi);
    svg << "<text x=\"" << (width / 2) << "\" y=\"" << height - 10
        << "\" font-size=\"14\" text-anchor=\"middle\">" << buf << "</text>\n";
    std::snprintf(buf, sizeof(buf), "%s[%.3g, %.3g]", log_scale ? "log10 " : "", v_lo, v_hi);
    svg << "<text x=\"18\" y=\"" << (height / 2)
        << "\" font-size=\"14\" transform=\"rotate(-90 18 " << (height / 2) << ")\" "
        << "text-anchor=\"middle\">" << buf << "</text>\n";

    // cap the emitted points per series to keep files small
    const std::size_t max_points = 400;
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const std::size_t stride = std::max<std::size_t>(1, s.t.size() / max_points);
        svg << "<polyline fill=\"none\" stroke=\"" << palette[si % 10]
            << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.t.size(); i += stride) {
            std::snprintf(buf, sizeof(buf), "%.1f,%.1f ", x_of(s.t[i]), y_of(s.value[i]));
            svg << buf;
        }
        const std::size_t last = s.t.size() - 1;
        std::snprintf(buf, sizeof(buf), "%.1f,%.1f", x_of(s.t[last]), y_of(s.value[last]));
        svg << buf << "\"/>\n";
        svg << "<text x=\"" << width - mr - 150 << "\" y=\"" << mt + 18 * (si + 1)
            << "\" font-size=\"13\" fill=\"" << palette[si % 10] << "\">" << s.name << "</text>\n";
    }
    svg << "</svg>\n";

    std::ofstream out(path);
    if (!out) throw std::runtime_error("emit_svg: cannot open " + path);
    out << svg.str();
    if (!out) throw std::runtime_error("emit_svg: write failed for " + path);
}

[[nodiscard]] inline json to_json(const geometry::ShapeReport& rep)
{
    json j;
    for (int k = -1; k <= rep.dim; ++k) j["I_" + std::to_string(k)] = rep.quermass_at(k);
    j["bar"] = {rep.bar[0], rep.bar[1], rep.bar[2]};
    j["alpha"] = rep.alpha;
    for (const auto& d : rep.deficits)
        j["delta_" + std::to_string(d.k) + "_" + std::to_string(d.m)] = d.value;
    if (rep.a_functional) j["A"] = *rep.a_functional;
    j["C0"] = rep.norms.c0;
    j["C1"] = rep.norms.c1;
    j["C2"] = rep.norms.c2;
    return j;
}

[[nodiscard]] inline json to_json(const harmonics::HarmonicSpectrum& s)
{
    json j;
    j["dim"] = s.dim;
    j["l_max"] = s.l_max;
    json coeff = json::array();
    s.for_each([&](int l, int m, double a) { coeff.push_back({{"l", l}, {"m", m}, {"a", a}}); });
    j["coeff"] = coeff;
    return j;
}

[[nodiscard]] inline harmonics::HarmonicSpectrum spectrum_from_json(const json& j)
{
    detail::require_keys(j, "spectrum", {"dim", "l_max", "coeff"});
    harmonics::HarmonicSpectrum s;
    s.dim = detail::field<int>(j, "spectrum", "dim");
    s.l_max = detail::field<int>(j, "spectrum", "l_max");
    s.coeff.assign(static_cast<std::size_t>(s.count()), 0.0);
    for (const auto& c : j.at("coeff")) {
        const int l = detail::field<int>(c, "spectrum.coeff[]", "l");
        const int m = detail::field<int>(c, "spectrum.coeff[]", "m");
        s.coeff[static_cast<std::size_t>(s.index(l, m))] =
            detail::field<double>(c, "spectrum.coeff[]", "a");
    }
    return s;
}

}  // namespace qflow::io
