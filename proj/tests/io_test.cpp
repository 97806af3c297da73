#include <catch2/catch_amalgamated.hpp>

#include "qflow/flows.hpp"
#include "qflow/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace qflow;
namespace fs = std::filesystem;

namespace {

io::json sample_flow_config()
{
    return io::json::parse(R"({
      "mode": "flow",
      "grid": {"n": 2, "n_lat": 32, "n_lon": 64},
      "shape": {"type": "harmonic", "harmonic": [{"l": 2, "m": 0, "amplitude": 0.05}],
                "symmetrize": true},
      "flow": {"kind": "inverse", "n": 2, "k": 1, "t_end": 0.5, "diag_stride": 20,
               "symmetrize": true},
      "output_dir": "out",
      "emit_svg": false,
      "seed": 7
    })");
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("config: parse, round trip, unknown keys")
{
    const auto cfg = io::parse_config(sample_flow_config());
    CHECK(cfg.mode == io::RunMode::flow);
    CHECK(cfg.flow.k == 1);
    CHECK(cfg.flow.symmetrize);
    CHECK(cfg.n_lat == 32);
    CHECK(cfg.seed == 7);

    // round trip is field-for-field identical
    const auto again = io::parse_config(io::to_json(cfg));
    CHECK(io::to_json(again) == io::to_json(cfg));

    auto bad = sample_flow_config();
    bad["typo_key"] = 1;
    CHECK_THROWS_AS(io::parse_config(bad), io::ConfigError);

    auto bad2 = sample_flow_config();
    bad2["flow"]["cfl"] = 0.5;
    CHECK_THROWS_AS(io::parse_config(bad2), io::ConfigError);

    auto bad3 = sample_flow_config();
    bad3["flow"].erase("t_end");
    CHECK_THROWS_AS(io::parse_config(bad3), io::ConfigError);

    auto bad4 = sample_flow_config();
    bad4["shape"]["type"] = "blob";
    CHECK_THROWS_AS(io::parse_config(bad4), io::ConfigError);
}

TEST_CASE("build_shape: all types")
{
    const auto g = grid::build_grid(2, 32, 64);

    io::ShapeSpec ball;
    ball.type = io::ShapeSpec::Type::translated_ball;
    ball.ball_center = {0.0, 0.0, 0.2};
    const auto mb = io::build_shape(ball, g, 0);
    const double vol = geometry::quermass_integral(mb, -1);
    CHECK(vol == Catch::Approx(4.0 * M_PI / 3.0).epsilon(1e-10));

    io::ShapeSpec sph;
    sph.type = io::ShapeSpec::Type::spheroid;
    sph.spheroid_a = 1.0;
    sph.spheroid_c = 1.1;
    const auto ms = io::build_shape(sph, g, 0);
    CHECK(geometry::quermass_integral(ms, -1) ==
          Catch::Approx(4.0 * M_PI / 3.0 * 1.1).epsilon(1e-10));

    io::ShapeSpec band;
    band.type = io::ShapeSpec::Type::random_band;
    band.band_l_min = 2;
    band.band_l_max = 4;
    band.band_target_c2 = 0.05;
    band.symmetrize = true;
    const auto m1 = io::build_shape(band, g, 42);
    const auto m2 = io::build_shape(band, g, 42);
    const auto m3 = io::build_shape(band, g, 43);
    CHECK(grid::sup_norms(m1.u).c2 == Catch::Approx(0.05).epsilon(1e-10));
    bool identical = true, distinct = false;
    for (std::size_t i = 0; i < m1.u.values.size(); ++i) {
        identical = identical && m1.u.values[i] == m2.u.values[i];
        distinct = distinct || m1.u.values[i] != m3.u.values[i];
    }
    CHECK(identical);
    CHECK(distinct);
    // n-symmetric by construction
    CHECK(geometry::barycenter(m1).norm() <= 1e-12);
}

TEST_CASE("emit_csv: exact header, empty cells for missing values")
{
    flows::DiagnosticsRow row;
    row.t = 0.5;
    row.quermass_k = 1.0;
    row.quermass_km1 = 2.0;
    row.volume = 3.0;
    row.a_functional = 0.25;
    row.stability_ratio = std::nullopt;
    row.alpha_fraenkel = 0.01;
    row.vp_ratio = std::nullopt;

    const fs::path path = fs::temp_directory_path() / "qflow_csv_test.csv";
    io::emit_csv({row}, path.string());
    const std::string text = slurp(path);

    std::istringstream lines(text);
    std::string header, data, extra;
    std::getline(lines, header);
    std::getline(lines, data);
    CHECK(header == "t,I_k,I_km1,Vol,A,S,alpha,vp_ratio,bar_x,bar_y,bar_z,C0,C1,C2,cone_margin");
    CHECK_FALSE(std::getline(lines, extra));
    CHECK(data.find(",0.25,,0.01,,") != std::string::npos);  // A present, S and vp_ratio empty

    CHECK_THROWS_AS(io::emit_csv({}, path.string()), std::domain_error);
    fs::remove(path);
}

TEST_CASE("emit_svg: parses as a small file even for 1000 rows")
{
    std::vector<flows::DiagnosticsRow> rows(1000);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        rows[i].t = 0.01 * static_cast<double>(i);
        rows[i].quermass_k = 8.0 * M_PI * std::exp(-0.1 * rows[i].t);
        rows[i].quermass_km1 = 4.0 * M_PI;
        rows[i].volume = 4.0 * M_PI / 3.0;
        rows[i].c0 = std::exp(-rows[i].t);
        rows[i].c1 = 2.0 * std::exp(-rows[i].t);
        rows[i].c2 = 4.0 * std::exp(-rows[i].t);
        rows[i].stability_ratio = 1.0 + 0.01 * std::sin(rows[i].t);
        rows[i].alpha_fraenkel = 0.1 * std::exp(-rows[i].t);
    }
    const fs::path path = fs::temp_directory_path() / "qflow_svg_test.svg";
    io::emit_svg(rows, {"I_k", "I_km1", "Vol", "S", "alpha", "C0", "C1", "C2"}, path.string());
    const auto size = fs::file_size(path);
    CHECK(size > 1000);
    CHECK(size < 200 * 1024);
    const std::string text = slurp(path);
    CHECK(text.find("<svg") == 0);
    CHECK(text.rfind("</svg>") != std::string::npos);

    io::emit_svg(rows, {"C0", "C1", "C2"}, path.string(), /*log_scale=*/true);
    CHECK(fs::file_size(path) < 200 * 1024);
    fs::remove(path);
}

TEST_CASE("identical config and seed give a bit-identical CSV")
{
    const auto cfg = io::parse_config(sample_flow_config());
    const auto g = grid::build_grid(2, cfg.n_lat, cfg.n_lon);

    const auto run_once = [&](const fs::path& path) {
        const auto initial = io::build_shape(cfg.shape, g, cfg.seed);
        const auto result = flows::run(cfg.flow, initial);
        REQUIRE(result.completed);
        io::emit_csv(result.rows, path.string());
    };
    const fs::path p1 = fs::temp_directory_path() / "qflow_det_1.csv";
    const fs::path p2 = fs::temp_directory_path() / "qflow_det_2.csv";
    run_once(p1);
    run_once(p2);
    CHECK(slurp(p1) == slurp(p2));
    CHECK(slurp(p1).find("nan") == std::string::npos);
    fs::remove(p1);
    fs::remove(p2);
}

TEST_CASE("shape report and spectrum JSON")
{
    const auto g = grid::build_grid(2, 32, 64);
    io::ShapeSpec spec;
    spec.type = io::ShapeSpec::Type::harmonic;
    spec.harmonic = {{2, 0, 0.05}};
    const auto m = io::build_shape(spec, g, 0);
    const auto rep = geometry::shape_report(m);
    const auto j = io::to_json(rep);
    CHECK(j.contains("I_-1"));
    CHECK(j.contains("I_2"));
    CHECK(j.contains("delta_1_0"));
    CHECK(j.contains("delta_2_-1"));
    CHECK(j.contains("A"));
    CHECK(j.contains("alpha"));
    CHECK(j["C0"].get<double>() > 0.0);

    const auto s = harmonics::analyze(m.u, 4);
    const auto js = io::to_json(s);
    const auto back = io::spectrum_from_json(js);
    REQUIRE(back.coeff.size() == s.coeff.size());
    for (std::size_t i = 0; i < s.coeff.size(); ++i)
        REQUIRE(back.coeff[i] == Catch::Approx(s.coeff[i]).margin(1e-15));
    // ordering contract: l ascending, m from -l to l
    CHECK(js["coeff"][0]["l"] == 0);
    CHECK(js["coeff"][1]["l"] == 1);
    CHECK(js["coeff"][1]["m"] == -1);
    CHECK(js["coeff"][4]["l"] == 2);
    CHECK(js["coeff"][4]["m"] == -2);
}
