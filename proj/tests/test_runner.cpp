#include <doctest.h>

#include <cmath>

#include "fvirp/errors.hpp"
#include "fvirp/runner.hpp"

using namespace fvirp;

TEST_CASE("config parsing with defaults and overrides") {
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(R"({
        "experiment": "example1",
        "mesh_family": "random_tri",
        "levels": [12, 24],
        "seed": 9,
        "dt": 5e-4,
        "T": 0.05,
        "mode": "both",
        "thresholds": {"eps0": 1e-9, "eps_non": 1e-7, "delta_lin": 1e-11}
    })");
    CHECK(cfg.experiment == "example1");
    CHECK(cfg.family == MeshFamily::RandomTri);
    CHECK(cfg.levels == std::vector<int>{12, 24});
    CHECK(cfg.seed == 9);
    CHECK(cfg.dt == 5e-4);
    CHECK(cfg.mode == RunMode::Both);
    CHECK(cfg.thresholds.eps0 == 1e-9);
    CHECK(cfg.thresholds.eps1 == 1e-10); // default kept
    CHECK(cfg.thresholds.eps_non == 1e-7);
    CHECK(cfg.delta_lin == 1e-11);

    CHECK_THROWS_AS(ExperimentConfig::from_json_text("{not json"), ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"experiment":"e","dt":-1})"),
                    ConfigError);
    CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"experiment":"e","levels":[]})"),
                    ConfigError);
}

TEST_CASE("level building pins interfaces and assigns regions") {
    ExperimentConfig cfg;
    cfg.experiment = "example2";
    cfg.levels = {12};
    cfg.seed = 3;
    const DiscreteProblem prob = build_level(cfg, 12);
    const Mesh& m = prob.mesh;
    // Interface vertices at x = 2/3 are pinned to the line.
    int on_line = 0;
    for (const Vec2& v : m.vertices)
        if (std::abs(v.x - 2.0 / 3.0) < 1e-12) ++on_line;
    CHECK(on_line == 13);
    // Regions split by cell center.
    for (int c = 0; c < m.n_cells(); ++c)
        CHECK(m.cell_region[c] == (m.cell_centers[c].x <= 2.0 / 3.0 ? 0 : 1));
}

TEST_CASE("example 3 level has the hole and the tensor regions") {
    ExperimentConfig cfg;
    cfg.experiment = "example3";
    cfg.levels = {9};
    cfg.seed = 5;
    const DiscreteProblem prob = build_level(cfg, 9);
    CHECK(prob.mesh.n_cells() == 80);
    int region1 = 0;
    for (const int r : prob.mesh.cell_region) region1 += r;
    CHECK(region1 == 24); // 5x5 block of Omega_2 minus the hole cell
}

TEST_CASE("single-level convergence table has errors but no orders") {
    ExperimentConfig cfg;
    cfg.experiment = "example1";
    cfg.levels = {6};
    cfg.dt = 1e-3;
    cfg.T = 2e-3;
    cfg.seed = 7;
    const ConvergenceResult res = run_convergence(cfg);
    REQUIRE(res.levels.size() == 1);
    CHECK(res.levels[0].eps2_u > 0.0);
    CHECK(std::isfinite(res.levels[0].epsF_v));
    CHECK(res.order_eps2_u.empty());
}

TEST_CASE("single-step irp run produces a one-row report") {
    ExperimentConfig cfg;
    cfg.experiment = "example4";
    cfg.levels = {6};
    cfg.dt = 1e-3;
    cfg.T = 1e-3; // T = dt
    cfg.seed = 8;
    cfg.mode = RunMode::Irp;
    const IrpResult res = run_irp(cfg);
    REQUIRE(res.modes.size() == 1);
    CHECK(res.modes[0].run.steps.size() == 1);
    CHECK(res.modes[0].stats.overshoot_u == 0);
    CHECK(res.modes[0].stats.undershoot_u == 0);
}

TEST_CASE("irp runs refuse invalid models") {
    ExperimentConfig cfg;
    cfg.custom_model_json = R"({
        "name": "bad",
        "f1": "u + v",
        "f2": "u - v",
        "class": "nonincreasing",
        "lambda": 2,
        "sigma": [0, 1, 0, 1],
        "g1": "0", "g2": "0", "u0": "0", "v0": "0"
    })"; // f1 is increasing in v: wrong class
    cfg.custom_tensor_json = R"({"regions": [[1, 0, 1]]})";
    cfg.levels = {4};
    cfg.dt = 1e-2;
    cfg.T = 1e-2;
    CHECK_THROWS_AS(run_irp(cfg), ModelValidationError);
}

TEST_CASE("irp reports are byte-identical across reruns") {
    ExperimentConfig cfg;
    cfg.experiment = "example3";
    cfg.levels = {9};
    cfg.dt = 1e-3;
    cfg.T = 3e-3;
    cfg.seed = 10;
    const IrpResult a = run_irp(cfg);
    const IrpResult b = run_irp(cfg);
    CHECK(a.json == b.json);
    CHECK(a.csv == b.csv);
}

TEST_CASE("mesh family strings") {
    CHECK(mesh_family_from_string("uniform_quad") == MeshFamily::UniformQuad);
    CHECK_THROWS_AS(mesh_family_from_string("hex"), ConfigError);
    CHECK(run_mode_from_string("nine_point") == RunMode::NinePoint);
    CHECK_THROWS_AS(run_mode_from_string("fast"), ConfigError);
}
