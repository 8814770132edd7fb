"""Python smoke tests for the fvirp bindings: mesh generation, a short
invariant-region run, model validation and report determinism."""

import sys

import fvirp


def check(name, cond):
    print(("PASS " if cond else "FAIL ") + name)
    return bool(cond)


def main():
    ok = True

    summary = fvirp.mesh_summary("random_quad", 12, seed=7)
    ok &= check("mesh cell count", summary["n_cells"] == 144)
    ok &= check("mesh area", abs(summary["total_area"] - 1.0) < 1e-12)
    tri = fvirp.mesh_summary("random_tri", 12, seed=7)
    ok &= check("triangulated cell count", tri["n_cells"] == 288)

    report = fvirp.validate_model({"experiment": "example3"})
    ok &= check("example3 validates", report["passed"])
    ok &= check("example3 class", report["class"] == "nonincreasing")

    cfg = {
        "experiment": "example4",
        "mesh_family": "random_quad",
        "levels": [8],
        "seed": 3,
        "dt": 1e-3,
        "T": 5e-3,
        "mode": "irp",
    }
    run = fvirp.run_irp(cfg)
    mode = run["modes"][0]
    ok &= check("irp run has steps", len(mode["run"]["steps"]) == 5)
    ok &= check("u stays in [0,1]", -1e-9 <= mode["u_min"] and mode["u_max"] <= 1 + 1e-9)
    ok &= check("v stays in [0,2]", -1e-9 <= mode["v_min"] and mode["v_max"] <= 2 + 1e-9)
    iters = run["modes"][0]["run"]["iterates"]
    ok &= check(
        "every iterate in the box",
        -1e-9 <= iters["u_min"]
        and iters["u_max"] <= 1 + 1e-9
        and -1e-9 <= iters["v_min"]
        and iters["v_max"] <= 2 + 1e-9,
    )

    rerun = fvirp.run_irp(cfg)
    ok &= check("reports are deterministic", run == rerun)

    conv = fvirp.run_convergence(
        {
            "experiment": "example1",
            "mesh_family": "random_quad",
            "levels": [6],
            "seed": 2,
            "dt": 1e-3,
            "T": 2e-3,
        }
    )
    ok &= check("convergence errors present", conv["levels"][0]["eps2_u"] > 0)

    try:
        fvirp.run_irp({"experiment": "example4", "dt": -1})
        ok &= check("bad config raises", False)
    except fvirp.FvirpConfigError:
        ok &= check("bad config raises", True)

    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
