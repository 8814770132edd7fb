#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "fvirp/errors.hpp"
#include "fvirp/models.hpp"
#include "fvirp/runner.hpp"

#include <nlohmann/json.hpp>

namespace py = pybind11;
using namespace fvirp;

namespace {

std::string validate_model_json(const std::string& config_json) {
    const ExperimentConfig cfg = ExperimentConfig::from_json_text(config_json);
    const ReactionModel model = cfg.custom_model_json.empty()
                                    ? builtin_model(cfg.experiment)
                                    : model_from_json_text(cfg.custom_model_json);
    const ValidationReport rep = validate(model);
    nlohmann::json j;
    j["model"] = model.name;
    j["class"] = to_string(model.qclass);
    j["lambda"] = model.lambda;
    j["passed"] = rep.passed;
    j["sampled_max_quotient"] = rep.sampled_max_quotient;
    j["violations"] = rep.violations;
    return j.dump(2);
}

py::dict mesh_summary(const std::string& family, int n, std::uint64_t seed, double amplitude) {
    Mesh mesh = build_uniform_quad(n);
    const MeshFamily fam = mesh_family_from_string(family);
    if (fam != MeshFamily::UniformQuad && amplitude > 0.0)
        mesh = perturb_random(mesh, amplitude, seed);
    if (fam == MeshFamily::RandomTri) mesh = triangulate(mesh, seed);
    py::dict d;
    d["n_cells"] = mesh.n_cells();
    d["n_vertices"] = mesh.n_vertices();
    d["n_boundary_edges"] = mesh.n_boundary_edges();
    d["total_area"] = mesh.total_area();
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Invariant-region-preserving finite volume solver for two-species "
              "reaction-diffusion systems on distorted polygonal meshes";

    m.def(
        "run_convergence",
        [](const std::string& config_json) {
            return run_convergence(ExperimentConfig::from_json_text(config_json)).json;
        },
        py::arg("config_json"),
        "Refinement sweep; returns the convergence report as a JSON string.");

    m.def(
        "run_irp",
        [](const std::string& config_json) {
            return run_irp(ExperimentConfig::from_json_text(config_json)).json;
        },
        py::arg("config_json"),
        "Invariant-region experiment; returns the report as a JSON string.");

    m.def("validate_model", &validate_model_json, py::arg("config_json"),
          "Model validation report as a JSON string.");

    m.def("mesh_summary", &mesh_summary, py::arg("family"), py::arg("n"), py::arg("seed") = 1,
          py::arg("amplitude") = 0.3, "Generate a mesh and return its basic statistics.");

    m.def(
        "write_mesh_vtk",
        [](const std::string& family, int n, std::uint64_t seed, double amplitude,
           const std::string& path) {
            Mesh mesh = build_uniform_quad(n);
            const MeshFamily fam = mesh_family_from_string(family);
            if (fam != MeshFamily::UniformQuad && amplitude > 0.0)
                mesh = perturb_random(mesh, amplitude, seed);
            if (fam == MeshFamily::RandomTri) mesh = triangulate(mesh, seed);
            write_vtk(mesh, path);
        },
        py::arg("family"), py::arg("n"), py::arg("seed"), py::arg("amplitude"), py::arg("path"),
        "Generate a mesh and write it in legacy VTK ASCII format.");

    py::register_exception<ConfigError>(m, "FvirpConfigError");
    py::register_exception<ModelValidationError>(m, "FvirpValidationError");
    py::register_exception<SolverError>(m, "FvirpSolverError");
}
