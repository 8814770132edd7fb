#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fvirp/geom.hpp"

namespace fvirp {

enum class QuasimonotoneClass : std::uint8_t {
    Nondecreasing,
    Nonincreasing,
    MixedF1DecF2Inc, // f1 nonincreasing in v, f2 nondecreasing in u
    MixedF1IncF2Dec,
};

std::string to_string(QuasimonotoneClass c);
QuasimonotoneClass quasimonotone_class_from_string(const std::string& s);

struct InvariantBox {
    double m1 = 0.0;
    double max1 = 1.0;
    double m2 = 0.0;
    double max2 = 1.0;
};

// Two-species reaction system with quasimonotone classification, Lipschitz
// constant over Sigma, initial/boundary data and (optionally) an exact
// solution with its manufactured sources.
struct ReactionModel {
    std::string name;
    std::function<double(double u, double v)> f1;
    std::function<double(double u, double v)> f2;
    QuasimonotoneClass qclass = QuasimonotoneClass::Nondecreasing;
    double lambda = 1.0;
    InvariantBox sigma;

    std::function<double(const Vec2&, double t)> g1;
    std::function<double(const Vec2&, double t)> g2;
    std::function<double(const Vec2&)> u0;
    std::function<double(const Vec2&)> v0;

    bool has_exact = false;
    std::function<double(const Vec2&, double t, int region)> exact_u;
    std::function<double(const Vec2&, double t, int region)> exact_v;
    std::function<Vec2(const Vec2&, double t, int region)> grad_u;
    std::function<Vec2(const Vec2&, double t, int region)> grad_v;
    std::function<double(const Vec2&, double t, int region)> source1;
    std::function<double(const Vec2&, double t, int region)> source2;
};

// name in {example1, example2, example3, example4}
ReactionModel builtin_model(const std::string& name);

std::pair<double, double> manufactured_source(const ReactionModel& model, const Vec2& p, double t,
                                              int region = 0);

struct ValidationReport {
    bool passed = false;
    bool monotonicity_ok = false;
    bool corners_ok = false;
    bool lipschitz_ok = false;
    double corner_f1_low = 0.0;  // the value required to be >= 0
    double corner_f1_high = 0.0; // the value required to be <= 0
    double corner_f2_low = 0.0;
    double corner_f2_high = 0.0;
    double sampled_max_quotient = 0.0;
    std::vector<std::string> violations;
};

// Dense-sampling validation of the model's quasimonotone class, the
// invariant-region corner conditions and the Lipschitz bound over Sigma.
ValidationReport validate(const ReactionModel& model, int samples_per_axis = 101);

// As validate(), but throws ModelValidationError when any check fails.
void validate_or_throw(const ReactionModel& model);

// Model from the JSON schema {f1, f2, class, lambda, sigma, g1, g2, u0, v0}
// with expression strings over u, v, x, y, t.
ReactionModel model_from_json_text(const std::string& json_text);

// Random bilinear quasimonotone model on Sigma = [0,1]^2 satisfying the
// corner conditions by construction; lambda is the exact Lipschitz bound.
ReactionModel random_bilinear_model(QuasimonotoneClass qclass, std::uint64_t seed);

} // namespace fvirp
