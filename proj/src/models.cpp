#include "fvirp/models.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fvirp/errors.hpp"
#include "fvirp/expr.hpp"
#include "fvirp/rng.hpp"

namespace fvirp {

namespace {

const double kPi = 3.14159265358979323846;

// div(kappa grad w) for kappa = R(theta) diag(ka, kb) R(theta)^T with
// spatially varying ka, kb. Derivative inputs: w_x, w_y, w_xx, w_xy, w_yy and
// ka/kb with their gradients at the evaluation point.
struct RotatedTensorTerms {
    double c, s;
    double ka, kb, ka_x, ka_y, kb_x, kb_y;

    double divergence(double wx, double wy, double wxx, double wxy, double wyy) const {
        const double k11 = c * c * ka + s * s * kb;
        const double k12 = c * s * (ka - kb);
        const double k22 = s * s * ka + c * c * kb;
        const double k11_x = c * c * ka_x + s * s * kb_x;
        const double k12_x = c * s * (ka_x - kb_x);
        const double k12_y = c * s * (ka_y - kb_y);
        const double k22_y = s * s * ka_y + c * c * kb_y;
        return k11 * wxx + 2.0 * k12 * wxy + k22 * wyy + (k11_x + k12_y) * wx +
               (k12_x + k22_y) * wy;
    }
};

} // namespace

std::string to_string(QuasimonotoneClass c) {
    switch (c) {
    case QuasimonotoneClass::Nondecreasing: return "nondecreasing";
    case QuasimonotoneClass::Nonincreasing: return "nonincreasing";
    case QuasimonotoneClass::MixedF1DecF2Inc: return "mixed_f1dec_f2inc";
    case QuasimonotoneClass::MixedF1IncF2Dec: return "mixed_f1inc_f2dec";
    }
    return "?";
}

QuasimonotoneClass quasimonotone_class_from_string(const std::string& s) {
    if (s == "nondecreasing") return QuasimonotoneClass::Nondecreasing;
    if (s == "nonincreasing") return QuasimonotoneClass::Nonincreasing;
    if (s == "mixed_f1dec_f2inc") return QuasimonotoneClass::MixedF1DecF2Inc;
    if (s == "mixed_f1inc_f2dec") return QuasimonotoneClass::MixedF1IncF2Dec;
    throw ConfigError("unknown quasimonotone class: " + s);
}

ReactionModel builtin_model(const std::string& name) {
    ReactionModel m;
    m.name = name;
    if (name == "example1") {
        m.f1 = [](double u, double v) { (void)v; return u * (1.0 - u) * (u - 0.1); };
        m.f2 = [](double u, double v) { return u - v; };
        m.qclass = QuasimonotoneClass::Nondecreasing;
        m.lambda = 1.0;
        m.sigma = {0.0, 1.0, -1.0, 1.0};
        m.has_exact = true;
        m.exact_u = [](const Vec2& p, double t, int) {
            return std::exp(-t) * std::sin(kPi * p.x) * std::sin(kPi * p.y);
        };
        m.exact_v = [](const Vec2& p, double t, int) {
            return std::exp(-t) * std::cos(kPi * p.x) * std::cos(kPi * p.y);
        };
        m.grad_u = [](const Vec2& p, double t, int) {
            const double e = std::exp(-t);
            return Vec2{kPi * e * std::cos(kPi * p.x) * std::sin(kPi * p.y),
                        kPi * e * std::sin(kPi * p.x) * std::cos(kPi * p.y)};
        };
        m.grad_v = [](const Vec2& p, double t, int) {
            const double e = std::exp(-t);
            return Vec2{-kPi * e * std::sin(kPi * p.x) * std::cos(kPi * p.y),
                        -kPi * e * std::cos(kPi * p.x) * std::sin(kPi * p.y)};
        };
        const auto f1 = m.f1;
        const auto f2 = m.f2;
        const auto eu = m.exact_u;
        const auto ev = m.exact_v;
        m.source1 = [f1, eu, ev](const Vec2& p, double t, int region) {
            const double e = std::exp(-t);
            const double sx = std::sin(kPi * p.x), cx = std::cos(kPi * p.x);
            const double sy = std::sin(kPi * p.y), cy = std::cos(kPi * p.y);
            const double u = e * sx * sy;
            const double ux = kPi * e * cx * sy, uy = kPi * e * sx * cy;
            const double uxx = -kPi * kPi * u, uyy = -kPi * kPi * u;
            const double uxy = kPi * kPi * e * cx * cy;
            const double th = 5.0 * kPi / 12.0;
            RotatedTensorTerms kt{std::cos(th),
                                  std::sin(th),
                                  1.0 + 2.0 * p.x * p.x + p.y * p.y,
                                  1.0 + p.x * p.x + 2.0 * p.y * p.y,
                                  4.0 * p.x,
                                  2.0 * p.y,
                                  2.0 * p.x,
                                  4.0 * p.y};
            return -u - kt.divergence(ux, uy, uxx, uxy, uyy) - f1(u, ev(p, t, region));
        };
        m.source2 = [f2, eu](const Vec2& p, double t, int region) {
            const double e = std::exp(-t);
            const double sx = std::sin(kPi * p.x), cx = std::cos(kPi * p.x);
            const double sy = std::sin(kPi * p.y), cy = std::cos(kPi * p.y);
            const double v = e * cx * cy;
            const double vx = -kPi * e * sx * cy, vy = -kPi * e * cx * sy;
            const double vxx = -kPi * kPi * v, vyy = -kPi * kPi * v;
            const double vxy = kPi * kPi * e * sx * sy;
            const double th = kPi / 3.0;
            RotatedTensorTerms kt{std::cos(th),
                                  std::sin(th),
                                  1.0 + p.x * p.x + 2.0 * p.y * p.y,
                                  1.0 + 2.0 * p.x * p.x + p.y * p.y,
                                  2.0 * p.x,
                                  4.0 * p.y,
                                  4.0 * p.x,
                                  2.0 * p.y};
            return -v - kt.divergence(vx, vy, vxx, vxy, vyy) - f2(eu(p, t, region), v);
        };
        const auto ex_u = m.exact_u;
        const auto ex_v = m.exact_v;
        m.g1 = [ex_u](const Vec2& p, double t) { return ex_u(p, t, 0); };
        m.g2 = [ex_v](const Vec2& p, double t) { return ex_v(p, t, 0); };
        m.u0 = [ex_u](const Vec2& p) { return ex_u(p, 0.0, 0); };
        m.v0 = [ex_v](const Vec2& p) { return ex_v(p, 0.0, 0); };
    } else if (name == "example2") {
        m.f1 = [](double u, double v) { return u * u - std::exp(v); };
        m.f2 = [](double u, double v) { return u * u * u - v; };
        m.qclass = QuasimonotoneClass::MixedF1DecF2Inc;
        m.lambda = 7.0;
        m.sigma = {-1.5, 0.18, -3.4, 0.8};
        m.has_exact = true;
        // Region 0: x <= 2/3 (kappa = 4I, amplitude 1); region 1: x > 2/3
        // (kappa = I, amplitude 4). On the interface the region tag decides
        // the one-sided branch.
        const auto amp = [](const Vec2& p, int region) {
            if (p.x < 2.0 / 3.0) return 1.0;
            if (p.x > 2.0 / 3.0) return 4.0;
            return region == 0 ? 1.0 : 4.0;
        };
        const auto diff = [](const Vec2& p, int region) {
            if (p.x < 2.0 / 3.0) return 4.0;
            if (p.x > 2.0 / 3.0) return 1.0;
            return region == 0 ? 4.0 : 1.0;
        };
        m.exact_u = [amp](const Vec2& p, double t, int region) {
            return amp(p, region) * std::exp(-t) * (p.x - 2.0 / 3.0) *
                   (p.x * p.x * p.x + p.y * p.y * p.y);
        };
        m.exact_v = [amp](const Vec2& p, double t, int region) {
            return amp(p, region) * std::exp(-t) * (p.x - 2.0 / 3.0) * (p.x * p.x - p.y * p.y);
        };
        m.grad_u = [amp](const Vec2& p, double t, int region) {
            const double c = amp(p, region) * std::exp(-t);
            const double cubic = p.x * p.x * p.x + p.y * p.y * p.y;
            return Vec2{c * (cubic + 3.0 * p.x * p.x * (p.x - 2.0 / 3.0)),
                        c * 3.0 * p.y * p.y * (p.x - 2.0 / 3.0)};
        };
        m.grad_v = [amp](const Vec2& p, double t, int region) {
            const double c = amp(p, region) * std::exp(-t);
            const double quad = p.x * p.x - p.y * p.y;
            return Vec2{c * (quad + 2.0 * p.x * (p.x - 2.0 / 3.0)),
                        c * (-2.0 * p.y * (p.x - 2.0 / 3.0))};
        };
        const auto f1 = m.f1;
        const auto f2 = m.f2;
        const auto eu = m.exact_u;
        const auto ev = m.exact_v;
        m.source1 = [amp, diff, f1, eu, ev](const Vec2& p, double t, int region) {
            const double u = eu(p, t, region);
            const double c = amp(p, region) * std::exp(-t);
            const double lap =
                c * (6.0 * p.x * p.x + 6.0 * p.x * (p.x - 2.0 / 3.0) + 6.0 * p.y * (p.x - 2.0 / 3.0));
            return -u - diff(p, region) * lap - f1(u, ev(p, t, region));
        };
        m.source2 = [amp, diff, f2, eu, ev](const Vec2& p, double t, int region) {
            const double v = ev(p, t, region);
            const double c = amp(p, region) * std::exp(-t);
            const double lap = c * (4.0 * p.x + 2.0 * (p.x - 2.0 / 3.0) - 2.0 * (p.x - 2.0 / 3.0));
            return -v - diff(p, region) * lap - f2(eu(p, t, region), v);
        };
        const auto ex_u = m.exact_u;
        const auto ex_v = m.exact_v;
        m.g1 = [ex_u](const Vec2& p, double t) { return ex_u(p, t, p.x <= 2.0 / 3.0 ? 0 : 1); };
        m.g2 = [ex_v](const Vec2& p, double t) { return ex_v(p, t, p.x <= 2.0 / 3.0 ? 0 : 1); };
        m.u0 = [ex_u](const Vec2& p) { return ex_u(p, 0.0, p.x <= 2.0 / 3.0 ? 0 : 1); };
        m.v0 = [ex_v](const Vec2& p) { return ex_v(p, 0.0, p.x <= 2.0 / 3.0 ? 0 : 1); };
    } else if (name == "example3") {
        m.f1 = [](double u, double v) { return (1.0 - u * u - v * v) * u; };
        m.f2 = [](double u, double v) { return (1.0 - u * u - v * v) * v; };
        m.qclass = QuasimonotoneClass::Nonincreasing;
        m.lambda = 5.0;
        m.sigma = {0.0, 1.0, 0.0, 1.0};
        const auto on_outer = [](const Vec2& p) {
            const double tol = 1e-9;
            return p.x < tol || p.x > 1.0 - tol || p.y < tol || p.y > 1.0 - tol;
        };
        m.g1 = [on_outer](const Vec2& p, double) { return on_outer(p) ? 1.0 : 0.0; };
        m.g2 = [on_outer](const Vec2& p, double) { return on_outer(p) ? 0.0 : 1.0; };
        const auto in_omega2 = [](const Vec2& p) {
            const double a = 2.0 / 9.0, b = 7.0 / 9.0;
            return p.x > a && p.x < b && p.y > a && p.y < b;
        };
        m.u0 = [in_omega2](const Vec2& p) { return in_omega2(p) ? 1.0 : 0.0; };
        m.v0 = [in_omega2](const Vec2& p) { return in_omega2(p) ? 0.0 : 1.0; };
    } else if (name == "example4") {
        const double a = 1.0, b = 2.0, c = 10.0;
        m.f1 = [a, b, c](double u, double v) { return u * (a - b * u - c * v); };
        m.f2 = [](double u, double v) { return -u * v; };
        m.qclass = QuasimonotoneClass::Nonincreasing;
        m.lambda = 35.0;
        m.sigma = {0.0, 1.0, 0.0, 2.0};
        const auto data1 = [](const Vec2& p) {
            const double s = 2.0 * p.x - p.y;
            if (s <= -1.0 / 16.0) return 0.0;
            if (s <= 1.0 / 16.0) return 8.0 * s + 0.5;
            return 1.0;
        };
        const auto data2 = [](const Vec2& p) {
            const double s = p.x + 2.0 * p.y;
            if (s <= 15.0 / 16.0) return 0.0;
            if (s <= 17.0 / 16.0) return 16.0 * s - 15.0;
            return 2.0;
        };
        m.g1 = [data1](const Vec2& p, double) { return data1(p); };
        m.g2 = [data2](const Vec2& p, double) { return data2(p); };
        m.u0 = data1;
        m.v0 = data2;
    } else {
        throw ConfigError("unknown builtin model: " + name);
    }
    return m;
}

std::pair<double, double> manufactured_source(const ReactionModel& model, const Vec2& p, double t,
                                              int region) {
    if (!model.has_exact)
        throw ConfigError("model '" + model.name + "' has no exact solution / sources");
    return {model.source1(p, t, region), model.source2(p, t, region)};
}

namespace {

struct Monotonicity {
    bool f1_nondecreasing_v; // required sign of d f1 / d v
    bool f2_nondecreasing_u;
};

Monotonicity expected_monotonicity(QuasimonotoneClass c) {
    switch (c) {
    case QuasimonotoneClass::Nondecreasing: return {true, true};
    case QuasimonotoneClass::Nonincreasing: return {false, false};
    case QuasimonotoneClass::MixedF1DecF2Inc: return {false, true};
    case QuasimonotoneClass::MixedF1IncF2Dec: return {true, false};
    }
    return {true, true};
}

} // namespace

ValidationReport validate(const ReactionModel& model, int samples_per_axis) {
    ValidationReport rep;
    const InvariantBox& s = model.sigma;
    if (!(s.max1 > s.m1) || !(s.max2 > s.m2)) {
        rep.violations.push_back("invariant box is empty");
        return rep;
    }
    const int n = std::max(samples_per_axis, 3);
    const double du = (s.max1 - s.m1) / (n - 1);
    const double dv = (s.max2 - s.m2) / (n - 1);
    const double scale =
        std::max({std::abs(s.m1), std::abs(s.max1), std::abs(s.m2), std::abs(s.max2), 1.0});
    const double zero_tol = 1e-12 * scale;

    // Monotonicity: finite-difference sign check of df1/dv and df2/du over a
    // sampled grid.
    const Monotonicity mono = expected_monotonicity(model.qclass);
    rep.monotonicity_ok = true;
    for (int i = 0; i < n && rep.monotonicity_ok; ++i)
        for (int j = 0; j + 1 < n; ++j) {
            const double u = s.m1 + i * du;
            const double v = s.m2 + j * dv;
            const double d1 = model.f1(u, v + dv) - model.f1(u, v);
            const double d2 = model.f2(s.m1 + j * du + du, s.m2 + i * dv) -
                              model.f2(s.m1 + j * du, s.m2 + i * dv);
            if (mono.f1_nondecreasing_v ? d1 < -zero_tol : d1 > zero_tol) {
                rep.monotonicity_ok = false;
                rep.violations.push_back("f1 monotonicity in v does not match class");
                break;
            }
            if (mono.f2_nondecreasing_u ? d2 < -zero_tol : d2 > zero_tol) {
                rep.monotonicity_ok = false;
                rep.violations.push_back("f2 monotonicity in u does not match class");
                break;
            }
        }

    // Corner conditions, by the Remark case matching the class.
    switch (model.qclass) {
    case QuasimonotoneClass::Nondecreasing:
        rep.corner_f1_low = model.f1(s.m1, s.m2);
        rep.corner_f1_high = model.f1(s.max1, s.max2);
        rep.corner_f2_low = model.f2(s.m1, s.m2);
        rep.corner_f2_high = model.f2(s.max1, s.max2);
        break;
    case QuasimonotoneClass::Nonincreasing:
        rep.corner_f1_low = model.f1(s.m1, s.max2);
        rep.corner_f1_high = model.f1(s.max1, s.m2);
        rep.corner_f2_low = model.f2(s.max1, s.m2);
        rep.corner_f2_high = model.f2(s.m1, s.max2);
        break;
    case QuasimonotoneClass::MixedF1DecF2Inc:
        rep.corner_f1_low = model.f1(s.m1, s.max2);
        rep.corner_f1_high = model.f1(s.max1, s.m2);
        rep.corner_f2_low = model.f2(s.m1, s.m2);
        rep.corner_f2_high = model.f2(s.max1, s.max2);
        break;
    case QuasimonotoneClass::MixedF1IncF2Dec:
        rep.corner_f1_low = model.f1(s.m1, s.m2);
        rep.corner_f1_high = model.f1(s.max1, s.max2);
        rep.corner_f2_low = model.f2(s.max1, s.m2);
        rep.corner_f2_high = model.f2(s.m1, s.max2);
        break;
    }
    rep.corners_ok = rep.corner_f1_low >= -zero_tol && rep.corner_f1_high <= zero_tol &&
                     rep.corner_f2_low >= -zero_tol && rep.corner_f2_high <= zero_tol;
    if (!rep.corners_ok) rep.violations.push_back("invariant-region corner conditions violated");

    // Sampled Lipschitz bound: directional quotients between adjacent grid
    // points must not exceed lambda.
    double max_q = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            const double u = s.m1 + i * du;
            const double v = s.m2 + j * dv;
            if (i + 1 < n) {
                max_q = std::max(max_q, std::abs(model.f1(u + du, v) - model.f1(u, v)) / du);
                max_q = std::max(max_q, std::abs(model.f2(u + du, v) - model.f2(u, v)) / du);
            }
            if (j + 1 < n) {
                max_q = std::max(max_q, std::abs(model.f1(u, v + dv) - model.f1(u, v)) / dv);
                max_q = std::max(max_q, std::abs(model.f2(u, v + dv) - model.f2(u, v)) / dv);
            }
        }
    rep.sampled_max_quotient = max_q;
    rep.lipschitz_ok = max_q <= model.lambda * (1.0 + 1e-6);
    if (!rep.lipschitz_ok) {
        std::ostringstream os;
        os << "sampled Lipschitz quotient " << max_q << " exceeds lambda = " << model.lambda;
        rep.violations.push_back(os.str());
    }

    rep.passed = rep.monotonicity_ok && rep.corners_ok && rep.lipschitz_ok;
    return rep;
}

void validate_or_throw(const ReactionModel& model) {
    const ValidationReport rep = validate(model);
    if (!rep.passed) {
        std::string msg = "model '" + model.name + "' failed validation:";
        for (const auto& v : rep.violations) msg += " " + v + ";";
        throw ModelValidationError(msg);
    }
}

ReactionModel model_from_json_text(const std::string& json_text) {
    nlohmann::json j = nlohmann::json::parse(json_text);
    ReactionModel m;
    m.name = j.value("name", "custom");
    const Expr f1 = Expr::parse(j.at("f1").get<std::string>());
    const Expr f2 = Expr::parse(j.at("f2").get<std::string>());
    m.f1 = [f1](double u, double v) { return f1.eval({u, v, 0, 0, 0}); };
    m.f2 = [f2](double u, double v) { return f2.eval({u, v, 0, 0, 0}); };
    m.qclass = quasimonotone_class_from_string(j.at("class").get<std::string>());
    m.lambda = j.at("lambda").get<double>();
    const auto& sig = j.at("sigma");
    m.sigma = {sig.at(0).get<double>(), sig.at(1).get<double>(), sig.at(2).get<double>(),
               sig.at(3).get<double>()};
    const Expr g1 = Expr::parse(j.at("g1").get<std::string>());
    const Expr g2 = Expr::parse(j.at("g2").get<std::string>());
    const Expr u0 = Expr::parse(j.at("u0").get<std::string>());
    const Expr v0 = Expr::parse(j.at("v0").get<std::string>());
    m.g1 = [g1](const Vec2& p, double t) { return g1.eval({0, 0, p.x, p.y, t}); };
    m.g2 = [g2](const Vec2& p, double t) { return g2.eval({0, 0, p.x, p.y, t}); };
    m.u0 = [u0](const Vec2& p) { return u0.eval({0, 0, p.x, p.y, 0}); };
    m.v0 = [v0](const Vec2& p) { return v0.eval({0, 0, p.x, p.y, 0}); };
    return m;
}

ReactionModel random_bilinear_model(QuasimonotoneClass qclass, std::uint64_t seed) {
    Pcg32 rng = substream(seed, "models/random-bilinear");
    const auto draw = [&rng]() { return rng.next_double(); };

    // f(u,v) = a + b u + c v + d u v on [0,1]^2. The class fixes the sign of
    // the cross derivative (c + d u for f1, b + d v for f2); the corner
    // conditions then pin one remaining coefficient.
    double a1, b1, c1, d1, a2, b2, c2, d2;
    const Monotonicity mono = expected_monotonicity(qclass);

    // f1: monotone in v with sign mono.f1_nondecreasing_v.
    if (mono.f1_nondecreasing_v) {
        c1 = draw();
        d1 = -c1 * draw(); // c1 + d1 >= 0
    } else {
        c1 = -draw();
        d1 = -c1 * draw(); // c1 + d1 <= 0
    }
    // f2: monotone in u with sign mono.f2_nondecreasing_u.
    if (mono.f2_nondecreasing_u) {
        b2 = draw();
        d2 = -b2 * draw();
    } else {
        b2 = -draw();
        d2 = -b2 * draw();
    }

    // Corner conditions per Remark case. The low corner fixes "a", the high
    // corner fixes the remaining linear coefficient.
    const bool f1_low_at_vmax = !mono.f1_nondecreasing_v; // low condition at (m1, M2) or (m1, m2)
    const bool f2_low_at_umax = !mono.f2_nondecreasing_u;
    // f1(m1=0, .) = a1 + c1 * v_corner >= 0
    a1 = draw() + std::max(0.0, -(f1_low_at_vmax ? c1 : 0.0));
    // f1(M1=1, v_hi) = a1 + b1 + c1 * v_hi <= 0, v_hi = m2 or M2 per case
    const double v_hi = f1_low_at_vmax ? 0.0 : 1.0;
    b1 = -(a1 + c1 * v_hi + d1 * v_hi) - draw();
    // f2(u_lo, m2=0) = a2 + b2 * u_lo >= 0
    a2 = draw() + std::max(0.0, -(f2_low_at_umax ? b2 : 0.0));
    // f2(u_hi, M2=1) = a2 + b2 u_hi + c2 + d2 u_hi <= 0
    const double u_hi = f2_low_at_umax ? 0.0 : 1.0;
    c2 = -(a2 + b2 * u_hi + d2 * u_hi) - draw();

    ReactionModel m;
    std::ostringstream os;
    os << "bilinear-" << to_string(qclass) << "-" << seed;
    m.name = os.str();
    m.f1 = [a1, b1, c1, d1](double u, double v) { return a1 + b1 * u + c1 * v + d1 * u * v; };
    m.f2 = [a2, b2, c2, d2](double u, double v) { return a2 + b2 * u + c2 * v + d2 * u * v; };
    m.qclass = qclass;
    m.sigma = {0.0, 1.0, 0.0, 1.0};
    // Exact Lipschitz bound of a bilinear function on the unit box.
    const double l1 = std::max(std::max(std::abs(b1), std::abs(b1 + d1)),
                               std::max(std::abs(c1), std::abs(c1 + d1)));
    const double l2 = std::max(std::max(std::abs(b2), std::abs(b2 + d2)),
                               std::max(std::abs(c2), std::abs(c2 + d2)));
    m.lambda = std::max(l1, l2) * (1.0 + 1e-9);

    const double mid_u = 0.5 + 0.35 * (draw() - 0.5);
    const double mid_v = 0.5 + 0.35 * (draw() - 0.5);
    m.u0 = [mid_u](const Vec2& p) {
        return mid_u + 0.3 * std::sin(2.0 * kPi * p.x) * std::sin(2.0 * kPi * p.y);
    };
    m.v0 = [mid_v](const Vec2& p) {
        return mid_v + 0.3 * std::cos(2.0 * kPi * p.x) * std::sin(kPi * p.y);
    };
    m.g1 = [mid_u](const Vec2& p, double t) {
        return mid_u + 0.3 * std::sin(2.0 * kPi * p.x) * std::sin(2.0 * kPi * p.y) *
                           std::exp(-0.5 * t);
    };
    m.g2 = [mid_v](const Vec2& p, double t) {
        return mid_v + 0.3 * std::cos(2.0 * kPi * p.x) * std::sin(kPi * p.y) * std::exp(-0.5 * t);
    };
    return m;
}

} // namespace fvirp
