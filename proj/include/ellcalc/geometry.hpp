#pragma once

// Chart geometry for the ellipsoid family x^2 + y^2 + a^2 z^2 = a^2 rho^2.
//
// Chart map: Phi(rho, phi, theta) = (a rho sin(phi) cos(theta),
//                                    a rho sin(phi) sin(theta),
//                                    rho cos(phi)),
// with rho > 0, phi in (0, pi), theta in (-pi, pi). The surface of interest is
// the rho = 1 level set. All symbolic objects keep `a` as a variable, so one
// expression tree serves every half-axis value; numeric a enters at evaluation.

#include <array>
#include <optional>

#include "expr.hpp"

namespace ellcalc {

struct Metric3 {
    // symmetric, indices ordered (rho, phi, theta)
    Expr rr, rp, rt, pp, pt, tt;

    Expr at(int i, int j) const {
        if (i > j) std::swap(i, j);
        if (i == 0 && j == 0) return rr;
        if (i == 0 && j == 1) return rp;
        if (i == 0 && j == 2) return rt;
        if (i == 1 && j == 1) return pp;
        if (i == 1 && j == 2) return pt;
        return tt;
    }
};

struct Metric2 {
    // surface metric at rho = 1, indices ordered (phi, theta)
    Expr pp, pt, tt;

    Expr at(int i, int j) const {
        if (i > j) std::swap(i, j);
        if (i == 0 && j == 0) return pp;
        if (i == 0 && j == 1) return pt;
        return tt;
    }
};

// Contravariant components of an ambient vector field:
// v = v_rho * d/drho + v_phi_comp * d/dphi + v_theta_comp * d/dtheta.
struct VectorField3 {
    Expr v_rho, v_phi_comp, v_theta_comp;

    Expr comp(int i) const { return i == 0 ? v_rho : (i == 1 ? v_phi_comp : v_theta_comp); }
};

namespace geo {

inline Expr sym_a() { return variable(Var::a); }
inline Expr sym_rho() { return variable(Var::rho); }
inline Expr sym_phi() { return variable(Var::phi); }
inline Expr sym_theta() { return variable(Var::theta); }

// lambda^2 = a^2 cos^2(phi) + sin^2(phi)
inline Expr lambda_sq() {
    static const Expr e = pow_int(sym_a(), 2) * pow_int(cos(sym_phi()), 2) +
                          pow_int(sin(sym_phi()), 2);
    return e;
}

inline Metric3 metric3() {
    Expr a = sym_a(), rho = sym_rho(), sp = sin(sym_phi()), cp = cos(sym_phi());
    static const Metric3 g{
        pow_int(a, 2) * pow_int(sp, 2) + pow_int(cp, 2),
        (pow_int(a, 2) - constant(1.0)) * rho * sp * cp,
        constant(0.0),
        pow_int(rho, 2) * lambda_sq(),
        constant(0.0),
        pow_int(a, 2) * pow_int(rho, 2) * pow_int(sp, 2),
    };
    return g;
}

// inverse of metric3, all entries closed-form
inline std::array<std::array<Expr, 3>, 3> metric3_inverse() {
    Expr a = sym_a(), rho = sym_rho(), sp = sin(sym_phi()), cp = cos(sym_phi());
    Expr a2 = pow_int(a, 2);
    Expr grr = lambda_sq() / a2;
    Expr grp = (constant(1.0) - a2) * sp * cp / (a2 * rho);
    Expr gpp = (a2 * pow_int(sp, 2) + pow_int(cp, 2)) / (a2 * pow_int(rho, 2));
    Expr gtt = constant(1.0) / (a2 * pow_int(rho, 2) * pow_int(sp, 2));
    Expr zero = constant(0.0);
    return {{{grr, grp, zero}, {grp, gpp, zero}, {zero, zero, gtt}}};
}

// sqrt(det g) = a^2 rho^2 sin(phi), exact
inline Expr sqrt_det_g3() {
    static const Expr e = pow_int(sym_a(), 2) * pow_int(sym_rho(), 2) * sin(sym_phi());
    return e;
}

inline Metric2 metric2() {
    static const Metric2 g{
        restrict_rho1(lambda_sq()),
        constant(0.0),
        pow_int(sym_a(), 2) * pow_int(sin(sym_phi()), 2),
    };
    return g;
}

// sqrt(det g_E) = a sin(phi) lambda; lambda enters through sqrt of lambda^2 > 0
inline Expr sqrt_det_g2() {
    static const Expr e = sym_a() * sin(sym_phi()) * sqrt_positive(lambda_sq());
    return e;
}

// gradient of rho(x, y, z) expressed in chart components
inline VectorField3 grad_rho() {
    Expr a2 = pow_int(sym_a(), 2);
    static const VectorField3 v{
        lambda_sq() / a2,
        (constant(1.0) - a2) * sin(sym_phi()) * cos(sym_phi()) / (a2 * sym_rho()),
        constant(0.0),
    };
    return v;
}

inline Expr grad_rho_norm_sq() {
    static const Expr e = lambda_sq() / pow_int(sym_a(), 2);
    return e;
}

// Gauss curvature of the rho = 1 surface: K = 1 / lambda^4
inline Expr gauss_curvature() {
    static const Expr e = constant(1.0) / pow_int(lambda_sq(), 2);
    return e;
}

// Y = rho d/drho, the field whose flow rescales rho
inline VectorField3 radial_field() {
    static const VectorField3 v{sym_rho(), constant(0.0), constant(0.0)};
    return v;
}

// Jacobian of the chart map, column j = d(Phi)/d(coordinate j)
inline std::array<std::array<Expr, 3>, 3> chart_jacobian() {
    Expr a = sym_a(), rho = sym_rho();
    Expr sp = sin(sym_phi()), cp = cos(sym_phi());
    Expr st = sin(sym_theta()), ct = cos(sym_theta());
    return {{
        {a * sp * ct, a * rho * cp * ct, -(a * rho * sp * st)},
        {a * sp * st, a * rho * cp * st, a * rho * sp * ct},
        {cp, -(rho * sp), constant(0.0)},
    }};
}

}  // namespace geo

struct GeometryContext {
    double a;
    std::optional<double> mu;  // eccentricity, defined for a >= 1
    Expr lambda_sq;
    Metric3 metric3;
    Metric2 metric2;
    VectorField3 grad_rho;
    Expr grad_rho_norm_sq;
    Expr gauss_curvature;
};

inline GeometryContext make_context(double a) {
    if (!(a > 0.0)) throw ConstructError("make_context: half-axis a must be positive");
    GeometryContext ctx{
        a,
        std::nullopt,
        geo::lambda_sq(),
        geo::metric3(),
        geo::metric2(),
        geo::grad_rho(),
        geo::grad_rho_norm_sq(),
        geo::gauss_curvature(),
    };
    if (a >= 1.0) ctx.mu = std::sqrt((a * a - 1.0) / (a * a));
    return ctx;
}

inline std::array<double, 3> chart_to_cartesian(const ChartPoint& p, double a) {
    if (!(a > 0.0)) throw ConstructError("chart_to_cartesian: a must be positive");
    if (!chart_point_valid(p)) throw EvalError("chart_to_cartesian: point outside chart domain");
    return {a * p.rho * std::sin(p.phi) * std::cos(p.theta),
            a * p.rho * std::sin(p.phi) * std::sin(p.theta),
            p.rho * std::cos(p.phi)};
}

inline double rho_from_cartesian(double x, double y, double z, double a) {
    return std::sqrt((x * x + y * y) / (a * a) + z * z);
}

// max over a grid of |(J^T J)_ij - g_ij|; a direct check that the chart
// metric really is the pullback of the Euclidean one
inline double pullback_metric_check(double a, int n_rho = 5, int n_phi = 17, int n_theta = 17) {
    auto J = geo::chart_jacobian();
    Metric3 g = geo::metric3();
    Evaluator ev;
    double worst = 0.0;
    constexpr double pi = 3.14159265358979323846;
    for (int ir = 0; ir < n_rho; ++ir) {
        double rho = 0.8 + 0.4 * ir / (n_rho - 1);
        for (int ip = 0; ip < n_phi; ++ip) {
            double phi = 0.15 + (pi - 0.3) * ip / (n_phi - 1);
            for (int it = 0; it < n_theta; ++it) {
                double theta = -pi + 0.1 + (2 * pi - 0.2) * it / (n_theta - 1);
                double Jv[3][3];
                for (int r = 0; r < 3; ++r)
                    for (int c = 0; c < 3; ++c) Jv[r][c] = ev(J[r][c], rho, phi, theta, a);
                for (int i = 0; i < 3; ++i)
                    for (int j = i; j < 3; ++j) {
                        double dot = 0.0;
                        for (int r = 0; r < 3; ++r) dot += Jv[r][i] * Jv[r][j];
                        double gij = ev(g.at(i, j), rho, phi, theta, a);
                        worst = std::max(worst, std::abs(dot - gij));
                    }
            }
        }
    }
    return worst;
}

}  // namespace ellcalc
