#pragma once

// Divergence operators on the chart and construction of divergence-free test
// fields. A tangential base field with vanishing surface divergence is
// completed to an ambient divergence-free field by solving the radial ODE
//   d/drho (rho^2 v^rho) = -rho^2 D(rho, phi, theta),  v^rho(1) = 0,
// where D is the ambient divergence of the base field. The solution
//   v^rho = -rho^{-2} integral_1^rho tau^2 D(tau, phi, theta) dtau
// enters expression trees as a registered kernel whose rho-derivative is
// declared through the fundamental theorem of calculus and whose tangential
// derivatives differentiate under the integral sign (up to second order).

#include <random>

#include "expr.hpp"
#include "geometry.hpp"
#include "quadrature.hpp"

namespace ellcalc {

// ambient divergence in chart coordinates
inline Expr div3(const VectorField3& v) {
    Expr rho = geo::sym_rho(), phi = geo::sym_phi();
    Expr cot = cos(phi) / sin(phi);
    return differentiate(v.v_rho, Var::rho) + differentiate(v.v_phi_comp, Var::phi) +
           constant(2.0) / rho * v.v_rho + differentiate(v.v_theta_comp, Var::theta) +
           cot * v.v_phi_comp;
}

// surface divergence on rho = 1 of a tangential field (components restricted)
inline Expr divE(Expr v_phi, Expr v_theta) {
    Expr phi = geo::sym_phi(), a2 = pow_int(geo::sym_a(), 2);
    Expr sp = sin(phi), cp = cos(phi);
    Expr q = ((constant(2.0) - a2) * pow_int(sp, 2) + a2 * pow_int(cp, 2)) / geo::lambda_sq();
    Expr vp = restrict_rho1(v_phi), vt = restrict_rho1(v_theta);
    return differentiate(vp, Var::phi) + differentiate(vt, Var::theta) + cp / sp * q * vp;
}

namespace detail {

// 32 vs 64 node disagreement beyond this relative level means the integrand
// is not resolved; the absolute floor absorbs roundoff-scale integrands
constexpr double kQuadRelTol = 1e-10;
constexpr double kQuadAbsFloor = 1e-14;

inline double vrho_quad_value(Expr integrand, double rho, double phi, double theta, double a,
                              const std::string& name) {
    if (rho == 1.0) return 0.0;
    Evaluator ev;
    auto f = [&](double tau) { return tau * tau * ev(integrand, tau, phi, theta, a); };
    double i32 = gauss_legendre(f, 1.0, rho, 32);
    double i64 = gauss_legendre(f, 1.0, rho, 64);
    double diff = std::abs(i32 - i64);
    double scale = std::max(std::abs(i32), std::abs(i64));
    if (diff > kQuadRelTol * scale && diff > kQuadAbsFloor)
        throw QuadratureError("quadrature non-convergence in kernel '" + name + "'");
    return -i64 / (rho * rho);
}

}  // namespace detail

// Kernel for -rho^{-2} integral_1^rho tau^2 integrand dtau. One kernel is
// registered per distinct (integrand, tangential order); repeated requests
// reuse it, so interning keeps derivative chains finite.
inline Expr make_vrho_kernel(Expr integrand, const std::string& name, int tangential_order = 0) {
    static auto* cache = new std::map<std::pair<const Node*, int>, Expr>;
    static auto* mu = new std::mutex;
    {
        std::lock_guard<std::mutex> lock(*mu);
        auto it = cache->find({integrand.node(), tangential_order});
        if (it != cache->end()) return it->second;
    }
    if (contains_kernel(integrand))
        throw ConstructError("make_vrho_kernel: integrand must be kernel-free");

    auto self_id = std::make_shared<int>(-1);
    KernelInfo info;
    info.name = name;
    info.rho_one_value = 0.0;
    info.eval = [integrand, name](double rho, double phi, double theta, double a) {
        return detail::vrho_quad_value(integrand, rho, phi, theta, a, name);
    };
    info.derivative = [integrand, name, self_id, tangential_order](Var v) -> Expr {
        if (v == Var::a)
            throw KernelDerivativeError("kernel '" + name + "': no derivative in a declared");
        if (v == Var::rho) {
            // FTC: d/drho [-rho^{-2} I(rho)] = -(2/rho) value - integrand
            Expr self = kernel_call(*self_id);
            return -(constant(2.0) / geo::sym_rho() * self) - integrand;
        }
        if (tangential_order >= 2)
            throw KernelDerivativeError("kernel '" + name +
                                        "': tangential derivatives declared up to order 2 only");
        return make_vrho_kernel(differentiate(integrand, v),
                                name + "_d" + var_name(v), tangential_order + 1);
    };
    int id = register_kernel(std::move(info));
    *self_id = id;
    Expr e = kernel_call(id);
    std::lock_guard<std::mutex> lock(*mu);
    cache->emplace(std::make_pair(integrand.node(), tangential_order), e);
    return e;
}

// Complete a tangential base field to an ambient divergence-free field.
// Returns the constant 0 when the base is already ambient-divergence-free.
inline Expr construct_vrho(const VectorField3& base, const std::string& name) {
    Expr d = div3(base);
    if (d.is_zero()) return constant(0.0);
    return make_vrho_kernel(d, name);
}

struct AdmissibleField {
    std::string name;
    Expr v_phi;    // tangential components, contravariant
    Expr v_theta;
    Expr v_rho;    // vanishes on rho = 1
    bool quadrature_backed = false;

    VectorField3 base() const { return {constant(0.0), v_phi, v_theta}; }
    VectorField3 full() const { return {v_rho, v_phi, v_theta}; }
};

inline AdmissibleField make_admissible(std::string name, Expr v_phi, Expr v_theta) {
    Expr vr = construct_vrho(VectorField3{constant(0.0), v_phi, v_theta}, "vrho_" + name);
    bool quad = !vr.is_zero();
    return AdmissibleField{std::move(name), v_phi, v_theta, vr, quad};
}

// Built-in test fields. Z1 and Z2 are zonal and exactly ambient
// divergence-free; M1 mixes phi and theta components and needs the
// quadrature-backed radial completion.
inline std::vector<AdmissibleField> catalog() {
    Expr phi = geo::sym_phi(), theta = geo::sym_theta();
    Expr sp = sin(phi), cp = cos(phi);
    Expr a2 = pow_int(geo::sym_a(), 2);
    Expr q = ((constant(2.0) - a2) * pow_int(sp, 2) + a2 * pow_int(cp, 2)) / geo::lambda_sq();

    std::vector<AdmissibleField> fields;
    fields.push_back(make_admissible("Z1", constant(0.0), sp));
    fields.push_back(make_admissible("Z2", constant(0.0), pow_int(sp, 2) * cp));
    fields.push_back(make_admissible("M1", pow_int(sp, 2) * cos(theta),
                                     -(sin(theta) * sp * cp * (constant(2.0) + q))));
    return fields;
}

inline const AdmissibleField* find_field(const std::vector<AdmissibleField>& fields,
                                         const std::string& name) {
    for (const auto& f : fields)
        if (f.name == name) return &f;
    return nullptr;
}

// tangential field with ambient divergence identically 1 (up to roundoff):
// v^phi = tan(phi/2) satisfies d/dphi v^phi + cot(phi) v^phi = 1
inline VectorField3 unit_divergence_field() {
    Expr half = geo::sym_phi() * constant(0.5);
    return VectorField3{constant(0.0), sin(half) / cos(half), constant(0.0)};
}

struct AdmissibilityReport {
    double vrho_surface_max = 0.0;   // |v^rho| on rho = 1
    double dive_max = 0.0;           // surface divergence of the base field
    double div3_max = 0.0;           // ambient divergence of the full field
    bool pass = false;
};

// Invariants: v^rho vanishes on the surface (1e-12), the base field is
// surface-divergence-free (1e-10 on a 33x33 grid), the completed field is
// ambient-divergence-free (1e-8 on a 9x17x17 grid over rho in [0.8, 1.2]).
inline AdmissibilityReport check_admissible(const AdmissibleField& f, double a,
                                            double tol_vrho = 1e-12, double tol_dive = 1e-10,
                                            double tol_div3 = 1e-8) {
    constexpr double pi = 3.14159265358979323846;
    AdmissibilityReport rep;
    Evaluator ev;
    Expr vrho_surface = restrict_rho1(f.v_rho);
    Expr dive = divE(f.v_phi, f.v_theta);
    Expr d3 = div3(f.full());
    for (int ip = 0; ip < 33; ++ip) {
        double phi = 0.1 + (pi - 0.2) * ip / 32.0;
        for (int it = 0; it < 33; ++it) {
            double theta = -pi + 0.1 + (2 * pi - 0.2) * it / 32.0;
            ev.set_point(1.0, phi, theta, a);
            rep.vrho_surface_max = std::max(rep.vrho_surface_max, std::abs(ev.value(vrho_surface)));
            rep.dive_max = std::max(rep.dive_max, std::abs(ev.value(dive)));
        }
    }
    for (int ir = 0; ir < 9; ++ir) {
        double rho = 0.8 + 0.4 * ir / 8.0;
        for (int ip = 0; ip < 17; ++ip) {
            double phi = 0.1 + (pi - 0.2) * ip / 16.0;
            for (int it = 0; it < 17; ++it) {
                double theta = -pi + 0.1 + (2 * pi - 0.2) * it / 16.0;
                rep.div3_max = std::max(rep.div3_max, std::abs(ev(d3, rho, phi, theta, a)));
            }
        }
    }
    rep.pass = rep.vrho_surface_max <= tol_vrho && rep.dive_max <= tol_dive &&
               rep.div3_max <= tol_div3;
    return rep;
}

// Central-difference check of the declared rho- and phi-derivatives of an
// expression (typically a kernel-backed v^rho) at pseudo-random chart points.
inline double fd_derivative_check(Expr e, double a, int npoints = 50, unsigned seed = 20260815) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> urho(0.85, 1.15), uphi(0.4, 2.7), utheta(-2.8, 2.8);
    Expr d_rho = differentiate(e, Var::rho);
    Expr d_phi = differentiate(e, Var::phi);
    Evaluator ev;
    double worst = 0.0;
    const double h = 1e-5;
    for (int i = 0; i < npoints; ++i) {
        double rho = urho(rng), phi = uphi(rng), theta = utheta(rng);
        double fr = (ev(e, rho + h, phi, theta, a) - ev(e, rho - h, phi, theta, a)) / (2 * h);
        double fp = (ev(e, rho, phi + h, theta, a) - ev(e, rho, phi - h, theta, a)) / (2 * h);
        worst = std::max(worst, std::abs(fr - ev(d_rho, rho, phi, theta, a)));
        worst = std::max(worst, std::abs(fp - ev(d_phi, rho, phi, theta, a)));
    }
    return worst;
}

}  // namespace ellcalc
