#pragma once

// Verification of the restriction identity for the viscosity operator, its
// sphere reduction, and the small-eccentricity expansion.
//
// The identity under test, for an ambient divergence-free field v tangent to
// the rho = 1 surface (written as 1-forms on that surface):
//
//   i*{ -lap v } = -lap_E(i*v) + E(v)
//                  - sqrt(K_E) i*{ L_Y v }
//                  - 2 K_E^{1/4} (1 - 1/|grad rho|^2) i*{ (L_{grad rho} v)_phi } e^2
//
// with Y = rho d/drho, K_E the Gauss curvature, and E(v) the second-order
// operator assembled from the double radial Lie derivative. The left side is
// computed generically (flat, d, star, d, star, pullback); the right side is
// assembled term group by term group from closed-form coefficient displays.
// Both sides are exact symbolic objects in (phi, theta, a); residuals on
// evaluation grids are pure floating-point noise when the identity holds.

#include <algorithm>
#include <atomic>
#include <thread>

#include "divfree.hpp"
#include "expr.hpp"
#include "forms.hpp"
#include "geometry.hpp"

namespace ellcalc {

constexpr double kPi = 3.14159265358979323846;

struct GridSpec {
    int n_phi = 33;
    int n_theta = 33;
    double phi_lo = 0.2, phi_hi = kPi - 0.2;
    double theta_lo = -kPi + 0.1, theta_hi = kPi - 0.1;

    double phi_at(int i) const {
        return n_phi == 1 ? phi_lo : phi_lo + (phi_hi - phi_lo) * i / (n_phi - 1);
    }
    double theta_at(int j) const {
        return n_theta == 1 ? theta_lo : theta_lo + (theta_hi - theta_lo) * j / (n_theta - 1);
    }
};

// The four right-hand term groups, all restricted to rho = 1.
struct RhsTerms {
    DifferentialForm laplacian_E;  // -lap_E(i*v)
    Expr E_phi, E_theta;           // E(v) components
    DifferentialForm lie_Y_term;   // -sqrt(K_E) i*{ L_Y v }
    DifferentialForm last_term;    // -2 K_E^{1/4} (1 - 1/|grad rho|^2) i*{(L_{grad rho} v)_phi} e^2

    DifferentialForm e_form() const { return surface_1form(E_phi, E_theta); }

    DifferentialForm total() const {
        return laplacian_E + e_form() + lie_Y_term + last_term;
    }
};

enum class RhsGroup { LaplacianE, EOperator, LieY, LastTerm };

namespace detail {

// vorticity components of the lowered field
struct Vorticity {
    Expr rp, rt, pt;  // omega_{rho phi}, omega_{rho theta}, omega_{phi theta}
};

inline Vorticity vorticity(const DifferentialForm& v_flat) {
    DifferentialForm w = exterior_derivative(v_flat);
    return {w.coeff(0b011), w.coeff(0b101), w.coeff(0b110)};
}

}  // namespace detail

// left side: generic Hodge pipeline, then pullback to the surface
inline DifferentialForm lhs(const AdmissibleField& field, const GeometryContext& ctx) {
    (void)ctx;  // the assembly is symbolic in a
    return pullback_E(hodge_laplacian3(flat(field.full())));
}

// right side, term group by term group from the coefficient displays
inline RhsTerms rhs(const AdmissibleField& field, const GeometryContext& ctx) {
    Expr a2 = pow_int(geo::sym_a(), 2);
    Expr L = ctx.lambda_sq;
    Expr rho = geo::sym_rho(), phi = geo::sym_phi();
    Expr sp = sin(phi), cp = cos(phi);
    Expr one = constant(1.0), two = constant(2.0);

    DifferentialForm v_flat = flat(field.full());
    auto w = detail::vorticity(v_flat);
    Expr drho_vrho = differentiate(field.v_rho, Var::rho);
    Expr L_over_a2 = L / a2;
    Expr dphi_L_over_a2 = differentiate(L_over_a2, Var::phi);

    // coefficient shorthands shared by the displays
    Expr c_lam = (one - a2) / (L * rho) * sp * cp;  // (1-a^2)/(lambda^2 rho) sin cos
    Expr c_a = (one - a2) / (a2 * rho) * sp * cp;   // (1-a^2)/(a^2 rho) sin cos

    // simplified G_phi
    Expr G_phi = -(differentiate(w.rp, Var::rho) * L_over_a2)
                 - a2 / L * drho_vrho * dphi_L_over_a2
                 - differentiate(c_a * w.rp, Var::phi)
                 + c_lam * w.rp * dphi_L_over_a2;

    // G_theta, as displayed
    Expr G_theta =
        (-differentiate(w.rt + w.pt * c_lam + a2 / L * differentiate(field.v_rho, Var::theta),
                        Var::rho) +
         differentiate(a2 / L * drho_vrho - c_lam * w.rp, Var::theta)) *
            L_over_a2 +
        (-differentiate(w.rt + w.pt * c_lam, Var::phi) + differentiate(w.rp, Var::theta)) * c_a;

    Expr E_phi = G_phi - differentiate(drho_vrho, Var::phi) + ((L - a2) / a2 + one / L) * w.rp;
    Expr E_theta = G_theta - differentiate(drho_vrho, Var::theta) +
                   ((L - a2) / L + a2 / pow_int(L, 2)) * (w.rt * L_over_a2 + w.pt * c_a);

    RhsTerms t;
    t.laplacian_E = hodge_laplacian_E(pullback_E(v_flat));
    t.E_phi = restrict_rho1(E_phi);
    t.E_theta = restrict_rho1(E_theta);

    Expr v_rho_low = restrict_rho1(v_flat.coeff(0b001));
    DifferentialForm d_E_vr = exterior_derivative(surface_0form(v_rho_low));
    t.lie_Y_term =
        -(one / L * (surface_1form(restrict_rho1(w.rp), restrict_rho1(w.rt)) + d_E_vr));

    t.last_term = surface_1form(-(two / a2 * (one - a2 / L) * restrict_rho1(w.rp)), constant(0.0));

    DifferentialForm combined = t.total();
    for (const auto& [m, c] : combined.coeffs)
        if (contains(c, Var::rho))
            throw ConstructError("rhs: term group not rho-free after restriction");
    return t;
}

struct ResidualReport {
    std::string field;
    double a = 0.0;
    GridSpec grid;
    double max_abs_dphi = 0.0, mean_abs_dphi = 0.0;
    double max_abs_dtheta = 0.0, mean_abs_dtheta = 0.0;
    double rel_max = 0.0;  // max residual / normalizer over points where defined
    double tolerance = 0.0;
    bool pass = false;
    struct TermRow {
        std::string name;
        double max_dphi = 0.0, max_dtheta = 0.0;
    };
    std::vector<TermRow> terms;
    struct Worst {
        double phi = 0.0, theta = 0.0, residual = 0.0;
        std::string component;
    } worst;
    // per-point rows (phi, theta, residual_dphi, residual_dtheta, rel_residual),
    // filled when keep_points is set
    std::vector<std::array<double, 5>> points;
};

namespace detail {

// normalizer for the relative residual: the largest individual right-hand
// term magnitude at the point; below this floor the relative residual is
// undefined and the point contributes only to the absolute statistics
constexpr double kNormalizerFloor = 1e-14;

template <typename Fn>
void parallel_for(int n, int threads, Fn&& fn) {
    if (threads <= 1) {
        Evaluator ev;
        for (int i = 0; i < n; ++i) fn(i, ev);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            Evaluator ev;
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) fn(i, ev);
        });
    for (auto& t : pool) t.join();
}

struct IdentityParts {
    DifferentialForm lhs_form;
    RhsTerms terms;
};

inline const IdentityParts& assembled(const AdmissibleField& field, const GeometryContext& ctx) {
    // assembly is a-symbolic, so one build serves every half-axis value
    static auto* cache = new std::map<std::tuple<const Node*, const Node*, const Node*>,
                                      IdentityParts>;
    static auto* mu = new std::mutex;
    auto key = std::make_tuple(field.v_rho.node(), field.v_phi.node(), field.v_theta.node());
    {
        std::lock_guard<std::mutex> lock(*mu);
        auto it = cache->find(key);
        if (it != cache->end()) return it->second;
    }
    IdentityParts parts{lhs(field, ctx), rhs(field, ctx)};
    std::lock_guard<std::mutex> lock(*mu);
    return cache->emplace(key, std::move(parts)).first->second;
}

}  // namespace detail

// Pointwise comparison of both sides over an interior grid. When `flipped`
// names a term group, that group enters the total with the opposite sign;
// the identity must then visibly fail (used by the self-check tests).
inline ResidualReport verify_identity(const AdmissibleField& field, const GeometryContext& ctx,
                                      const GridSpec& grid = {}, double tolerance = 1e-9,
                                      std::optional<RhsGroup> flipped = std::nullopt,
                                      int threads = 1, bool keep_points = false) {
    const auto& parts = detail::assembled(field, ctx);
    const RhsTerms& t = parts.terms;

    auto sgn = [&](RhsGroup g) {
        return (flipped && *flipped == g) ? constant(-1.0) : constant(1.0);
    };
    DifferentialForm e_form = t.e_form();
    DifferentialForm total = sgn(RhsGroup::LaplacianE) * t.laplacian_E +
                             sgn(RhsGroup::EOperator) * e_form +
                             sgn(RhsGroup::LieY) * t.lie_Y_term +
                             sgn(RhsGroup::LastTerm) * t.last_term;

    const uint8_t MP = forms::bit(1), MT = forms::bit(2);
    std::array<Expr, 2> lhs_c = {parts.lhs_form.coeff(MP), parts.lhs_form.coeff(MT)};
    std::array<Expr, 2> tot_c = {total.coeff(MP), total.coeff(MT)};
    std::array<std::array<Expr, 2>, 4> group_c = {{
        {t.laplacian_E.coeff(MP), t.laplacian_E.coeff(MT)},
        {e_form.coeff(MP), e_form.coeff(MT)},
        {t.lie_Y_term.coeff(MP), t.lie_Y_term.coeff(MT)},
        {t.last_term.coeff(MP), t.last_term.coeff(MT)},
    }};

    int n = grid.n_phi * grid.n_theta;
    struct Row {
        double phi, theta, r[2], rel, lhs_mag[2], grp[4][2];
    };
    std::vector<Row> rows(n);

    detail::parallel_for(n, threads, [&](int idx, Evaluator& ev) {
        int i = idx / grid.n_theta, j = idx % grid.n_theta;
        Row& row = rows[idx];
        row.phi = grid.phi_at(i);
        row.theta = grid.theta_at(j);
        ev.set_point(1.0, row.phi, row.theta, ctx.a);
        double normalizer = 0.0;
        for (int c = 0; c < 2; ++c) {
            double l = ev.value(lhs_c[c]);
            double r = ev.value(tot_c[c]);
            row.r[c] = std::abs(l - r);
            row.lhs_mag[c] = std::abs(l);
            for (int g = 0; g < 4; ++g) {
                row.grp[g][c] = std::abs(ev.value(group_c[g][c]));
                normalizer = std::max(normalizer, row.grp[g][c]);
            }
        }
        row.rel = normalizer > detail::kNormalizerFloor
                      ? std::max(row.r[0], row.r[1]) / normalizer
                      : 0.0;
    });

    ResidualReport rep;
    rep.field = field.name;
    rep.a = ctx.a;
    rep.grid = grid;
    rep.tolerance = tolerance;
    rep.terms = {{"laplacian_E", 0, 0}, {"E_operator", 0, 0}, {"lie_Y", 0, 0},
                 {"last_term", 0, 0},   {"lhs", 0, 0}};
    for (const Row& row : rows) {
        rep.max_abs_dphi = std::max(rep.max_abs_dphi, row.r[0]);
        rep.max_abs_dtheta = std::max(rep.max_abs_dtheta, row.r[1]);
        rep.mean_abs_dphi += row.r[0];
        rep.mean_abs_dtheta += row.r[1];
        rep.rel_max = std::max(rep.rel_max, row.rel);
        for (int g = 0; g < 4; ++g) {
            rep.terms[g].max_dphi = std::max(rep.terms[g].max_dphi, row.grp[g][0]);
            rep.terms[g].max_dtheta = std::max(rep.terms[g].max_dtheta, row.grp[g][1]);
        }
        rep.terms[4].max_dphi = std::max(rep.terms[4].max_dphi, row.lhs_mag[0]);
        rep.terms[4].max_dtheta = std::max(rep.terms[4].max_dtheta, row.lhs_mag[1]);
        double worst_here = std::max(row.r[0], row.r[1]);
        if (worst_here > rep.worst.residual) {
            rep.worst = {row.phi, row.theta, worst_here, row.r[0] >= row.r[1] ? "dphi" : "dtheta"};
        }
        if (keep_points) rep.points.push_back({row.phi, row.theta, row.r[0], row.r[1], row.rel});
    }
    rep.mean_abs_dphi /= n;
    rep.mean_abs_dtheta /= n;
    rep.pass = rep.rel_max <= tolerance;
    return rep;
}

// Sphere case: i*{-lap v} = -lap_{S^2}(i*v) - 2 i*v. Absolute residual.
inline ResidualReport verify_sphere_reduction(const AdmissibleField& field,
                                              const GeometryContext& ctx,
                                              const GridSpec& grid = {},
                                              double tolerance = 1e-10, int threads = 1,
                                              bool keep_points = false) {
    if (ctx.a != 1.0)
        throw ConstructError("verify_sphere_reduction: requires a = 1");
    const auto& parts = detail::assembled(field, ctx);

    DifferentialForm iv = pullback_E(flat(field.full()));
    DifferentialForm sphere_rhs = parts.terms.laplacian_E - (constant(2.0) * iv);

    const uint8_t MP = forms::bit(1), MT = forms::bit(2);
    std::array<Expr, 2> lhs_c = {parts.lhs_form.coeff(MP), parts.lhs_form.coeff(MT)};
    std::array<Expr, 2> rhs_c = {sphere_rhs.coeff(MP), sphere_rhs.coeff(MT)};

    int n = grid.n_phi * grid.n_theta;
    std::vector<std::array<double, 4>> rows(n);  // phi, theta, r_phi, r_theta
    detail::parallel_for(n, threads, [&](int idx, Evaluator& ev) {
        int i = idx / grid.n_theta, j = idx % grid.n_theta;
        double phi = grid.phi_at(i), theta = grid.theta_at(j);
        ev.set_point(1.0, phi, theta, 1.0);
        rows[idx] = {phi, theta, std::abs(ev.value(lhs_c[0]) - ev.value(rhs_c[0])),
                     std::abs(ev.value(lhs_c[1]) - ev.value(rhs_c[1]))};
    });

    ResidualReport rep;
    rep.field = field.name;
    rep.a = 1.0;
    rep.grid = grid;
    rep.tolerance = tolerance;
    for (const auto& row : rows) {
        rep.max_abs_dphi = std::max(rep.max_abs_dphi, row[2]);
        rep.max_abs_dtheta = std::max(rep.max_abs_dtheta, row[3]);
        rep.mean_abs_dphi += row[2];
        rep.mean_abs_dtheta += row[3];
        double worst_here = std::max(row[2], row[3]);
        if (worst_here > rep.worst.residual)
            rep.worst = {row[0], row[1], worst_here, row[2] >= row[3] ? "dphi" : "dtheta"};
        if (keep_points) rep.points.push_back({row[0], row[1], row[2], row[3], 0.0});
    }
    rep.mean_abs_dphi /= n;
    rep.mean_abs_dtheta /= n;
    rep.rel_max = std::max(rep.max_abs_dphi, rep.max_abs_dtheta);
    rep.pass = rep.rel_max <= tolerance;
    return rep;
}

// ---- small-eccentricity expansion ----

// Truncations of the identity in the eccentricity mu, mu^2 = (a^2-1)/a^2.
// The 1-form truncation keeps vorticity components; the component truncation
// writes everything through the contravariant components of the field. Both
// drop an O(mu^4) remainder, which the slope fit measures.
namespace detail {

// 1-form truncation
inline std::array<Expr, 2> truncation_forms(const AdmissibleField& field,
                                            const GeometryContext& ctx) {
    Expr a2 = pow_int(geo::sym_a(), 2);
    Expr musq = (a2 - constant(1.0)) / a2;
    Expr phi = geo::sym_phi();
    Expr sp = sin(phi), cp = cos(phi);
    Expr two = constant(2.0);

    DifferentialForm v_flat = flat(field.full());
    auto w = vorticity(v_flat);
    const auto& parts = assembled(field, ctx);
    const uint8_t MP = forms::bit(1), MT = forms::bit(2);

    Expr t_phi = parts.terms.laplacian_E.coeff(MP) +
                 restrict_rho1(-differentiate(w.rp, Var::rho)) +
                 musq * restrict_rho1(pow_int(sp, 2) * differentiate(w.rp, Var::rho) +
                                      pow_int(cp, 2) * w.rp +
                                      sp * cp * differentiate(w.rp, Var::phi));
    Expr t_theta =
        parts.terms.laplacian_E.coeff(MT) + restrict_rho1(-differentiate(w.rt, Var::rho)) +
        musq * restrict_rho1(pow_int(sp, 2) * (differentiate(w.rt, Var::rho) - w.rt) +
                             sp * cp * (differentiate(w.pt, Var::rho) +
                                        differentiate(w.rt, Var::phi) - two * w.pt));
    return {t_phi, t_theta};
}

// component truncation
inline std::array<Expr, 2> truncation_components(const AdmissibleField& field,
                                                 const GeometryContext& ctx) {
    Expr a2 = pow_int(geo::sym_a(), 2);
    Expr musq = (a2 - constant(1.0)) / a2;
    Expr phi = geo::sym_phi();
    Expr sp = sin(phi), cp = cos(phi);
    Expr two = constant(2.0), three = constant(3.0), four = constant(4.0);

    Expr vp = field.v_phi, vt = field.v_theta;
    Expr vp_r = differentiate(vp, Var::rho), vp_rr = differentiate(vp_r, Var::rho);
    Expr vt_r = differentiate(vt, Var::rho), vt_rr = differentiate(vt_r, Var::rho);

    Expr B_phi = two * vp + four * vp_r + vp_rr;
    Expr B_theta = two * vt + four * vt_r + vt_rr;

    const auto& parts = assembled(field, ctx);
    const uint8_t MP = forms::bit(1), MT = forms::bit(2);

    Expr bracket_phi = vp_rr + vp_r -
                       pow_int(sp, 2) * (two * vp + four * vp_r + two * vp_rr) -
                       sp * cp * (two * differentiate(vp, Var::phi) +
                                  differentiate(differentiate(vt, Var::theta), Var::rho) +
                                  three * differentiate(vp_r, Var::phi));
    Expr t_phi = parts.terms.laplacian_E.coeff(MP) - restrict_rho1(B_phi) -
                 musq * restrict_rho1(bracket_phi);

    // dtheta bracket derived by expanding the assembled right side over the
    // divergence-free jet family and collecting the mu^2 coefficients; the
    // expansion tests pin its decay order
    Expr bracket_theta =
        pow_int(sp, 2) * B_theta - pow_int(sp, 4) * (three * vt_r + vt_rr) -
        four * pow_int(sp, 2) * pow_int(cp, 2) * (vt + vt_r) -
        two * pow_int(sp, 3) * cp *
            (differentiate(vt, Var::phi) + differentiate(vt_r, Var::phi));
    Expr t_theta = parts.terms.laplacian_E.coeff(MT) - restrict_rho1(pow_int(sp, 2) * B_theta) -
                   musq * restrict_rho1(bracket_theta);
    return {t_phi, t_theta};
}

}  // namespace detail

struct ExpansionReport {
    std::string field;
    std::vector<double> mu;
    std::vector<double> err_forms;       // E(mu), 1-form truncation
    std::vector<double> err_components;  // E(mu), component truncation
    double slope_forms = 0.0, slope_components = 0.0;
    bool degenerate_forms = false, degenerate_components = false;
    double min_slope = 3.7;
    bool slopes_agree = false;  // |slope difference| <= 0.3
    bool pass = false;
};

namespace detail {

inline double fit_slope(const std::vector<double>& mu, const std::vector<double>& err) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = static_cast<int>(mu.size());
    for (int i = 0; i < n; ++i) {
        double x = std::log(mu[i]), y = std::log(err[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace detail

inline ExpansionReport verify_expansion(const AdmissibleField& field,
                                        const std::vector<double>& mu_list,
                                        const GridSpec& grid = {17, 17}, int threads = 1) {
    for (double m : mu_list)
        if (!(m > 0.0 && m <= 0.35))
            throw ConstructError("verify_expansion: mu values must lie in (0, 0.35]");

    GeometryContext ctx = make_context(1.0);  // assembly only; a enters at evaluation
    const auto& parts = detail::assembled(field, ctx);
    auto t_forms = detail::truncation_forms(field, ctx);
    auto t_comps = detail::truncation_components(field, ctx);
    const uint8_t MP = forms::bit(1), MT = forms::bit(2);
    std::array<Expr, 2> lhs_c = {parts.lhs_form.coeff(MP), parts.lhs_form.coeff(MT)};

    ExpansionReport rep;
    rep.field = field.name;
    rep.mu = mu_list;
    int n = grid.n_phi * grid.n_theta;
    for (double m : mu_list) {
        double a = 1.0 / std::sqrt(1.0 - m * m);
        std::vector<double> e1(n), e2(n);
        detail::parallel_for(n, threads, [&](int idx, Evaluator& ev) {
            int i = idx / grid.n_theta, j = idx % grid.n_theta;
            ev.set_point(1.0, grid.phi_at(i), grid.theta_at(j), a);
            double l0 = ev.value(lhs_c[0]), l1 = ev.value(lhs_c[1]);
            e1[idx] = std::max(std::abs(l0 - ev.value(t_forms[0])),
                               std::abs(l1 - ev.value(t_forms[1])));
            e2[idx] = std::max(std::abs(l0 - ev.value(t_comps[0])),
                               std::abs(l1 - ev.value(t_comps[1])));
        });
        rep.err_forms.push_back(*std::max_element(e1.begin(), e1.end()));
        rep.err_components.push_back(*std::max_element(e2.begin(), e2.end()));
    }

    for (double e : rep.err_forms)
        if (e < 1e-13) rep.degenerate_forms = true;
    for (double e : rep.err_components)
        if (e < 1e-13) rep.degenerate_components = true;

    bool ok = true;
    if (!rep.degenerate_forms) {
        rep.slope_forms = detail::fit_slope(rep.mu, rep.err_forms);
        ok = ok && rep.slope_forms >= rep.min_slope;
    }
    if (!rep.degenerate_components) {
        rep.slope_components = detail::fit_slope(rep.mu, rep.err_components);
        ok = ok && rep.slope_components >= rep.min_slope;
    }
    rep.slopes_agree = rep.degenerate_forms || rep.degenerate_components ||
                       std::abs(rep.slope_forms - rep.slope_components) <= 0.3;
    rep.pass = ok;
    return rep;
}

// Partial sums of the geometric series in mu^2 sin^2(phi) and its derivative
// series, checked against the closed forms with their geometric tail bounds.
struct SeriesReport {
    int K = 8;
    double mu = 0.3;
    double geo_max_err = 0.0, geo_bound = 0.0;
    double dgeo_max_err = 0.0, dgeo_bound = 0.0;
    bool pass = false;
};

inline SeriesReport check_series_bounds(int K = 8, double mu = 0.3, int n_phi = 65) {
    SeriesReport rep;
    rep.K = K;
    rep.mu = mu;
    double m2 = mu * mu;
    rep.geo_bound = std::pow(mu, 2 * K + 2) / (1.0 - m2);
    // tail of sum (k+1) x^k past K, evaluated at the extremal x = mu^2
    rep.dgeo_bound = std::pow(mu, 2 * K + 2) * ((K + 2) - (K + 1) * m2) / ((1.0 - m2) * (1.0 - m2));
    for (int i = 0; i < n_phi; ++i) {
        double phi = 0.2 + (kPi - 0.4) * i / (n_phi - 1);
        double x = m2 * std::sin(phi) * std::sin(phi);
        double geo = 0.0, dgeo = 0.0, xk = 1.0;
        for (int k = 0; k <= K; ++k) {
            geo += xk;
            dgeo += (k + 1) * xk;
            xk *= x;
        }
        rep.geo_max_err = std::max(rep.geo_max_err, std::abs(geo - 1.0 / (1.0 - x)));
        rep.dgeo_max_err = std::max(rep.dgeo_max_err, std::abs(dgeo - 1.0 / ((1.0 - x) * (1.0 - x))));
    }
    rep.pass = rep.geo_max_err <= rep.geo_bound + 1e-15 && rep.dgeo_max_err <= rep.dgeo_bound + 1e-15;
    return rep;
}

}  // namespace ellcalc
