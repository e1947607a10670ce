#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <random>
#include <set>

#include "ellcalc/divfree.hpp"
#include "ellcalc/forms.hpp"
#include "ellcalc/geometry.hpp"
#include "ellcalc/parse.hpp"
#include "ellcalc/verify.hpp"

using namespace ellcalc;

namespace {

constexpr double pi = 3.14159265358979323846;

struct GridMax {
    double diff = 0.0, scale = 0.0;

    double rel() const { return diff / std::max(1.0, scale); }
};

// max coefficient difference between two forms over an ambient sample grid
GridMax compare_ambient(const DifferentialForm& A, const DifferentialForm& B, double a,
                        int nr = 4, int np = 13, int nt = 7) {
    std::set<uint8_t> masks;
    for (const auto& [m, c] : A.coeffs) masks.insert(m);
    for (const auto& [m, c] : B.coeffs) masks.insert(m);
    Evaluator ev;
    GridMax r;
    for (int i = 0; i < nr; ++i)
        for (int j = 0; j < np; ++j)
            for (int k = 0; k < nt; ++k) {
                double rho = 0.85 + 0.35 * i / (nr - 1.0);
                double phi = 0.25 + (pi - 0.5) * j / (np - 1.0);
                double theta = -3.0 + 6.0 * k / (nt - 1.0);
                ev.set_point(rho, phi, theta, a);
                for (uint8_t m : masks) {
                    double x = ev.value(A.coeff(m)), y = ev.value(B.coeff(m));
                    r.diff = std::max(r.diff, std::abs(x - y));
                    r.scale = std::max({r.scale, std::abs(x), std::abs(y)});
                }
            }
    return r;
}

GridMax compare_surface(const DifferentialForm& A, const DifferentialForm& B, double a,
                        int np = 17, int nt = 9) {
    std::set<uint8_t> masks;
    for (const auto& [m, c] : A.coeffs) masks.insert(m);
    for (const auto& [m, c] : B.coeffs) masks.insert(m);
    Evaluator ev;
    GridMax r;
    for (int j = 0; j < np; ++j)
        for (int k = 0; k < nt; ++k) {
            double phi = 0.25 + (pi - 0.5) * j / (np - 1.0);
            double theta = -3.0 + 6.0 * k / (nt - 1.0);
            ev.set_point(1.0, phi, theta, a);
            for (uint8_t m : masks) {
                double x = ev.value(A.coeff(m)), y = ev.value(B.coeff(m));
                r.diff = std::max(r.diff, std::abs(x - y));
                r.scale = std::max({r.scale, std::abs(x), std::abs(y)});
            }
        }
    return r;
}

// small random expression trees, bounded so grid evaluation stays O(1)
Expr random_scalar(std::mt19937& rng, int depth = 3) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 7);
    std::uniform_real_distribution<double> uc(-2.0, 2.0);
    std::uniform_int_distribution<int> pv(0, 3);
    switch (pick(rng)) {
        case 0: return constant(uc(rng));
        case 1:
        case 2: {
            Var vs[] = {Var::rho, Var::phi, Var::theta, Var::a};
            return variable(vs[pv(rng)]);
        }
        case 3: return sin(random_scalar(rng, depth - 1));
        case 4: return cos(random_scalar(rng, depth - 1));
        case 5: return random_scalar(rng, depth - 1) + random_scalar(rng, depth - 1);
        case 6: return random_scalar(rng, depth - 1) * random_scalar(rng, depth - 1);
        default: return exp(constant(0.25) * random_scalar(rng, depth - 1));
    }
}

VectorField3 random_field(std::mt19937& rng) {
    return {random_scalar(rng), random_scalar(rng), random_scalar(rng)};
}

DifferentialForm random_ambient_form(std::mt19937& rng, int degree) {
    DifferentialForm w;
    w.surface = false;
    w.degree = degree;
    for (uint8_t m = 0; m < 8; ++m)
        if (forms::popcount(m) == degree) w.set(m, random_scalar(rng));
    return w;
}

DifferentialForm random_surface_form(std::mt19937& rng, int degree) {
    DifferentialForm w;
    w.surface = true;
    w.degree = degree;
    for (uint8_t m = 0; m < 8; ++m)
        if ((m & 1u) == 0 && forms::popcount(m) == degree) w.set(m, random_scalar(rng));
    return w;
}

DifferentialForm basis_two_form(uint8_t mask) {
    DifferentialForm w;
    w.degree = 2;
    w.set(mask, constant(1.0));
    return w;
}

}  // namespace

TEST_CASE("exterior derivative basics and nilpotency", "[forms]") {
    Expr rho = geo::sym_rho();

    DifferentialForm w = exterior_derivative(ambient_1form(constant(0.0), pow_int(rho, 2), constant(0.0)));
    REQUIRE(w.degree == 2);
    REQUIRE(w.coeffs.size() == 1);
    Evaluator ev;
    CHECK_THAT(ev(w.coeff(0b011), 1.3, 0.7, 0.2, 1.0), Catch::Matchers::WithinRel(2.6, 1e-15));

    std::mt19937 rng(11);
    DifferentialForm zero_amb;
    for (int rep = 0; rep < 20; ++rep) {
        DifferentialForm ddf = exterior_derivative(exterior_derivative(ambient_0form(random_scalar(rng))));
        auto g0 = compare_ambient(ddf, DifferentialForm{false, 2, {}}, 1.6, 3, 7, 5);
        CHECK(g0.rel() <= 1e-12);

        DifferentialForm dda =
            exterior_derivative(exterior_derivative(random_ambient_form(rng, 1)));
        auto g1 = compare_ambient(dda, DifferentialForm{false, 3, {}}, 1.6, 3, 7, 5);
        CHECK(g1.rel() <= 1e-12);

        DifferentialForm dds =
            exterior_derivative(exterior_derivative(random_surface_form(rng, 0)));
        REQUIRE(dds.surface);
        auto g2 = compare_surface(dds, DifferentialForm{true, 2, {}}, 1.6, 9, 5);
        CHECK(g2.rel() <= 1e-12);
    }
}

TEST_CASE("hodge star sends basis two-forms to the closed-form one-forms", "[forms]") {
    Expr rho = geo::sym_rho(), phi = geo::sym_phi();
    Expr a2 = pow_int(geo::sym_a(), 2), one = constant(1.0);
    Expr L = geo::lambda_sq();
    Expr sp = sin(phi), cp = cos(phi);

    DifferentialForm s_rp = hodge_star3(basis_two_form(0b011));
    DifferentialForm s_rt = hodge_star3(basis_two_form(0b101));
    DifferentialForm s_pt = hodge_star3(basis_two_form(0b110));

    DifferentialForm e_rp = ambient_1form(constant(0.0), constant(0.0), sp);
    DifferentialForm e_rt = ambient_1form((one - a2) * cp / (a2 * rho), -(L / (a2 * sp)), constant(0.0));
    DifferentialForm e_pt = ambient_1form(
        (pow_int(one - a2, 2) / a2 * pow_int(sp, 2) * pow_int(cp, 2) + one) /
            (pow_int(rho, 2) * L * sp),
        -((one - a2) * cp / (a2 * rho)), constant(0.0));

    for (double a : {1.0, 1.5, 2.0}) {
        CAPTURE(a);
        CHECK(compare_ambient(s_rp, e_rp, a).rel() <= 1e-12);
        CHECK(compare_ambient(s_rt, e_rt, a).rel() <= 1e-12);
        CHECK(compare_ambient(s_pt, e_pt, a).rel() <= 1e-12);
    }

    // the same coefficients must act linearly on an arbitrary two-form
    std::mt19937 rng(23);
    for (int rep = 0; rep < 5; ++rep) {
        Expr frp = random_scalar(rng), frt = random_scalar(rng), fpt = random_scalar(rng);
        DifferentialForm F;
        F.degree = 2;
        F.set(0b011, frp);
        F.set(0b101, frt);
        F.set(0b110, fpt);
        DifferentialForm expected = frp * e_rp + frt * e_rt + fpt * e_pt;
        CHECK(compare_ambient(hodge_star3(F), expected, 1.7).rel() <= 1e-12);
    }
}

TEST_CASE("double hodge star sign law", "[forms]") {
    std::mt19937 rng(31);
    for (int degree = 0; degree <= 3; ++degree) {
        for (int rep = 0; rep < 6; ++rep) {
            DifferentialForm w = random_ambient_form(rng, degree);
            DifferentialForm ss = hodge_star3(hodge_star3(w));
            CAPTURE(degree, rep);
            CHECK(compare_ambient(ss, w, 1.4, 3, 9, 5).rel() <= 1e-12);
        }
    }
    // on the surface, degree one picks up a sign
    for (int degree = 0; degree <= 2; ++degree) {
        double sign = (degree == 1) ? -1.0 : 1.0;
        for (int rep = 0; rep < 6; ++rep) {
            DifferentialForm w = random_surface_form(rng, degree);
            DifferentialForm ss = hodge_star2(hodge_star2(w));
            DifferentialForm expected = constant(sign) * w;
            CAPTURE(degree, rep);
            CHECK(compare_surface(ss, expected, 1.4, 9, 5).rel() <= 1e-12);
        }
    }
}

TEST_CASE("interior product against the gradient of rho", "[forms]") {
    Expr rho = geo::sym_rho(), phi = geo::sym_phi();
    Expr a2 = pow_int(geo::sym_a(), 2), one = constant(1.0);
    Expr L = geo::lambda_sq();
    Expr sc = sin(phi) * cos(phi);
    VectorField3 gr = geo::grad_rho();

    DifferentialForm i_rp = interior_product(gr, basis_two_form(0b011));
    DifferentialForm i_rt = interior_product(gr, basis_two_form(0b101));
    DifferentialForm i_pt = interior_product(gr, basis_two_form(0b110));

    DifferentialForm e_rp = ambient_1form((a2 - one) / (a2 * rho) * sc, L / a2, constant(0.0));
    DifferentialForm e_rt = ambient_1form(constant(0.0), constant(0.0), L / a2);
    DifferentialForm e_pt =
        ambient_1form(constant(0.0), constant(0.0), (one - a2) / (a2 * rho) * sc);

    for (double a : {1.0, 1.5, 2.0}) {
        CAPTURE(a);
        CHECK(compare_ambient(i_rp, e_rp, a).rel() <= 1e-12);
        CHECK(compare_ambient(i_rt, e_rt, a).rel() <= 1e-12);
        CHECK(compare_ambient(i_pt, e_pt, a).rel() <= 1e-12);
    }

    // contracting the flat of any admissible field recovers its radial component
    for (const auto& f : catalog()) {
        DifferentialForm got = interior_product(gr, flat(f.full()));
        REQUIRE(got.degree == 0);
        CHECK(compare_ambient(got, ambient_0form(f.v_rho), 1.8, 3, 9, 5).rel() <= 1e-12);
    }
}

TEST_CASE("interior product squares to zero and kills functions", "[forms]") {
    DifferentialForm iv = interior_product(geo::radial_field(), ambient_0form(geo::sym_phi()));
    CHECK(iv.degree == 0);
    CHECK(iv.coeffs.empty());

    std::mt19937 rng(43);
    for (int rep = 0; rep < 10; ++rep) {
        VectorField3 X = random_field(rng);
        for (int degree : {2, 3}) {
            DifferentialForm w = random_ambient_form(rng, degree);
            DifferentialForm ii = interior_product(X, interior_product(X, w));
            CAPTURE(degree, rep);
            CHECK(compare_ambient(ii, DifferentialForm{false, degree - 2, {}}, 1.3, 3, 7, 5)
                      .rel() <= 1e-12);
        }
    }
}

TEST_CASE("musical isomorphisms", "[forms]") {
    // lowering the theta coordinate field picks up the metric coefficient
    DifferentialForm w = flat(VectorField3{constant(0.0), constant(0.0), constant(1.0)});
    CHECK(w.coeffs.count(0b001) == 0);
    CHECK(w.coeffs.count(0b010) == 0);
    Evaluator ev;
    double got = ev(w.coeff(0b100), 1.1, 0.8, 0.3, 2.0);
    double expect = 4.0 * 1.1 * 1.1 * std::sin(0.8) * std::sin(0.8);
    CHECK_THAT(got, Catch::Matchers::WithinRel(expect, 1e-14));

    std::mt19937 rng(59);
    for (double a : {1.0, 2.0}) {
        for (int rep = 0; rep < 8; ++rep) {
            VectorField3 v = random_field(rng);
            VectorField3 back = sharp(flat(v));
            DifferentialForm diff;
            diff.degree = 1;
            diff.set(0b001, back.v_rho - v.v_rho);
            diff.set(0b010, back.v_phi_comp - v.v_phi_comp);
            diff.set(0b100, back.v_theta_comp - v.v_theta_comp);
            CAPTURE(a, rep);
            CHECK(compare_ambient(diff, DifferentialForm{false, 1, {}}, a, 3, 9, 5).rel() <= 1e-12);

            DifferentialForm alpha = random_ambient_form(rng, 1);
            CHECK(compare_ambient(flat(sharp(alpha)), alpha, a, 3, 9, 5).rel() <= 1e-12);
        }
    }
}

TEST_CASE("surface star closed forms", "[forms]") {
    Expr one = constant(1.0), phi = geo::sym_phi();
    Expr lam = sqrt_positive(restrict_rho1(geo::lambda_sq()));
    Expr a = geo::sym_a();

    DifferentialForm vol = hodge_star2(surface_0form(one));
    DifferentialForm vol_expect;
    vol_expect.surface = true;
    vol_expect.degree = 2;
    vol_expect.set(0b110, lam * a * sin(phi));

    DifferentialForm sdp = hodge_star2(surface_1form(one, constant(0.0)));
    DifferentialForm sdp_expect = surface_1form(constant(0.0), a * sin(phi) / lam);

    for (double av : {1.0, 1.5, 2.0}) {
        CAPTURE(av);
        CHECK(compare_surface(vol, vol_expect, av).rel() <= 1e-12);
        CHECK(compare_surface(sdp, sdp_expect, av).rel() <= 1e-12);
    }

    // round sphere: star of dtheta
    DifferentialForm sdt = hodge_star2(surface_1form(constant(0.0), one));
    DifferentialForm sdt_expect = surface_1form(-(one / sin(phi)), constant(0.0));
    CHECK(compare_surface(sdt, sdt_expect, 1.0).rel() <= 1e-12);
}

TEST_CASE("lie derivative via the Cartan formula", "[forms]") {
    Expr rho = geo::sym_rho();

    DifferentialForm lw =
        lie_derivative(geo::radial_field(), ambient_1form(constant(0.0), pow_int(rho, 2), constant(0.0)));
    DifferentialForm lw_expect =
        ambient_1form(constant(0.0), constant(2.0) * pow_int(rho, 2), constant(0.0));
    CHECK(compare_ambient(lw, lw_expect, 1.7).rel() <= 1e-13);

    // naturality: the lie derivative commutes with d on scalars
    std::mt19937 rng(67);
    for (int rep = 0; rep < 12; ++rep) {
        VectorField3 X = random_field(rng);
        Expr g = random_scalar(rng);
        DifferentialForm left = lie_derivative(X, exterior_derivative(ambient_0form(g)));
        DifferentialForm right = exterior_derivative(lie_derivative(X, ambient_0form(g)));
        CAPTURE(rep);
        CHECK(compare_ambient(left, right, 1.5, 3, 9, 5).rel() <= 1e-12);
    }
}

TEST_CASE("lie derivative along the gradient and radial directions", "[forms]") {
    Expr rho = geo::sym_rho(), phi = geo::sym_phi();
    Expr a2 = pow_int(geo::sym_a(), 2), one = constant(1.0);
    Expr L = geo::lambda_sq();
    Expr sc = sin(phi) * cos(phi);

    for (const auto& f : catalog()) {
        DifferentialForm vf = flat(f.full());
        DifferentialForm w = exterior_derivative(vf);
        Expr wrp = w.coeff(0b011), wrt = w.coeff(0b101), wpt = w.coeff(0b110);

        DifferentialForm got_grad = lie_derivative(geo::grad_rho(), vf);
        DifferentialForm expect_grad =
            ambient_1form(wrp * ((a2 - one) / (a2 * rho)) * sc, wrp * (L / a2),
                          wrt * (L / a2) + wpt * ((one - a2) / (a2 * rho)) * sc) +
            exterior_derivative(ambient_0form(f.v_rho));

        DifferentialForm got_rad = lie_derivative(geo::radial_field(), vf);
        DifferentialForm expect_rad =
            ambient_1form(constant(0.0), rho * wrp, rho * wrt) +
            exterior_derivative(ambient_0form(rho * vf.coeff(0b001)));

        for (double a : {1.3, 2.0}) {
            CAPTURE(f.name, a);
            CHECK(compare_ambient(got_grad, expect_grad, a, 3, 9, 5).rel() <= 1e-11);
            CHECK(compare_ambient(got_rad, expect_rad, a, 3, 9, 5).rel() <= 1e-11);
        }
    }
}

TEST_CASE("pullback to the surface commutes with d", "[forms]") {
    DifferentialForm dr = pullback_E(ambient_1form(constant(1.0), constant(0.0), constant(0.0)));
    CHECK(dr.surface);
    CHECK(dr.degree == 1);
    CHECK(dr.coeffs.empty());

    std::mt19937 rng(71);
    for (int rep = 0; rep < 12; ++rep) {
        Expr g = random_scalar(rng);
        DifferentialForm l0 = pullback_E(exterior_derivative(ambient_0form(g)));
        DifferentialForm r0 = exterior_derivative(pullback_E(ambient_0form(g)));
        CHECK(compare_surface(l0, r0, 1.6, 9, 5).rel() <= 1e-12);

        DifferentialForm alpha = random_ambient_form(rng, 1);
        DifferentialForm l1 = pullback_E(exterior_derivative(alpha));
        DifferentialForm r1 = exterior_derivative(pullback_E(alpha));
        CHECK(compare_surface(l1, r1, 1.6, 9, 5).rel() <= 1e-12);
    }
}

TEST_CASE("ambient laplacian annihilates exact one-forms", "[forms]") {
    Expr f = geo::sym_rho() * cos(geo::sym_phi());
    DifferentialForm out = hodge_laplacian3(exterior_derivative(ambient_0form(f)));
    CHECK(compare_ambient(out, DifferentialForm{false, 1, {}}, 1.9).diff <= 1e-13);
}

TEST_CASE("surface laplacian component formula", "[forms]") {
    Expr phi = geo::sym_phi();
    Expr a2 = pow_int(geo::sym_a(), 2);
    Expr sp = sin(phi);
    Expr lam = sqrt_positive(restrict_rho1(geo::lambda_sq()));

    for (const auto& f : catalog()) {
        DifferentialForm beta = pullback_E(flat(f.full()));
        Expr w = exterior_derivative(beta).coeff(0b110);
        Expr disp_phi = differentiate(w, Var::theta) / (a2 * pow_int(sp, 2));
        Expr disp_theta = -(sp / lam) * differentiate(w / (lam * sp), Var::phi);
        DifferentialForm expected = surface_1form(disp_phi, disp_theta);
        DifferentialForm got = hodge_laplacian_E(beta);
        for (double a : {1.0, 1.5, 2.0}) {
            CAPTURE(f.name, a);
            CHECK(compare_surface(got, expected, a).rel() <= 1e-11);
        }
    }
}

TEST_CASE("surface laplacian zonal oracle on the round sphere", "[forms]") {
    Expr phi = geo::sym_phi();
    Expr sp = sin(phi);

    // -lap_E(sin^2 dtheta) = 2 sin^2 dtheta at a = 1
    DifferentialForm beta = surface_1form(constant(0.0), pow_int(sp, 2));
    DifferentialForm expected = surface_1form(constant(0.0), constant(2.0) * pow_int(sp, 2));
    CHECK(compare_surface(hodge_laplacian_E(beta), expected, 1.0).rel() <= 1e-13);

    // generic zonal profile against the one-dimensional reduction
    for (const char* src : {"sin(phi)^2*cos(phi)", "sin(phi)^3", "sin(phi)^2*(2 - cos(phi))"}) {
        Expr f = parse(src);
        DifferentialForm zon = surface_1form(constant(0.0), f);
        Expr fp = differentiate(f, Var::phi);
        Expr oracle = -(sp * differentiate(fp / sp, Var::phi));
        CAPTURE(src);
        CHECK(compare_surface(hodge_laplacian_E(zon), surface_1form(constant(0.0), oracle), 1.0)
                  .rel() <= 1e-12);
    }
}

TEST_CASE("ambient laplacian matches a cartesian finite difference oracle", "[forms]") {
    const double a = 2.0;
    auto fields = catalog();
    const AdmissibleField* fp = find_field(fields, "Z1");
    REQUIRE(fp != nullptr);
    const AdmissibleField& f = *fp;
    DifferentialForm target = hodge_laplacian3(flat(f.full()));
    Evaluator ev;

    // chart components pushed forward to a cartesian vector at a cartesian point
    auto field_cart = [&](const std::array<double, 3>& X) {
        double x = X[0], y = X[1], z = X[2];
        double rho = std::sqrt((x * x + y * y) / (a * a) + z * z);
        double phi = std::atan2(std::sqrt(x * x + y * y) / a, z);
        double theta = std::atan2(y, x);
        double s = std::sin(phi), c = std::cos(phi);
        double st = std::sin(theta), ct = std::cos(theta);
        ev.set_point(rho, phi, theta, a);
        double vr = ev.value(f.v_rho);
        double vp = ev.value(f.v_phi);
        double vt = ev.value(f.v_theta);
        return std::array<double, 3>{
            vr * a * s * ct + vp * a * rho * c * ct + vt * (-a * rho * s * st),
            vr * a * s * st + vp * a * rho * c * st + vt * (a * rho * s * ct),
            vr * c + vp * (-rho * s)};
    };

    const double h = 1e-3;
    for (double rho : {0.95, 1.1})
        for (double phi : {0.6, 1.2, 2.0})
            for (double theta : {0.4, 2.2}) {
                auto x0 = chart_to_cartesian({rho, phi, theta}, a);
                std::array<double, 3> lap{0.0, 0.0, 0.0};
                auto w0 = field_cart(x0);
                for (int j = 0; j < 3; ++j) {
                    auto xp = x0, xm = x0;
                    xp[j] += h;
                    xm[j] -= h;
                    auto wp = field_cart(xp), wm = field_cart(xm);
                    for (int i = 0; i < 3; ++i)
                        lap[i] += (wp[i] - 2.0 * w0[i] + wm[i]) / (h * h);
                }

                // pull the cartesian one-form -lap(W) back through the chart jacobian
                double s = std::sin(phi), c = std::cos(phi);
                double st = std::sin(theta), ct = std::cos(theta);
                std::array<std::array<double, 3>, 3> J = {{
                    {a * s * ct, a * s * st, c},
                    {a * rho * c * ct, a * rho * c * st, -rho * s},
                    {-a * rho * s * st, a * rho * s * ct, 0.0},
                }};
                ev.set_point(rho, phi, theta, a);
                for (int k = 0; k < 3; ++k) {
                    double expect = 0.0;
                    for (int i = 0; i < 3; ++i) expect -= J[k][i] * lap[i];
                    double got = ev.value(target.coeff(forms::bit(k)));
                    CAPTURE(rho, phi, theta, k);
                    CHECK_THAT(got, Catch::Matchers::WithinAbs(expect, 1e-5 * std::max(1.0, std::abs(expect))));
                }
            }
}

TEST_CASE("restricted lie derivative reference forms", "[forms]") {
    Expr rho = geo::sym_rho(), phi = geo::sym_phi();
    Expr a2 = pow_int(geo::sym_a(), 2), one = constant(1.0);
    Expr L = geo::lambda_sq();
    Expr c_a = (one - a2) / (a2 * rho) * sin(phi) * cos(phi);
    VectorField3 gr = geo::grad_rho();

    for (const auto& f : catalog()) {
        DifferentialForm vf = flat(f.full());
        DifferentialForm w = exterior_derivative(vf);
        Expr wrp = w.coeff(0b011), wrt = w.coeff(0b101), wpt = w.coeff(0b110);
        DifferentialForm Lv = lie_derivative(gr, vf);

        DifferentialForm bracket = surface_1form(restrict_rho1(wrp * (L / a2)),
                                                 restrict_rho1(wrt * (L / a2) + wpt * c_a));

        DifferentialForm via_bracket_1 = restrict_rho1((L - a2) / L) * bracket;
        DifferentialForm via_pullback_1 = restrict_rho1(one - a2 / L) * pullback_E(Lv);

        DifferentialForm via_bracket_2 = restrict_rho1(a2 / pow_int(L, 2)) * bracket;
        DifferentialForm via_pullback_2 = restrict_rho1(one / L) * pullback_E((a2 / L) * Lv);

        for (double a : {1.0, 1.4, 2.0}) {
            CAPTURE(f.name, a);
            CHECK(compare_surface(via_bracket_1, via_pullback_1, a).rel() <= 1e-12);
            CHECK(compare_surface(via_bracket_2, via_pullback_2, a).rel() <= 1e-12);
        }
    }
}

TEST_CASE("operator definition assembles to the component displays", "[forms]") {
    Expr a2 = pow_int(geo::sym_a(), 2), one = constant(1.0);
    Expr L = geo::lambda_sq();
    VectorField3 gr = geo::grad_rho();
    GeometryContext ctx = make_context(1.0);

    for (const auto& f : catalog()) {
        RhsTerms t = rhs(f, ctx);

        DifferentialForm vf = flat(f.full());
        DifferentialForm Lv = lie_derivative(gr, vf);
        DifferentialForm inner = (a2 / L) * Lv;
        DifferentialForm op = pullback_E(-lie_derivative(gr, inner) + (one - a2 / L) * Lv);
        DifferentialForm corr = restrict_rho1(one / L) * pullback_E(inner);
        DifferentialForm e_op = op + corr;

        DifferentialForm e_display = surface_1form(t.E_phi, t.E_theta);
        for (double a : {1.2, 1.7}) {
            CAPTURE(f.name, a);
            CHECK(compare_surface(e_op, e_display, a).rel() <= 1e-11);
        }
    }
}
