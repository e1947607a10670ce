#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "ellcalc/verify.hpp"

using namespace ellcalc;

namespace {

constexpr double pi = 3.14159265358979323846;

// max |x - y| / max(1, scale) over the restricted grid at half-axis a
double surf_rel_diff(Expr x, Expr y, double a, int np = 17, int nt = 9) {
    Evaluator ev;
    double diff = 0.0, scale = 1.0;
    for (int j = 0; j < np; ++j)
        for (int k = 0; k < nt; ++k) {
            double phi = 0.25 + (pi - 0.5) * j / (np - 1.0);
            double theta = -3.0 + 6.0 * k / (nt - 1.0);
            ev.set_point(1.0, phi, theta, a);
            double vx = ev.value(x), vy = ev.value(y);
            diff = std::max(diff, std::abs(vx - vy));
            scale = std::max({scale, std::abs(vx), std::abs(vy)});
        }
    return diff / scale;
}

}  // namespace

TEST_CASE("restriction identity holds for the catalog", "[verify]") {
    for (const auto& f : catalog()) {
        for (double a : {1.0, 1.1, 1.5, 2.0}) {
            GeometryContext ctx = make_context(a);
            ResidualReport rep = verify_identity(f, ctx);
            CAPTURE(f.name, a, rep.rel_max, rep.max_abs_dphi, rep.max_abs_dtheta);
            CHECK(rep.pass);
            CHECK(rep.rel_max <= 1e-12);
            REQUIRE(rep.terms.size() == 5);
            CHECK(rep.terms[0].name == "laplacian_E");
            CHECK(rep.terms[1].name == "E_operator");
            CHECK(rep.terms[2].name == "lie_Y");
            CHECK(rep.terms[3].name == "last_term");
            CHECK(rep.terms[4].name == "lhs");
            CHECK(rep.worst.phi >= rep.grid.phi_lo);
            CHECK(rep.worst.phi <= rep.grid.phi_hi);
        }
    }
}

TEST_CASE("threaded evaluation reproduces the serial result", "[verify]") {
    auto fields = catalog();
    const AdmissibleField* z2 = find_field(fields, "Z2");
    REQUIRE(z2 != nullptr);
    GeometryContext ctx = make_context(1.7);
    ResidualReport serial = verify_identity(*z2, ctx);
    ResidualReport threaded = verify_identity(*z2, ctx, {}, 1e-9, std::nullopt, 3);
    CHECK(serial.rel_max == threaded.rel_max);
    CHECK(serial.max_abs_dphi == threaded.max_abs_dphi);
    CHECK(serial.worst.residual == threaded.worst.residual);
}

TEST_CASE("per-point rows are kept only on request", "[verify]") {
    auto fields = catalog();
    const AdmissibleField* z1 = find_field(fields, "Z1");
    REQUIRE(z1 != nullptr);
    GeometryContext ctx = make_context(1.3);

    ResidualReport quiet = verify_identity(*z1, ctx, GridSpec{9, 9});
    CHECK(quiet.points.empty());

    ResidualReport kept = verify_identity(*z1, ctx, GridSpec{9, 9}, 1e-9, std::nullopt, 1, true);
    REQUIRE(kept.points.size() == 81);
    for (const auto& row : kept.points) {
        CHECK(row[0] >= kept.grid.phi_lo);
        CHECK(row[4] <= kept.rel_max);
    }
}

TEST_CASE("finer grids stay tight", "[verify]") {
    auto fields = catalog();
    const AdmissibleField* z2 = find_field(fields, "Z2");
    REQUIRE(z2 != nullptr);
    GeometryContext ctx = make_context(1.5);
    ResidualReport rep = verify_identity(*z2, ctx, GridSpec{65, 65});
    CHECK(rep.pass);
    CHECK(rep.rel_max <= 1e-12);
}

TEST_CASE("round sphere term degenerations", "[verify]") {
    GeometryContext ctx = make_context(1.0);
    const uint8_t MP = forms::bit(1), MT = forms::bit(2);
    Expr two = constant(2.0);

    for (const auto& f : catalog()) {
        RhsTerms t = rhs(f, ctx);
        DifferentialForm v_flat = flat(f.full());
        auto w = detail::vorticity(v_flat);

        // the last term carries a (1 - a^2/lambda^2) factor and dies at a = 1
        CHECK(surf_rel_diff(t.last_term.coeff(MP), constant(0.0), 1.0) <= 1e-14);

        // lie_Y term reduces to minus the bare vorticity data
        DifferentialForm expect_lie =
            -(surface_1form(restrict_rho1(w.rp), restrict_rho1(w.rt)) +
              exterior_derivative(surface_0form(restrict_rho1(v_flat.coeff(0b001)))));
        CHECK(surf_rel_diff(t.lie_Y_term.coeff(MP), expect_lie.coeff(MP), 1.0) <= 1e-12);
        CHECK(surf_rel_diff(t.lie_Y_term.coeff(MT), expect_lie.coeff(MT), 1.0) <= 1e-12);

        // the whole right side collapses to -lap_E - 2 i*v
        DifferentialForm total = t.total();
        DifferentialForm sphere = t.laplacian_E - two * pullback_E(v_flat);
        CAPTURE(f.name);
        CHECK(surf_rel_diff(total.coeff(MP), sphere.coeff(MP), 1.0) <= 1e-11);
        CHECK(surf_rel_diff(total.coeff(MT), sphere.coeff(MT), 1.0) <= 1e-11);
    }
}

TEST_CASE("sphere reduction report", "[verify]") {
    GeometryContext unit = make_context(1.0);
    for (const auto& f : catalog()) {
        ResidualReport rep = verify_sphere_reduction(f, unit);
        CAPTURE(f.name, rep.rel_max);
        CHECK(rep.pass);
        CHECK(rep.rel_max <= 1e-12);
    }
    auto fields = catalog();
    CHECK_THROWS_AS(verify_sphere_reduction(fields[0], make_context(1.5)), ConstructError);
}

TEST_CASE("double radial lie derivative on tangential sphere fields", "[verify]") {
    // with rho-independent tangential components, -d_rho omega reduces to -2 v_flat
    for (const char* name : {"Z1", "Z2"}) {
        auto fields = catalog();
        const AdmissibleField* f = find_field(fields, name);
        REQUIRE(f != nullptr);
        DifferentialForm v_flat = flat(f->full());
        auto w = detail::vorticity(v_flat);
        Expr ld_phi = restrict_rho1(-differentiate(w.rp, Var::rho));
        Expr ld_theta = restrict_rho1(-differentiate(w.rt, Var::rho));
        Expr expect_phi = constant(-2.0) * restrict_rho1(v_flat.coeff(0b010));
        Expr expect_theta = constant(-2.0) * restrict_rho1(v_flat.coeff(0b100));
        CAPTURE(name);
        CHECK(surf_rel_diff(ld_phi, expect_phi, 1.0) <= 1e-12);
        CHECK(surf_rel_diff(ld_theta, expect_theta, 1.0) <= 1e-12);
    }
}

TEST_CASE("gathered dphi assembly matches the term groups", "[verify]") {
    GeometryContext ctx = make_context(1.0);
    const uint8_t MP = forms::bit(1);
    Expr rho = geo::sym_rho(), phi = geo::sym_phi();
    Expr a2 = pow_int(geo::sym_a(), 2), one = constant(1.0), two = constant(2.0);
    Expr L = geo::lambda_sq();
    Expr sp = sin(phi), cp = cos(phi);

    for (const auto& f : catalog()) {
        RhsTerms t = rhs(f, ctx);
        DifferentialForm v_flat = flat(f.full());
        auto w = detail::vorticity(v_flat);

        // unsimplified double-lie coefficient, no product-rule rearrangement
        Expr c_lam = (one - a2) / (L * rho) * sp * cp;
        Expr a2_over_L = a2 / L;
        Expr G_raw =
            (-differentiate(w.rp + a2_over_L * differentiate(f.v_rho, Var::phi), Var::rho) +
             differentiate(a2_over_L * differentiate(f.v_rho, Var::rho) - c_lam * w.rp, Var::phi)) *
            (L / a2);

        Expr gathered = restrict_rho1(
            G_raw - differentiate(differentiate(f.v_rho, Var::rho), Var::phi) +
            ((L - a2 - two) / a2 + two / L) * w.rp -
            one / L * differentiate(v_flat.coeff(0b001), Var::phi));

        Expr assembled_phi = t.E_phi + t.lie_Y_term.coeff(MP) + t.last_term.coeff(MP);
        for (double a : {1.0, 1.5, 2.0}) {
            CAPTURE(f.name, a);
            CHECK(surf_rel_diff(gathered, assembled_phi, a) <= 1e-11);
        }
    }
}

TEST_CASE("left side splits into surface laplacian plus two terms", "[verify]") {
    GeometryContext ctx = make_context(1.0);
    const uint8_t MP = forms::bit(1);
    Expr rho = geo::sym_rho(), phi = geo::sym_phi();
    Expr a2 = pow_int(geo::sym_a(), 2), one = constant(1.0);
    Expr L = geo::lambda_sq();
    Expr sp = sin(phi), cp = cos(phi);

    for (const auto& f : catalog()) {
        RhsTerms t = rhs(f, ctx);
        DifferentialForm lhs_form = lhs(f, ctx);
        DifferentialForm v_flat = flat(f.full());
        auto w = detail::vorticity(v_flat);

        Expr split = t.laplacian_E.coeff(MP) +
                     restrict_rho1(-differentiate(w.rp, Var::rho) * (L / a2) -
                                   differentiate(w.rp * sp, Var::phi) *
                                       ((one - a2) * cp / (a2 * rho)));
        for (double a : {1.0, 1.4, 2.0}) {
            CAPTURE(f.name, a);
            CHECK(surf_rel_diff(lhs_form.coeff(MP), split, a) <= 1e-11);
        }
    }
}

TEST_CASE("single sign flips break the identity", "[verify]") {
    auto fields = catalog();
    const AdmissibleField* m1 = find_field(fields, "M1");
    const AdmissibleField* z1 = find_field(fields, "Z1");
    REQUIRE(m1 != nullptr);
    REQUIRE(z1 != nullptr);
    GeometryContext ctx = make_context(1.5);

    for (RhsGroup g : {RhsGroup::LaplacianE, RhsGroup::EOperator, RhsGroup::LieY,
                       RhsGroup::LastTerm}) {
        ResidualReport rep = verify_identity(*m1, ctx, GridSpec{17, 17}, 1e-9, g);
        CAPTURE(static_cast<int>(g), rep.rel_max);
        CHECK_FALSE(rep.pass);
        CHECK(rep.rel_max > 1e-3);
    }

    // zonal fields have no rho-phi vorticity, so they cannot see this flip;
    // that blind spot is why the catalog carries a mixed field
    ResidualReport blind = verify_identity(*z1, ctx, GridSpec{17, 17}, 1e-9, RhsGroup::LastTerm);
    CHECK(blind.pass);
    ResidualReport seen = verify_identity(*z1, ctx, GridSpec{17, 17}, 1e-9, RhsGroup::LieY);
    CHECK_FALSE(seen.pass);
}

TEST_CASE("eccentricity expansion has fourth order remainders", "[verify]") {
    std::vector<double> mu = {0.05, 0.1, 0.2, 0.3};
    auto fields = catalog();
    for (const char* name : {"Z1", "M1"}) {
        const AdmissibleField* f = find_field(fields, name);
        REQUIRE(f != nullptr);
        ExpansionReport rep = verify_expansion(*f, mu);
        CAPTURE(name, rep.slope_forms, rep.slope_components);
        CHECK(rep.pass);
        CHECK_FALSE(rep.degenerate_forms);
        CHECK_FALSE(rep.degenerate_components);
        CHECK(rep.slope_forms >= 3.7);
        CHECK(rep.slope_forms <= 4.6);
        CHECK(rep.slope_components >= 3.7);
        CHECK(rep.slope_components <= 4.6);
        CHECK(rep.slopes_agree);
        REQUIRE(rep.err_forms.size() == 4);
        CHECK(rep.err_forms.back() / rep.err_forms.front() > 300.0);
        CHECK(rep.err_components.back() / rep.err_components.front() > 300.0);
    }
}

TEST_CASE("zero fields report degenerate expansions instead of failing", "[verify]") {
    AdmissibleField zero{"zero", constant(0.0), constant(0.0), constant(0.0), false};
    ExpansionReport rep = verify_expansion(zero, {0.05, 0.2});
    CHECK(rep.degenerate_forms);
    CHECK(rep.degenerate_components);
    CHECK(rep.slopes_agree);
    CHECK(rep.pass);
}

TEST_CASE("expansion rejects out-of-range eccentricities", "[verify]") {
    auto fields = catalog();
    CHECK_THROWS_AS(verify_expansion(fields[0], {0.0, 0.1}), ConstructError);
    CHECK_THROWS_AS(verify_expansion(fields[0], {0.1, 0.4}), ConstructError);
    CHECK_THROWS_AS(verify_expansion(fields[0], {-0.2}), ConstructError);
}

TEST_CASE("truncations collapse to the sphere formula at zero eccentricity", "[verify]") {
    GeometryContext ctx = make_context(1.0);
    const uint8_t MP = forms::bit(1), MT = forms::bit(2);
    for (const auto& f : catalog()) {
        auto t1 = detail::truncation_forms(f, ctx);
        auto t2 = detail::truncation_components(f, ctx);
        DifferentialForm sphere =
            rhs(f, ctx).laplacian_E - constant(2.0) * pullback_E(flat(f.full()));
        CAPTURE(f.name);
        CHECK(surf_rel_diff(t1[0], sphere.coeff(MP), 1.0) <= 1e-12);
        CHECK(surf_rel_diff(t1[1], sphere.coeff(MT), 1.0) <= 1e-12);
        CHECK(surf_rel_diff(t2[0], sphere.coeff(MP), 1.0) <= 1e-12);
        CHECK(surf_rel_diff(t2[1], sphere.coeff(MT), 1.0) <= 1e-12);
    }
}

TEST_CASE("series partial sums respect the geometric tail bounds", "[verify]") {
    SeriesReport rep = check_series_bounds();
    CHECK(rep.pass);
    CHECK(rep.K == 8);
    CHECK_THAT(rep.geo_bound,
               Catch::Matchers::WithinRel(std::pow(0.3, 18) / (1.0 - 0.09), 1e-14));
    CHECK(rep.geo_max_err <= rep.geo_bound + 1e-15);
    CHECK(rep.dgeo_max_err <= rep.dgeo_bound + 1e-15);

    SeriesReport shallow = check_series_bounds(4, 0.3);
    CHECK(shallow.pass);
    SeriesReport tight = check_series_bounds(8, 0.2);
    CHECK(tight.pass);
}
