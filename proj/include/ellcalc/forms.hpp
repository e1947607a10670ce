#pragma once

// Exterior calculus on the chart: differential forms with symbolic
// coefficients, exterior derivative, Hodge stars for the ambient metric and
// for the induced surface metric, interior products, Lie derivatives via the
// Cartan formula, and the two Hodge Laplacians used by the verifier.
//
// Sign conventions, fixed once here:
//   ambient (n = 3):  -lap v = star d star d v   on 1-forms (coclosed input)
//   surface (n = 2):  -lap_E alpha = -star_E d_E star_E d_E alpha  on 1-forms
// Both stars are built generically from the metric; the closed-form star
// identities quoted in the tests are regression anchors, not the definition.

#include <map>

#include "expr.hpp"
#include "geometry.hpp"

namespace ellcalc {

// Sparse form: key is a bitmask over coordinate indices {0:rho, 1:phi,
// 2:theta}; popcount(key) == degree; zero coefficients are omitted. Surface
// forms live on rho = 1 and never use bit 0.
struct DifferentialForm {
    bool surface = false;
    int degree = 0;
    std::map<uint8_t, Expr> coeffs;

    Expr coeff(uint8_t mask) const {
        auto it = coeffs.find(mask);
        return it == coeffs.end() ? constant(0.0) : it->second;
    }

    void set(uint8_t mask, Expr e) {
        if (e.is_zero()) coeffs.erase(mask);
        else coeffs[mask] = e;
    }

    void accumulate(uint8_t mask, Expr e) { set(mask, coeff(mask) + e); }
};

namespace forms {

constexpr uint8_t bit(int i) { return static_cast<uint8_t>(1u << i); }

inline int popcount(uint8_t m) {
    int n = 0;
    while (m) { n += m & 1u; m >>= 1; }
    return n;
}

inline Var var_of_index(int i) {
    return i == 0 ? Var::rho : (i == 1 ? Var::phi : Var::theta);
}

}  // namespace forms

inline DifferentialForm ambient_0form(Expr f) {
    DifferentialForm w{false, 0, {}};
    w.set(0, f);
    return w;
}

inline DifferentialForm ambient_1form(Expr c_rho, Expr c_phi, Expr c_theta) {
    DifferentialForm w{false, 1, {}};
    w.set(forms::bit(0), c_rho);
    w.set(forms::bit(1), c_phi);
    w.set(forms::bit(2), c_theta);
    return w;
}

inline DifferentialForm surface_0form(Expr f) {
    DifferentialForm w{true, 0, {}};
    w.set(0, f);
    return w;
}

inline DifferentialForm surface_1form(Expr c_phi, Expr c_theta) {
    DifferentialForm w{true, 1, {}};
    w.set(forms::bit(1), c_phi);
    w.set(forms::bit(2), c_theta);
    return w;
}

inline DifferentialForm operator+(const DifferentialForm& x, const DifferentialForm& y) {
    if (x.surface != y.surface || x.degree != y.degree)
        throw ConstructError("form sum: mismatched shapes");
    DifferentialForm r = x;
    for (const auto& [m, c] : y.coeffs) r.accumulate(m, c);
    return r;
}

inline DifferentialForm operator-(const DifferentialForm& x) {
    DifferentialForm r{x.surface, x.degree, {}};
    for (const auto& [m, c] : x.coeffs) r.set(m, -c);
    return r;
}

inline DifferentialForm operator-(const DifferentialForm& x, const DifferentialForm& y) {
    return x + (-y);
}

inline DifferentialForm operator*(Expr s, const DifferentialForm& x) {
    DifferentialForm r{x.surface, x.degree, {}};
    for (const auto& [m, c] : x.coeffs) r.set(m, s * c);
    return r;
}

// d on the chart (surface forms differentiate in phi, theta only)
inline DifferentialForm exterior_derivative(const DifferentialForm& w) {
    int top = w.surface ? 2 : 3;
    if (w.degree >= top) {
        DifferentialForm r{w.surface, w.degree + 1, {}};
        return r;  // identically zero, kept for d(d(...)) chains
    }
    DifferentialForm r{w.surface, w.degree + 1, {}};
    int first = w.surface ? 1 : 0;
    for (const auto& [mask, c] : w.coeffs) {
        for (int i = first; i < 3; ++i) {
            if (mask & forms::bit(i)) continue;
            Expr dc = differentiate(c, forms::var_of_index(i));
            if (dc.is_zero()) continue;
            int below = forms::popcount(static_cast<uint8_t>(mask & (forms::bit(i) - 1)));
            r.accumulate(static_cast<uint8_t>(mask | forms::bit(i)), (below % 2) ? -dc : dc);
        }
    }
    return r;
}

// interior product with an ambient vector field (contraction in the first slot)
inline DifferentialForm interior_product(const VectorField3& X, const DifferentialForm& w) {
    if (w.surface) throw ConstructError("interior_product: ambient forms only");
    if (w.degree == 0) return DifferentialForm{false, 0, {}};  // iota annihilates functions
    DifferentialForm r{false, w.degree - 1, {}};
    for (const auto& [mask, c] : w.coeffs) {
        int pos = 0;
        for (int i = 0; i < 3; ++i) {
            if (!(mask & forms::bit(i))) continue;
            Expr term = X.comp(i) * c;
            r.accumulate(static_cast<uint8_t>(mask & ~forms::bit(i)), (pos % 2) ? -term : term);
            ++pos;
        }
    }
    return r;
}

// Cartan formula; for 0-forms this is X(f)
inline DifferentialForm lie_derivative(const VectorField3& X, const DifferentialForm& w) {
    if (w.surface) throw ConstructError("lie_derivative: ambient forms only");
    DifferentialForm d_iota{false, w.degree, {}};
    if (w.degree > 0) d_iota = exterior_derivative(interior_product(X, w));
    DifferentialForm iota_d = interior_product(X, exterior_derivative(w));
    return w.degree > 0 ? iota_d + d_iota : iota_d;
}

// musical isomorphisms for the ambient metric
inline DifferentialForm flat(const VectorField3& v) {
    Metric3 g = geo::metric3();
    std::array<Expr, 3> lowered;
    for (int i = 0; i < 3; ++i) {
        std::vector<Expr> terms;
        for (int j = 0; j < 3; ++j) terms.push_back(g.at(i, j) * v.comp(j));
        lowered[i] = sum(terms);
    }
    return ambient_1form(lowered[0], lowered[1], lowered[2]);
}

inline VectorField3 sharp(const DifferentialForm& w) {
    if (w.surface || w.degree != 1) throw ConstructError("sharp: ambient 1-forms only");
    auto ginv = geo::metric3_inverse();
    std::array<Expr, 3> raised;
    for (int i = 0; i < 3; ++i) {
        std::vector<Expr> terms;
        for (int j = 0; j < 3; ++j) terms.push_back(ginv[i][j] * w.coeff(forms::bit(j)));
        raised[i] = sum(terms);
    }
    return VectorField3{raised[0], raised[1], raised[2]};
}

// ambient Hodge star, built from the inverse metric and the volume density
inline DifferentialForm hodge_star3(const DifferentialForm& w) {
    if (w.surface) throw ConstructError("hodge_star3: ambient forms only");
    Expr sg = geo::sqrt_det_g3();
    auto ginv = geo::metric3_inverse();
    DifferentialForm r{false, 3 - w.degree, {}};
    switch (w.degree) {
        case 0:
            r.set(0b111, w.coeff(0) * sg);
            break;
        case 1: {
            // raise the index, then contract with the volume form
            std::array<Expr, 3> up;
            for (int i = 0; i < 3; ++i) {
                std::vector<Expr> t;
                for (int j = 0; j < 3; ++j) t.push_back(ginv[i][j] * w.coeff(forms::bit(j)));
                up[i] = sum(t);
            }
            r.set(0b110, sg * up[0]);
            r.set(0b101, -(sg * up[1]));
            r.set(0b011, sg * up[2]);
            break;
        }
        case 2: {
            // w^{ij} = g^{ik} g^{jl} w_{kl} with w_{kl} antisymmetric
            auto lower = [&w](int k, int l) -> Expr {
                if (k == l) return constant(0.0);
                uint8_t m = static_cast<uint8_t>(forms::bit(k) | forms::bit(l));
                Expr c = w.coeff(m);
                return k < l ? c : -c;
            };
            auto up = [&](int i, int j) -> Expr {
                std::vector<Expr> t;
                for (int k = 0; k < 3; ++k)
                    for (int l = 0; l < 3; ++l) {
                        if (k == l) continue;
                        t.push_back(ginv[i][k] * ginv[j][l] * lower(k, l));
                    }
                return sum(t);
            };
            r.set(forms::bit(0), sg * up(1, 2));
            r.set(forms::bit(1), -(sg * up(0, 2)));
            r.set(forms::bit(2), sg * up(0, 1));
            break;
        }
        case 3:
            r.set(0, w.coeff(0b111) / sg);
            break;
        default:
            throw ConstructError("hodge_star3: bad degree");
    }
    return r;
}

// surface Hodge star for the induced metric at rho = 1
inline DifferentialForm hodge_star2(const DifferentialForm& w) {
    if (!w.surface) throw ConstructError("hodge_star2: surface forms only");
    Metric2 g = geo::metric2();
    Expr sg = restrict_rho1(geo::sqrt_det_g2());
    DifferentialForm r{true, 2 - w.degree, {}};
    switch (w.degree) {
        case 0:
            r.set(0b110, w.coeff(0) * sg);
            break;
        case 1: {
            // diagonal surface metric: raising is division
            Expr up_phi = w.coeff(forms::bit(1)) / g.pp;
            Expr up_theta = w.coeff(forms::bit(2)) / g.tt;
            r.set(forms::bit(1), -(sg * up_theta));
            r.set(forms::bit(2), sg * up_phi);
            break;
        }
        case 2:
            r.set(0, w.coeff(0b110) / sg);
            break;
        default:
            throw ConstructError("hodge_star2: bad degree");
    }
    return r;
}

// pullback along the inclusion of the rho = 1 surface: drop every term
// containing drho, then restrict the remaining coefficients
inline DifferentialForm pullback_E(const DifferentialForm& w) {
    if (w.surface) return w;
    DifferentialForm r{true, w.degree, {}};
    for (const auto& [mask, c] : w.coeffs) {
        if (mask & forms::bit(0)) continue;
        r.set(mask, restrict_rho1(c));
    }
    return r;
}

// -lap on ambient 1-forms, valid for the coclosed inputs the verifier uses
inline DifferentialForm hodge_laplacian3(const DifferentialForm& v_flat) {
    if (v_flat.surface || v_flat.degree != 1)
        throw ConstructError("hodge_laplacian3: ambient 1-forms only");
    return hodge_star3(exterior_derivative(hodge_star3(exterior_derivative(v_flat))));
}

// -lap_E on surface 1-forms: delta_E d_E with delta_E = -star_E d_E star_E
inline DifferentialForm hodge_laplacian_E(const DifferentialForm& alpha) {
    if (!alpha.surface || alpha.degree != 1)
        throw ConstructError("hodge_laplacian_E: surface 1-forms only");
    return -hodge_star2(exterior_derivative(hodge_star2(exterior_derivative(alpha))));
}

}  // namespace ellcalc
