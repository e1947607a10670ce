// Sweep the half axis for every catalog field and print the residual of the
// restriction identity. Shows the plain library workflow: pick a field, make
// a geometry context, verify, read the report.

#include <cstdio>

#include "ellcalc/ellcalc.hpp"

int main() {
    std::printf("%-8s %-6s %-12s %-12s %s\n", "field", "a", "rel_max", "worst@phi", "status");
    for (const auto& field : ellcalc::catalog()) {
        for (double a : {1.0, 1.2, 1.5, 2.0, 3.0}) {
            ellcalc::GeometryContext ctx = ellcalc::make_context(a);
            double tol = field.quadrature_backed ? 1e-7 : 1e-9;
            ellcalc::ResidualReport rep = ellcalc::verify_identity(field, ctx, {}, tol);
            std::printf("%-8s %-6.2f %-12.3e %-12.4f %s\n", rep.field.c_str(), rep.a,
                        rep.rel_max, rep.worst.phi, rep.pass ? "PASS" : "FAIL");
        }
    }
    return 0;
}
