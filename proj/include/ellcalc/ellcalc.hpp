#pragma once

// Umbrella header for the ellcalc library.

#include "expr.hpp"       // IWYU pragma: export
#include "parse.hpp"      // IWYU pragma: export
#include "geometry.hpp"   // IWYU pragma: export
#include "forms.hpp"      // IWYU pragma: export
#include "quadrature.hpp" // IWYU pragma: export
#include "divfree.hpp"    // IWYU pragma: export
#include "verify.hpp"     // IWYU pragma: export
#include "report.hpp"     // IWYU pragma: export
