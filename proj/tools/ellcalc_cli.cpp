// Command line front end: field selection, half-axis / eccentricity sweeps,
// grid control, and JSON/CSV report output for the verifier suite.
//
// Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error
// (bad flags, unknown field, malformed expression or config file), 3 the
// adaptive quadrature refused to converge.

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ellcalc/ellcalc.hpp"

namespace {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RawOpts {
    std::string field, vphi, vtheta, a_list, mu_list, grid, out, config;
    std::string format = "json";
    double tol = 0.0;  // 0 = use the command default
    int threads = 0;   // 0 = env fallback, then 1
};

std::vector<double> parse_double_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        try {
            size_t pos = 0;
            double v = std::stod(tok, &pos);
            if (pos != tok.size()) throw std::invalid_argument(tok);
            out.push_back(v);
        } catch (const std::exception&) {
            throw ConfigError(std::string(what) + ": cannot parse '" + tok + "' as a number");
        }
    }
    if (out.empty()) throw ConfigError(std::string(what) + ": empty list");
    return out;
}

ellcalc::GridSpec parse_grid(const std::string& s, ellcalc::GridSpec fallback) {
    if (s.empty()) return fallback;
    auto x = s.find('x');
    if (x == std::string::npos) throw ConfigError("--grid expects the form NxM, got '" + s + "'");
    int np = 0, nt = 0;
    try {
        size_t p1 = 0, p2 = 0;
        np = std::stoi(s.substr(0, x), &p1);
        nt = std::stoi(s.substr(x + 1), &p2);
        if (p1 != x || p2 != s.size() - x - 1) throw std::invalid_argument(s);
    } catch (const std::exception&) {
        throw ConfigError("--grid expects the form NxM, got '" + s + "'");
    }
    if (np < 9 || nt < 9) throw ConfigError("--grid: at least 9 points per axis");
    ellcalc::GridSpec g = fallback;
    g.n_phi = np;
    g.n_theta = nt;
    return g;
}

size_t flag_count(CLI::App* sub, const std::string& name) {
    auto* opt = sub->get_option_no_throw(name);
    return opt ? opt->count() : 0;
}

std::string json_to_list_string(const nlohmann::json& v, const char* key) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number()) return ellcalc::csv_double(v.get<double>());
    if (v.is_array()) {
        std::string s;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(std::string("config: ") + key + " entries must be numbers");
            if (!s.empty()) s += ',';
            s += ellcalc::csv_double(e.get<double>());
        }
        return s;
    }
    throw ConfigError(std::string("config: unsupported value type for ") + key);
}

// flags win over config-file values; only untouched slots are filled here
void merge_config(RawOpts& o, CLI::App* active) {
    if (o.config.empty()) return;
    std::ifstream in(o.config);
    if (!in) throw ConfigError("cannot read config file '" + o.config + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config '" + o.config + "': " + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");

    auto fill_string = [&](const char* key, const char* flag, std::string& slot) {
        if (j.contains(key) && flag_count(active, flag) == 0) slot = json_to_list_string(j.at(key), key);
    };
    fill_string("field", "--field", o.field);
    fill_string("vphi", "--vphi", o.vphi);
    fill_string("vtheta", "--vtheta", o.vtheta);
    fill_string("a", "--a", o.a_list);
    fill_string("mu", "--mu", o.mu_list);
    fill_string("grid", "--grid", o.grid);
    fill_string("out", "--out", o.out);
    fill_string("format", "--format", o.format);
    if (j.contains("tol") && flag_count(active, "--tol") == 0) {
        if (!j.at("tol").is_number()) throw ConfigError("config: tol must be a number");
        o.tol = j.at("tol").get<double>();
    }
    if (j.contains("threads") && flag_count(active, "--threads") == 0) {
        if (!j.at("threads").is_number_integer()) throw ConfigError("config: threads must be an integer");
        o.threads = j.at("threads").get<int>();
    }
}

int resolve_threads(const RawOpts& o) {
    int t = o.threads;
    if (t == 0) {
        if (const char* env = std::getenv("ELLCALC_THREADS")) {
            try {
                size_t pos = 0;
                t = std::stoi(env, &pos);
                if (pos != std::string(env).size()) throw std::invalid_argument(env);
            } catch (const std::exception&) {
                throw ConfigError(std::string("ELLCALC_THREADS: invalid value '") + env + "'");
            }
        }
    }
    if (t == 0) t = 1;
    if (t < 1) throw ConfigError("--threads must be at least 1");
    return t;
}

double resolve_tol(const RawOpts& o, double fallback) {
    if (o.tol == 0.0) return fallback;
    if (!(o.tol > 0.0)) throw ConfigError("--tol must be positive");
    return o.tol;
}

ellcalc::AdmissibleField resolve_field(const RawOpts& o) {
    bool has_name = !o.field.empty();
    bool has_expr = !o.vphi.empty() || !o.vtheta.empty();
    if (has_name && has_expr)
        throw ConfigError("give either --field or the --vphi/--vtheta pair, not both");
    if (!has_name && !has_expr)
        throw ConfigError("no field selected: use --field NAME or --vphi EXPR --vtheta EXPR");
    if (has_name) {
        auto fields = ellcalc::catalog();
        const auto* f = ellcalc::find_field(fields, o.field);
        if (!f) {
            std::string names;
            for (const auto& g : fields) names += (names.empty() ? "" : ", ") + g.name;
            throw ConfigError("unknown field '" + o.field + "' (catalog: " + names + ")");
        }
        return *f;
    }
    if (o.vphi.empty() || o.vtheta.empty())
        throw ConfigError("--vphi and --vtheta must be given together");
    try {
        return ellcalc::make_admissible("custom", ellcalc::parse(o.vphi), ellcalc::parse(o.vtheta));
    } catch (const ellcalc::ParseError& e) {
        throw ConfigError(std::string("field expression: ") + e.what());
    }
}

// half-axis sweep from --a, or from --mu via a = 1/sqrt(1 - mu^2)
std::vector<double> resolve_half_axes(const RawOpts& o, const std::vector<double>& fallback) {
    bool has_a = !o.a_list.empty(), has_mu = !o.mu_list.empty();
    if (has_a && has_mu) throw ConfigError("give exactly one of --a and --mu");
    if (!has_a && !has_mu) {
        if (fallback.empty()) throw ConfigError("give exactly one of --a and --mu");
        return fallback;
    }
    if (has_a) {
        auto as = parse_double_list(o.a_list, "--a");
        for (double a : as)
            if (!(a > 0.0)) throw ConfigError("--a values must be positive");
        return as;
    }
    auto mus = parse_double_list(o.mu_list, "--mu");
    std::vector<double> as;
    for (double m : mus) {
        if (!(m > 0.0 && m < 1.0)) throw ConfigError("--mu values must lie in (0, 1)");
        as.push_back(1.0 / std::sqrt(1.0 - m * m));
    }
    return as;
}

void check_output_options(const RawOpts& o, bool residual_command, size_t runs) {
    if (o.format != "json" && o.format != "csv")
        throw ConfigError("unknown format '" + o.format + "' (json or csv)");
    if (o.format == "csv" && !o.out.empty()) {
        if (!residual_command)
            throw ConfigError("csv output is only available for residual commands");
        if (runs != 1) throw ConfigError("csv output needs a single half-axis value");
    }
}

void emit_json(const RawOpts& o, const std::string& cmdline, const nlohmann::json& results) {
    if (o.out.empty() || o.format != "json") return;
    ellcalc::write_json_report(o.out, cmdline, results);
    std::cout << "report written to " << o.out << "\n";
}

void emit_csv(const RawOpts& o, const ellcalc::ResidualReport& rep) {
    if (o.out.empty() || o.format != "csv") return;
    ellcalc::write_atomic(o.out, ellcalc::residual_csv(rep));
    std::cout << "report written to " << o.out << "\n";
}

void print_residual_header(const char* value_label) {
    std::cout << std::left << std::setw(10) << "field" << std::setw(10) << "a" << std::setw(10)
              << "grid" << std::setw(14) << value_label << std::setw(14) << "tolerance"
              << "status\n";
}

void print_residual_row(const ellcalc::ResidualReport& rep) {
    std::ostringstream grid;
    grid << rep.grid.n_phi << "x" << rep.grid.n_theta;
    std::cout << std::left << std::setw(10) << rep.field << std::setw(10) << rep.a
              << std::setw(10) << grid.str() << std::scientific << std::setprecision(3)
              << std::setw(14) << rep.rel_max << std::setw(14) << rep.tolerance
              << std::defaultfloat << (rep.pass ? "PASS" : "FAIL") << "\n";
}

void print_term_table(const ellcalc::ResidualReport& rep) {
    std::cout << "  " << std::left << std::setw(14) << "term" << std::setw(14) << "max|dphi|"
              << "max|dtheta|\n";
    for (const auto& row : rep.terms)
        std::cout << "  " << std::left << std::setw(14) << row.name << std::scientific
                  << std::setprecision(3) << std::setw(14) << row.max_dphi << row.max_dtheta
                  << std::defaultfloat << "\n";
}

int run_identity(const RawOpts& o, const std::string& cmdline, bool show_terms) {
    ellcalc::AdmissibleField field = resolve_field(o);
    std::vector<double> as = resolve_half_axes(o, {});
    ellcalc::GridSpec grid = parse_grid(o.grid, ellcalc::GridSpec{});
    double tol = resolve_tol(o, 1e-9);
    int threads = resolve_threads(o);
    check_output_options(o, true, as.size());
    bool keep_points = o.format == "csv" && !o.out.empty();

    nlohmann::json results = nlohmann::json::array();
    std::vector<ellcalc::ResidualReport> reps;
    for (double a : as) {
        ellcalc::GeometryContext ctx = ellcalc::make_context(a);
        reps.push_back(ellcalc::verify_identity(field, ctx, grid, tol, std::nullopt, threads,
                                                keep_points));
        results.push_back(ellcalc::to_json(reps.back()));
    }

    print_residual_header("rel_max");
    bool all_pass = true;
    for (const auto& rep : reps) {
        print_residual_row(rep);
        if (show_terms) print_term_table(rep);
        all_pass = all_pass && rep.pass;
    }
    emit_json(o, cmdline, results);
    if (!reps.empty()) emit_csv(o, reps.front());
    return all_pass ? 0 : 1;
}

int run_sphere(const RawOpts& o, const std::string& cmdline) {
    ellcalc::AdmissibleField field = resolve_field(o);
    ellcalc::GridSpec grid = parse_grid(o.grid, ellcalc::GridSpec{});
    double tol = resolve_tol(o, 1e-10);
    int threads = resolve_threads(o);
    check_output_options(o, true, 1);
    bool keep_points = o.format == "csv" && !o.out.empty();

    ellcalc::GeometryContext unit = ellcalc::make_context(1.0);
    ellcalc::ResidualReport rep =
        ellcalc::verify_sphere_reduction(field, unit, grid, tol, threads, keep_points);

    print_residual_header("max_abs");
    print_residual_row(rep);
    emit_json(o, cmdline, nlohmann::json::array({ellcalc::to_json(rep)}));
    emit_csv(o, rep);
    return rep.pass ? 0 : 1;
}

int run_expansion(const RawOpts& o, const std::string& cmdline) {
    ellcalc::AdmissibleField field = resolve_field(o);
    if (o.mu_list.empty()) throw ConfigError("expansion-order requires --mu");
    std::vector<double> mus = parse_double_list(o.mu_list, "--mu");
    ellcalc::GridSpec grid = parse_grid(o.grid, ellcalc::GridSpec{17, 17});
    int threads = resolve_threads(o);
    check_output_options(o, false, 1);

    ellcalc::ExpansionReport rep;
    try {
        rep = ellcalc::verify_expansion(field, mus, grid, threads);
    } catch (const ellcalc::ConstructError& e) {
        throw ConfigError(e.what());
    }

    std::cout << std::left << std::setw(10) << "mu" << std::setw(16) << "err_forms"
              << "err_components\n";
    for (size_t i = 0; i < rep.mu.size(); ++i)
        std::cout << std::left << std::setw(10) << rep.mu[i] << std::scientific
                  << std::setprecision(3) << std::setw(16) << rep.err_forms[i]
                  << rep.err_components[i] << std::defaultfloat << "\n";
    std::cout << "slope (forms):      " << rep.slope_forms
              << (rep.degenerate_forms ? " (degenerate)" : "") << "\n";
    std::cout << "slope (components): " << rep.slope_components
              << (rep.degenerate_components ? " (degenerate)" : "") << "\n";
    std::cout << "required minimum:   " << rep.min_slope
              << "   slopes agree: " << (rep.slopes_agree ? "yes" : "no") << "   "
              << (rep.pass ? "PASS" : "FAIL") << "\n";

    emit_json(o, cmdline, nlohmann::json::array({ellcalc::to_json(rep)}));
    return rep.pass ? 0 : 1;
}

int run_check_field(const RawOpts& o, const std::string& cmdline) {
    ellcalc::AdmissibleField field = resolve_field(o);
    std::vector<double> as = resolve_half_axes(o, {1.5});
    check_output_options(o, false, as.size());

    std::cout << "field: " << field.name
              << (field.quadrature_backed ? " (quadrature-backed radial part)" : "") << "\n";
    std::cout << std::left << std::setw(10) << "a" << std::setw(16) << "max|vrho|_E"
              << std::setw(16) << "max|div_E|" << std::setw(16) << "max|div3|"
              << "status\n";

    nlohmann::json results = nlohmann::json::array();
    bool all_pass = true;
    for (double a : as) {
        ellcalc::AdmissibilityReport rep = ellcalc::check_admissible(field, a);
        nlohmann::json jr = ellcalc::to_json(rep);
        jr["a"] = a;
        jr["field"] = field.name;
        results.push_back(jr);
        std::cout << std::left << std::setw(10) << a << std::scientific << std::setprecision(3)
                  << std::setw(16) << rep.vrho_surface_max << std::setw(16) << rep.dive_max
                  << std::setw(16) << rep.div3_max << std::defaultfloat
                  << (rep.pass ? "PASS" : "FAIL") << "\n";
        all_pass = all_pass && rep.pass;
    }
    emit_json(o, cmdline, results);
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    std::string cmdline;
    for (int i = 0; i < argc; ++i) {
        if (i) cmdline += ' ';
        cmdline += argv[i];
    }

    CLI::App app{"restriction identity checks on the ellipsoid chart"};
    app.require_subcommand(1);
    RawOpts o;

    auto add_field_opts = [&](CLI::App* sub) {
        sub->add_option("--field", o.field, "catalog field name (Z1, Z2, M1)");
        sub->add_option("--vphi", o.vphi, "phi component expression in rho, phi, theta, a");
        sub->add_option("--vtheta", o.vtheta, "theta component expression");
        sub->add_option("--config", o.config, "JSON config file; explicit flags win");
        sub->add_option("--out", o.out, "report output path");
        sub->add_option("--format", o.format, "report format: json or csv");
        sub->add_option("--threads", o.threads, "worker threads (env ELLCALC_THREADS)");
    };

    CLI::App* vi = app.add_subcommand("verify-identity",
                                      "compare both sides of the restriction identity");
    add_field_opts(vi);
    vi->add_option("--a", o.a_list, "comma separated half-axis values");
    vi->add_option("--mu", o.mu_list, "comma separated eccentricities in (0, 1)");
    vi->add_option("--grid", o.grid, "surface grid, e.g. 33x33");
    vi->add_option("--tol", o.tol, "relative residual tolerance");

    CLI::App* vs = app.add_subcommand("verify-sphere", "round-sphere reduction at a = 1");
    add_field_opts(vs);
    vs->add_option("--grid", o.grid, "surface grid, e.g. 33x33");
    vs->add_option("--tol", o.tol, "absolute residual tolerance");

    CLI::App* eo = app.add_subcommand("expansion-order",
                                      "remainder decay of the small-eccentricity truncations");
    add_field_opts(eo);
    eo->add_option("--mu", o.mu_list, "comma separated eccentricities in (0, 0.35]");
    eo->add_option("--grid", o.grid, "surface grid, e.g. 17x17");

    CLI::App* cf = app.add_subcommand("check-field", "admissibility diagnostics for a field");
    add_field_opts(cf);
    cf->add_option("--a", o.a_list, "comma separated half-axis values (default 1.5)");
    cf->add_option("--mu", o.mu_list, "comma separated eccentricities in (0, 1)");

    CLI::App* st = app.add_subcommand("show-terms",
                                      "per-term magnitude table for the right-hand side");
    add_field_opts(st);
    st->add_option("--a", o.a_list, "comma separated half-axis values");
    st->add_option("--mu", o.mu_list, "comma separated eccentricities in (0, 1)");
    st->add_option("--grid", o.grid, "surface grid, e.g. 33x33");
    st->add_option("--tol", o.tol, "relative residual tolerance");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    CLI::App* active = app.get_subcommands().front();
    try {
        merge_config(o, active);
        if (active == vi) return run_identity(o, cmdline, false);
        if (active == vs) return run_sphere(o, cmdline);
        if (active == eo) return run_expansion(o, cmdline);
        if (active == cf) return run_check_field(o, cmdline);
        if (active == st) return run_identity(o, cmdline, true);
        throw ConfigError("no command selected");
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const ellcalc::QuadratureError& e) {
        std::cerr << "quadrature error: " << e.what() << "\n";
        return 3;
    } catch (const ellcalc::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
