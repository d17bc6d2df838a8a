#include "reflectionless/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "reflectionless/errors.hpp"
#include "reflectionless/numerics.hpp"
#include "reflectionless/transforms.hpp"

namespace refl {

using nlohmann::json;

namespace {

const std::vector<std::string> kCommands = {"potential", "eigen",  "evolve",       "scatter",    "spectrum",
                                            "transform", "verify", "hirota-check", "phase-shift"};

std::vector<double> number_array(const json& j, const char* field) {
    if (!j.is_array()) throw ValidationError(std::string("field \"") + field + "\" must be an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number())
            throw ValidationError(std::string("field \"") + field + "\"[" + std::to_string(i) + "] is not a number");
        out.push_back(j[i].get<double>());
    }
    return out;
}

std::vector<double> grid_of(const RunConfig& rc, const SolitonConfig& cfg) {
    if (!rc.grid) return default_grid(cfg);
    if (rc.grid->points < 2) throw UsageError("--grid: npoints must be >= 2");
    if (!(rc.grid->xmin < rc.grid->xmax)) throw UsageError("--grid: need xmin < xmax");
    return linspace(rc.grid->xmin, rc.grid->xmax, rc.grid->points);
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SolitonConfig load_config(const RunConfig& rc) {
    if (rc.config_path.empty()) throw UsageError(rc.command + ": a config file is required");
    return parse_config(read_file(rc.config_path));
}

void require_format(const RunConfig& rc, std::initializer_list<const char*> allowed) {
    if (rc.format.empty()) return;
    for (const char* f : allowed)
        if (rc.format == f) return;
    throw UsageError(rc.command + " does not support --format " + rc.format);
}

json report_to_json(const VerificationReport& r) {
    return json{{"name", r.name},
                {"equation", r.equation},
                {"tolerance", r.tolerance},
                {"max_abs_deviation", r.max_abs_deviation},
                {"constancy", r.constancy},
                {"measured_constant", r.measured_constant},
                {"grid_points", r.grid.size()},
                {"excluded", r.excluded},
                {"pass", r.pass}};
}

// Rows of numbers as CSV.
class Csv {
public:
    explicit Csv(std::ostream& out) : out_(out) {}
    void header(const std::vector<std::string>& cols) {
        for (std::size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
        out_ << '\n';
    }
    void row(const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) out_ << (i ? "," : "") << format_double(v[i]);
        out_ << '\n';
    }

private:
    std::ostream& out_;
};

void emit_table(std::ostream& out, const std::string& format, const std::vector<std::string>& cols,
                const std::vector<std::vector<double>>& rows) {
    if (format == "json") {
        json j = json::object();
        for (std::size_t c = 0; c < cols.size(); ++c) {
            json col = json::array();
            for (const auto& r : rows) col.push_back(r[c]);
            j[cols[c]] = std::move(col);
        }
        out << j.dump(2) << '\n';
        return;
    }
    Csv csv(out);
    csv.header(cols);
    for (const auto& r : rows) csv.row(r);
}

std::vector<std::vector<double>> potential_rows(const SolitonConfig& cfg, const std::vector<double>& grid,
                                                int order) {
    std::vector<std::vector<double>> rows;
    for (double x : grid) {
        std::vector<double> row{x};
        if (order == 0) {
            row.push_back(potential(cfg, x));
        } else {
            const Jet u = potential_jet(cfg, x, order);
            for (int n = 0; n <= order; ++n) row.push_back(u.derivative(n));
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<std::string> potential_cols(int order) {
    std::vector<std::string> cols{"x", "U"};
    for (int n = 1; n <= order; ++n) cols.push_back("d" + std::to_string(n) + "U");
    return cols;
}

int cmd_potential(const RunConfig& rc, std::ostream& out) {
    require_format(rc, {"csv", "json"});
    const SolitonConfig cfg = load_config(rc);
    emit_table(out, rc.format, potential_cols(rc.order), potential_rows(cfg, grid_of(rc, cfg), rc.order));
    return kExitOk;
}

int cmd_eigen(const RunConfig& rc, std::ostream& out) {
    require_format(rc, {"csv", "json"});
    const SolitonConfig cfg = load_config(rc);
    const int n = cfg.size();
    std::vector<std::string> cols{"x"};
    for (int d = 0; d <= rc.order; ++d)
        for (int j = 1; j <= n; ++j) cols.push_back((d ? "d" + std::to_string(d) : std::string()) + "phi_" + std::to_string(j));
    std::vector<std::vector<double>> rows;
    for (double x : grid_of(rc, cfg)) {
        std::vector<Jet> phis;
        for (int j = 1; j <= n; ++j) phis.push_back(eigenfunction(cfg, j, x, rc.order));
        std::vector<double> row{x};
        for (int d = 0; d <= rc.order; ++d)
            for (const Jet& p : phis) row.push_back(p.derivative(d));
        rows.push_back(std::move(row));
    }
    emit_table(out, rc.format, cols, rows);
    return kExitOk;
}

int cmd_evolve(const RunConfig& rc, std::ostream& out) {
    require_format(rc, {"csv"});
    const SolitonConfig cfg = load_config(rc);
    if (rc.tgrid.points < 1) throw UsageError("--tgrid: n must be >= 1");
    const std::vector<double> ts = rc.tgrid.points == 1 ? std::vector<double>{rc.tgrid.xmin}
                                                        : linspace(rc.tgrid.xmin, rc.tgrid.xmax, rc.tgrid.points);
    const std::vector<double> grid = grid_of(rc, cfg);
    for (std::size_t i = 0; i < ts.size(); ++i) {
        SolitonConfig at = cfg;
        at.times[3] += ts[i];
        if (i) out << '\n';
        out << "# t=" << format_double(ts[i]) << '\n';
        emit_table(out, "csv", potential_cols(rc.order), potential_rows(at, grid, rc.order));
    }
    return kExitOk;
}

int cmd_scatter(const RunConfig& rc, std::ostream& out) {
    require_format(rc, {"csv", "json"});
    const SolitonConfig cfg = load_config(rc);
    const std::vector<double> ks = rc.k.empty() ? std::vector<double>{0.5, 1.7, 3.1} : rc.k;
    ScatterOptions opts;
    if (rc.tol) opts.rk_tol = *rc.tol;
    std::vector<std::vector<double>> rows;
    for (double k : ks) {
        const ScatteringResult s = scatter([&cfg](double x) { return potential(cfg, x); }, k, opts);
        const std::complex<double> expected = reflectionless_transmission(cfg.k, k);
        const double phase_err = std::abs(std::arg(s.transmission_amp / expected));
        rows.push_back({k, s.reflection_amp.real(), s.reflection_amp.imag(), s.transmission_amp.real(),
                        s.transmission_amp.imag(), std::abs(s.reflection_amp), s.unitarity_defect, phase_err});
    }
    emit_table(out, rc.format, {"k", "re_r", "im_r", "re_t", "im_t", "abs_r", "unitarity_defect", "phase_error"},
               rows);
    return kExitOk;
}

int cmd_spectrum(const RunConfig& rc, std::ostream& out) {
    require_format(rc, {"csv", "json"});
    const SolitonConfig cfg = load_config(rc);
    const SpectrumResult s = bound_spectrum(cfg, rc.step);
    const std::vector<double> exact = [&] {
        std::vector<double> e = cfg.energies();
        std::sort(e.begin(), e.end());
        return e;
    }();
    std::vector<std::vector<double>> rows;
    for (std::size_t i = 0; i < s.energies.size(); ++i) {
        const double ex = i < exact.size() ? exact[i] : NAN;
        rows.push_back({static_cast<double>(i + 1), s.energies[i], ex, std::abs(s.energies[i] - ex)});
    }
    emit_table(out, rc.format, {"index", "E", "expected", "abs_error"}, rows);
    return kExitOk;
}

int cmd_transform(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    require_format(rc, {"json"});
    const SolitonConfig cfg = load_config(rc);
    TransformResult r;
    if (rc.scheme == "darboux-ground") {
        r = darboux_ground(cfg);
    } else if (rc.scheme == "krein-adler") {
        if (rc.deleted.empty()) throw UsageError("krein-adler needs --delete");
        r = krein_adler_delete(cfg, rc.deleted, rc.unsafe);
        if (r.singular) err << "warning: Krein-Adler condition fails; output is singular\n";
    } else if (rc.scheme == "am-delete") {
        if (rc.deleted.empty()) throw UsageError("am-delete needs --delete");
        r = am_delete(cfg, rc.deleted);
    } else if (rc.scheme == "am-add") {
        if (rc.e.empty()) throw UsageError("am-add needs --e j=value");
        r = am_add(cfg, rc.e);
    } else {
        throw UsageError("--scheme must be one of darboux-ground, krein-adler, am-delete, am-add");
    }
    out << config_to_json(r.after) << '\n';
    return kExitOk;
}

int cmd_verify(const RunConfig& rc, std::ostream& out) {
    require_format(rc, {"json"});
    std::vector<VerificationReport> reports;
    const std::uint64_t seed = rc.seed.value_or(FuzzOptions{}.seed);
    if (rc.fuzz > 0) {
        FuzzOptions opts;
        opts.seed = seed;
        opts.configs = rc.fuzz;
        reports = run_identity_suite(opts);
    }
    if (!rc.config_path.empty()) {
        const SolitonConfig cfg = load_config(rc);
        const std::vector<double> grid = grid_of(rc, cfg);
        if (rc.all) {
            auto part = verify_all(cfg, seed, grid);
            reports.insert(reports.end(), part.begin(), part.end());
        } else if (!rc.identity.empty()) {
            const int n = cfg.size();
            std::vector<int> everything(static_cast<std::size_t>(n));
            for (int j = 0; j < n; ++j) everything[static_cast<std::size_t>(j)] = j + 1;
            const std::vector<int> d = rc.deleted.empty() ? everything : rc.deleted;
            const int j = d.empty() ? 1 : d.front();
            const int l = d.size() > 1 ? d[1] : j;
            if (rc.identity == "wronskian") reports.push_back(verify_wronskian_identity(cfg, d, grid));
            else if (rc.identity == "bilinear") reports.push_back(verify_bilinear_derivative(cfg, j, l, grid));
            else if (rc.identity == "deletion") reports.push_back(verify_deletion_determinant(cfg, d, grid));
            else if (rc.identity == "addition") {
                std::map<int, double> e = rc.e;
                if (e.empty())
                    for (int q : d) e[q] = 1.0;
                reports.push_back(verify_addition_determinant(cfg, e, grid));
            } else if (rc.identity == "tau-split") reports.push_back(verify_tau_split(cfg, j, grid));
            else if (rc.identity == "seed-wronskian")
                reports.push_back(verify_seed_wronskian(cfg.k, soliton_to_seed(cfg), grid));
            else
                throw UsageError("--identity must be one of wronskian, bilinear, deletion, addition, tau-split, "
                                 "seed-wronskian");
        } else {
            throw UsageError("verify: give --all or --identity <name>");
        }
    } else if (rc.fuzz <= 0) {
        throw UsageError("verify: give a config file or --fuzz N");
    }
    bool pass = true;
    for (auto& r : reports) {
        if (rc.tol) {
            r.tolerance = *rc.tol;
            const bool pointwise = r.name.rfind("bilinear", 0) == 0 || r.name.rfind("tau_split", 0) == 0;
            const bool seed = r.name.rfind("seed_wronskian", 0) == 0;
            if (seed) r.pass = r.constancy <= r.tolerance && r.max_abs_deviation <= r.tolerance;
            else r.pass = (pointwise ? r.max_abs_deviation : r.constancy) <= r.tolerance;
        }
        pass = pass && r.pass;
    }
    out << report_json(reports, pass) << '\n';
    return pass ? kExitOk : kExitVerifyFailed;
}

int cmd_hirota(const RunConfig& rc, std::ostream& out) {
    require_format(rc, {"csv", "json"});
    const SolitonConfig cfg = load_config(rc);
    const double tol = rc.tol.value_or(1e-11);
    std::vector<std::vector<double>> rows;
    double worst = 0.0;
    for (double x : grid_of(rc, cfg)) {
        const TauEval d = tau_det(cfg, x, 0);
        const LogValue h = tau_hirota(cfg, x);
        const double log_det = std::log(std::abs(d.jet[0])) + d.gauge_exponent;
        const double rel = std::abs(std::expm1(log_det - h.log_abs));
        worst = std::max(worst, rel);
        rows.push_back({x, log_det, h.log_abs, rel});
    }
    emit_table(out, rc.format, {"x", "log_tau_det", "log_tau_hirota", "rel_diff"}, rows);
    return worst <= tol ? kExitOk : kExitVerifyFailed;
}

int cmd_phase(const RunConfig& rc, std::ostream& out) {
    require_format(rc, {"json"});
    const SolitonConfig cfg = load_config(rc);
    const PhaseShiftReport p = phase_shift_check(cfg, rc.big_t);
    const double tol = rc.tol.value_or(1e-3);
    json j{{"T", rc.big_t},
           {"expected_shift_fast", p.expected_shift_fast},
           {"expected_shift_slow", p.expected_shift_slow},
           {"measured_slow", {p.measured[0][0], p.measured[0][1]}},
           {"measured_fast", {p.measured[1][0], p.measured[1][1]}},
           {"max_deviation", p.max_deviation},
           {"tolerance", tol},
           {"pass", p.max_deviation <= tol}};
    out << j.dump(2) << '\n';
    return p.max_deviation <= tol ? kExitOk : kExitVerifyFailed;
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

SolitonConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ValidationError("config must be a JSON object");
    for (const auto& [key, _] : j.items())
        if (key != "k" && key != "c" && key != "times") throw ValidationError("unknown field \"" + key + "\"");
    if (!j.contains("k")) throw ValidationError("missing field \"k\"");
    if (!j.contains("c")) throw ValidationError("missing field \"c\"");
    std::map<int, double> times;
    if (j.contains("times")) {
        const json& t = j["times"];
        if (!t.is_object()) throw ValidationError("field \"times\" must be an object");
        for (const auto& [key, val] : t.items()) {
            int idx = 0;
            const auto res = std::from_chars(key.data(), key.data() + key.size(), idx);
            if (res.ec != std::errc{} || res.ptr != key.data() + key.size())
                throw ValidationError("times key \"" + key + "\" is not an integer");
            if (!val.is_number()) throw ValidationError("times[\"" + key + "\"] is not a number");
            times[idx] = val.get<double>();
        }
    }
    return SolitonConfig::make(number_array(j["k"], "k"), number_array(j["c"], "c"), times);
}

std::string config_to_json(const SolitonConfig& cfg) {
    json j{{"k", cfg.k}, {"c", cfg.c}};
    if (!cfg.times.empty()) {
        json t = json::object();
        for (const auto& [key, v] : cfg.times) t[std::to_string(key)] = v;
        j["times"] = t;
    }
    return j.dump();
}

std::string report_json(const std::vector<VerificationReport>& reports, bool pass) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    return json{{"pass", pass}, {"count", reports.size()}, {"reports", arr}}.dump(2);
}

RunConfig parse_args(const std::vector<std::string>& args, std::string* help) {
    RunConfig rc;
    CLI::App app{"Reflectionless potentials: tau functions, deformations and identity checks", "reflectionless"};
    app.add_option("command", rc.command, "Command to run")->required()->check(CLI::IsMember(kCommands));
    app.add_option("config", rc.config_path, "JSON config file");

    std::vector<double> grid, tgrid;
    app.add_option("--grid", grid, "xmin xmax npoints")->expected(3)->allow_extra_args(false);
    app.add_option("--tgrid", tgrid, "t0 t1 n for evolve")->expected(3)->allow_extra_args(false);
    app.add_option("-o,--output", rc.output, "Output file (default: stdout)");
    app.add_option("--format", rc.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    std::uint64_t seed = 0;
    auto* seed_opt = app.add_option("--seed", seed, "Random seed for fuzzing");
    app.add_option("--order", rc.order, "Derivative order of the emitted columns")->check(CLI::Range(0, 12));
    app.add_option("--k", rc.k, "Scattering wavenumber (repeatable)");
    app.add_option("--scheme", rc.scheme, "darboux-ground | krein-adler | am-delete | am-add");
    app.add_option("--delete", rc.deleted, "Indices i,j,... (1-based)")->delimiter(',');
    std::vector<std::string> e_args;
    app.add_option("--e", e_args, "j=value for am-add (repeatable)");
    app.add_flag("--unsafe", rc.unsafe, "Allow Krein-Adler output that violates the condition");
    app.add_flag("--all", rc.all, "Verify every identity on the config");
    app.add_option("--identity", rc.identity, "Single identity to verify");
    app.add_option("--fuzz", rc.fuzz, "Run the identity suite on this many random configs");
    double tol = 0.0;
    auto* tol_opt = app.add_option("--tol", tol, "Override tolerance");
    app.add_option("--T", rc.big_t, "Half time span for phase-shift");
    app.add_option("--step", rc.step, "Grid step for spectrum");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        if (help) *help = app.help();
        return rc;
    } catch (const CLI::ParseError& e) {
        throw UsageError(e.what());
    }

    if (!grid.empty()) {
        if (grid[2] != std::floor(grid[2])) throw UsageError("--grid: npoints must be an integer");
        rc.grid = GridSpec{grid[0], grid[1], static_cast<int>(grid[2])};
        if (rc.grid->points < 2) throw UsageError("--grid: npoints must be >= 2");
        if (!(rc.grid->xmin < rc.grid->xmax)) throw UsageError("--grid: need xmin < xmax");
    }
    if (!tgrid.empty()) {
        if (tgrid[2] != std::floor(tgrid[2]) || tgrid[2] < 1) throw UsageError("--tgrid: n must be a positive integer");
        rc.tgrid = GridSpec{tgrid[0], tgrid[1], static_cast<int>(tgrid[2])};
    }
    if (*seed_opt) rc.seed = seed;
    if (*tol_opt) {
        if (!(tol > 0.0)) throw UsageError("--tol must be positive");
        rc.tol = tol;
    }
    for (const std::string& s : e_args) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw UsageError("--e expects j=value, got '" + s + "'");
        try {
            std::size_t used = 0;
            const int j = std::stoi(s.substr(0, eq), &used);
            if (used != eq) throw std::invalid_argument(s);
            const double v = std::stod(s.substr(eq + 1), &used);
            if (used != s.size() - eq - 1) throw std::invalid_argument(s);
            rc.e[j] = v;
        } catch (const std::logic_error&) {
            throw UsageError("--e expects j=value, got '" + s + "'");
        }
    }
    return rc;
}

int run(const RunConfig& rc, std::ostream& out, std::ostream& err) {
    std::ofstream file;
    std::ostream* sink = &out;
    if (!rc.output.empty()) {
        file.open(rc.output, std::ios::binary);
        if (!file) throw UsageError("cannot open output file '" + rc.output + "'");
        sink = &file;
    }
    std::ostringstream buf;
    int code = kExitOk;
    if (rc.command == "potential") code = cmd_potential(rc, buf);
    else if (rc.command == "eigen") code = cmd_eigen(rc, buf);
    else if (rc.command == "evolve") code = cmd_evolve(rc, buf);
    else if (rc.command == "scatter") code = cmd_scatter(rc, buf);
    else if (rc.command == "spectrum") code = cmd_spectrum(rc, buf);
    else if (rc.command == "transform") code = cmd_transform(rc, buf, err);
    else if (rc.command == "verify") code = cmd_verify(rc, buf);
    else if (rc.command == "hirota-check") code = cmd_hirota(rc, buf);
    else if (rc.command == "phase-shift") code = cmd_phase(rc, buf);
    else throw UsageError("unknown command '" + rc.command + "'");
    *sink << buf.str();
    sink->flush();
    return code;
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        std::string help;
        const RunConfig rc = parse_args(args, &help);
        if (!help.empty()) {
            out << help;
            return kExitOk;
        }
        return run(rc, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const SingularityError& e) {
        err << "numerical error: " << e.what() << " at x=" << format_double(e.location) << '\n';
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

}  // namespace refl
