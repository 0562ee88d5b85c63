// Command-line front end: scattering reports, parameter sweeps, spin
// textures, polarizing-point searches and the closed-form/oracle
// consistency check.
//
// Exit codes: 0 success, 2 invalid input, 3 junction resonance,
// 4 consistency-check failure, 5 I/O failure.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <ringpol/ringpol.hpp>

using namespace ringpol;

namespace {

constexpr double kNearPolarizedThreshold = 1e-2;
constexpr double kReflectionlessEps = 1e-3;

struct CliOptions {
    std::string config_path;
    std::string out_path;
    std::string format_str;
    std::string case_str;
    std::string input_str;
    bool degrees = false;
    double so_ratio = std::nan("");
    double ka = std::nan("");
    double gamma1 = std::nan("");
    double gamma2 = std::nan("");
    std::uint64_t seed = 42;
    int samples = -1;

    // flag presence, filled from CLI11 counts after parsing
    bool has_so = false, has_ka = false, has_g1 = false, has_g2 = false;
    bool has_out = false, has_format = false, has_case = false, has_samples = false;
    bool has_input = false;
};

void add_common_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--config", o.config_path, "JSON run configuration");
    cmd->add_option("--out", o.out_path, "output file (default: stdout)");
    cmd->add_option("--format", o.format_str, "output format: csv or json");
}

void add_physics_flags(CLI::App* cmd, CliOptions& o) {
    cmd->add_option("--so-ratio", o.so_ratio, "spin-orbit strength omega/Omega");
    cmd->add_option("--ka", o.ka, "lead wavenumber times ring radius");
    cmd->add_option("--gamma1", o.gamma1, "first output junction angle");
    cmd->add_option("--gamma2", o.gamma2, "second output junction angle");
    cmd->add_flag("--degrees", o.degrees, "interpret --gamma1/--gamma2 in degrees");
}

bool flag_given(CLI::App* cmd, const std::string& name) {
    const CLI::Option* opt = cmd->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

void capture_presence(CLI::App* cmd, CliOptions& o) {
    o.has_so = flag_given(cmd, "--so-ratio");
    o.has_ka = flag_given(cmd, "--ka");
    o.has_g1 = flag_given(cmd, "--gamma1");
    o.has_g2 = flag_given(cmd, "--gamma2");
    o.has_out = flag_given(cmd, "--out");
    o.has_format = flag_given(cmd, "--format");
    o.has_case = flag_given(cmd, "--case");
    o.has_samples = flag_given(cmd, "--samples");
    o.has_input = flag_given(cmd, "--input");
}

io::RunConfig load_effective_config(const CliOptions& o) {
    io::RunConfig cfg;
    if (!o.config_path.empty()) cfg = io::load_config(o.config_path);
    const double scale = o.degrees ? kPi / 180.0 : 1.0;
    if (o.has_so || o.has_ka) {
        RingParams p = cfg.params.value_or(RingParams{});
        if (o.has_so) p.so_ratio = o.so_ratio;
        if (o.has_ka) p.ka = o.ka;
        cfg.params = p;
    }
    if (o.has_g1 || o.has_g2) {
        RingGeometry g = cfg.geometry.value_or(RingGeometry{});
        if (o.has_g1) g.gamma1 = o.gamma1 * scale;
        if (o.has_g2) g.gamma2 = o.gamma2 * scale;
        cfg.geometry = g;
    }
    if (o.has_out) cfg.output.path = o.out_path;
    if (o.has_format) cfg.output.format = io::format_from_string(o.format_str);
    if (o.has_case && cfg.sweep) cfg.sweep->case_tag = polar::case_from_string(o.case_str);
    if (o.has_samples && cfg.sweep) cfg.sweep->samples = o.samples;
    if (o.has_input) {
        polar::InputMode mode;
        if (o.input_str == "eigen") mode.kind = polar::InputKind::eigen_mixture;
        else if (o.input_str == "sz") mode.kind = polar::InputKind::sz_mixture;
        else throw std::invalid_argument("--input must be 'eigen' or 'sz' (pure states via config)");
        cfg.input_mode = mode;
    }
    return cfg;
}

RingParams require_params(const io::RunConfig& cfg) {
    if (!cfg.params) throw std::invalid_argument("missing parameters: set --so-ratio/--ka or config 'params'");
    validate(*cfg.params);
    return *cfg.params;
}

RingGeometry require_geometry(const io::RunConfig& cfg) {
    if (!cfg.geometry) throw std::invalid_argument("missing geometry: set --gamma1/--gamma2 or config 'geometry'");
    validate(*cfg.geometry);
    return *cfg.geometry;
}

search::SweepSpec require_sweep(const io::RunConfig& cfg) {
    if (!cfg.sweep) throw std::invalid_argument("this command needs a 'sweep' block in the config");
    search::validate(*cfg.sweep);
    return *cfg.sweep;
}

std::vector<std::pair<std::string, std::string>> base_metadata(const std::string& command) {
    return {{"tool", "ringpol"}, {"version", kVersion}, {"command", command}};
}

void meta_num(std::vector<std::pair<std::string, std::string>>& m, const std::string& k, double v) {
    m.emplace_back(k, io::fmt17(v));
}

// ---------------------------------------------------------------------------
// transmit
// ---------------------------------------------------------------------------

std::string fmt_cplx(const cplx& z) {
    return io::fmt17(z.real()) + (z.imag() < 0.0 ? " - " : " + ") + io::fmt17(std::abs(z.imag())) + "i";
}

int cmd_transmit(const CliOptions& o) {
    const io::RunConfig cfg = load_effective_config(o);
    const RingParams p = require_params(cfg);
    const RingGeometry g = require_geometry(cfg);
    const DerivedParams d = derive(p);
    const transport::ScatteringSolution sol = transport::solve_scattering(g, d);
    const double res_a = polar::condition_residual(g, d, polar::PolarizationCase::a);
    const double res_b = polar::condition_residual(g, d, polar::PolarizationCase::b);
    const double ndet[2] = {polar::normalized_det(sol.tr.t[0]), polar::normalized_det(sol.tr.t[1])};

    if (cfg.output.path.empty() && !o.has_format) {
        // Human-readable report.
        std::cout << "so_ratio = " << io::fmt17(p.so_ratio) << "\n"
                  << "ka       = " << io::fmt17(p.ka) << "\n"
                  << "gamma1   = " << io::fmt17(g.gamma1) << "\n"
                  << "gamma2   = " << io::fmt17(g.gamma2) << "\n";
        const char* names[2] = {"T1", "T2"};
        for (int n = 0; n < 2; ++n) {
            const Mat2& t = sol.tr.t[n];
            std::cout << names[n] << " up<-up     = " << fmt_cplx(t.m[0][0]) << "\n"
                      << names[n] << " up<-down   = " << fmt_cplx(t.m[0][1]) << "\n"
                      << names[n] << " down<-up   = " << fmt_cplx(t.m[1][0]) << "\n"
                      << names[n] << " down<-down = " << fmt_cplx(t.m[1][1]) << "\n";
        }
        std::cout << "R diagonal  = " << fmt_cplx(sol.tr.r_diag) << "\n"
                  << "eta1 = " << io::fmt17(sol.eta[0]) << "\n"
                  << "eta2 = " << io::fmt17(sol.eta[1]) << "\n"
                  << "reflect_prob = " << io::fmt17(sol.reflect_prob) << "\n"
                  << "conservation_residual = " << io::fmt17(sol.conservation_residual) << "\n"
                  << "condition_residual_case_a = " << io::fmt17(res_a) << "\n"
                  << "condition_residual_case_b = " << io::fmt17(res_b) << "\n"
                  << "normalized_det_lead1 = " << io::fmt17(ndet[0]) << "\n"
                  << "normalized_det_lead2 = " << io::fmt17(ndet[1]) << "\n"
                  << "near_polarized_lead1 = " << (ndet[0] < kNearPolarizedThreshold ? "yes" : "no") << "\n"
                  << "near_polarized_lead2 = " << (ndet[1] < kNearPolarizedThreshold ? "yes" : "no") << "\n";
        return 0;
    }

    io::Table t;
    t.metadata = base_metadata("transmit");
    t.columns = {"so_ratio", "ka", "gamma1", "gamma2",
                 "t1_uu_re", "t1_uu_im", "t1_ud_re", "t1_ud_im",
                 "t1_du_re", "t1_du_im", "t1_dd_re", "t1_dd_im",
                 "t2_uu_re", "t2_uu_im", "t2_ud_re", "t2_ud_im",
                 "t2_du_re", "t2_du_im", "t2_dd_re", "t2_dd_im",
                 "r_re", "r_im", "eta1", "eta2", "reflect_prob",
                 "conservation_residual", "residual_a", "residual_b",
                 "normalized_det1", "normalized_det2",
                 "near_polarized1", "near_polarized2"};
    std::vector<io::Cell> row = {p.so_ratio, p.ka, g.gamma1, g.gamma2};
    for (int n = 0; n < 2; ++n)
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j) {
                row.emplace_back(sol.tr.t[n].m[i][j].real());
                row.emplace_back(sol.tr.t[n].m[i][j].imag());
            }
    for (double v : {sol.tr.r_diag.real(), sol.tr.r_diag.imag(), sol.eta[0], sol.eta[1],
                     sol.reflect_prob, sol.conservation_residual, res_a, res_b, ndet[0], ndet[1],
                     ndet[0] < kNearPolarizedThreshold ? 1.0 : 0.0,
                     ndet[1] < kNearPolarizedThreshold ? 1.0 : 0.0})
        row.emplace_back(v);
    t.rows.push_back(std::move(row));
    io::write_table(cfg.output.path, cfg.output.format, t);
    return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

void append_sweep_metadata(io::Table& t, const search::SweepSpec& spec, const RingParams& p,
                           const RingGeometry& g, const search::SweepResult& res) {
    t.metadata.emplace_back("variable", search::to_string(spec.variable));
    meta_num(t.metadata, "range_lo", spec.lo);
    meta_num(t.metadata, "range_hi", spec.hi);
    t.metadata.emplace_back("samples", std::to_string(spec.samples));
    t.metadata.emplace_back("case", polar::to_string(spec.case_tag));
    t.metadata.emplace_back("geometry_rule", spec.rule.use_family ? "family" : "fixed");
    if (spec.rule.use_family) {
        t.metadata.emplace_back("family_anchor",
                                spec.rule.family.anchor == polar::FamilyAnchor::fixed_gamma2
                                    ? "gamma2" : "gamma1");
        t.metadata.emplace_back("family_index", std::to_string(spec.rule.family.index));
        t.metadata.emplace_back("family_sign", std::to_string(spec.rule.family.sign));
    }
    meta_num(t.metadata, "base_so_ratio", p.so_ratio);
    meta_num(t.metadata, "base_ka", p.ka);
    meta_num(t.metadata, "base_gamma1", g.gamma1);
    meta_num(t.metadata, "base_gamma2", g.gamma2);
    t.metadata.emplace_back("clipped", res.clipped ? "yes" : "no");
    meta_num(t.metadata, "grid_lo", res.clip_lo);
    meta_num(t.metadata, "grid_hi", res.clip_hi);
}

io::Table points_table(const std::vector<polar::PolarizationPoint>& pts) {
    io::Table t;
    t.columns = {"case", "so_ratio", "ka", "gamma1", "gamma2", "residual",
                 "eta1", "eta2", "one_minus_eta", "reflect_prob",
                 "normalized_det1", "normalized_det2", "fidelity1", "fidelity2",
                 "out1_up_re", "out1_up_im", "out1_down_re", "out1_down_im",
                 "out2_up_re", "out2_up_im", "out2_down_re", "out2_down_im",
                 "reflectionless"};
    for (const auto& pt : pts) {
        std::vector<io::Cell> row;
        row.emplace_back(polar::to_string(pt.case_tag));
        for (double v : {pt.params.so_ratio, pt.params.ka, pt.geom.gamma1, pt.geom.gamma2,
                         pt.residual, pt.eta1, pt.eta2, 1.0 - pt.eta1 - pt.eta2, pt.reflect_prob,
                         pt.ndet1, pt.ndet2, pt.fidelity1, pt.fidelity2,
                         pt.out.lead1.up.real(), pt.out.lead1.up.imag(),
                         pt.out.lead1.down.real(), pt.out.lead1.down.imag(),
                         pt.out.lead2.up.real(), pt.out.lead2.up.imag(),
                         pt.out.lead2.down.real(), pt.out.lead2.down.imag(),
                         (1.0 - pt.eta1 - pt.eta2 < kReflectionlessEps) ? 1.0 : 0.0})
            row.emplace_back(v);
        t.rows.push_back(std::move(row));
    }
    return t;
}

std::vector<polar::PolarizationPoint> points_both_cases(const search::SweepSpec& spec,
                                                        const RingGeometry& g,
                                                        const RingParams& p, bool both) {
    std::vector<polar::PolarizationPoint> pts;
    std::vector<polar::PolarizationCase> cases;
    if (both) cases = {polar::PolarizationCase::a, polar::PolarizationCase::b};
    else cases = {spec.case_tag};
    for (auto c : cases) {
        search::SweepSpec s = spec;
        s.case_tag = c;
        auto found = search::find_polarization_points(s, g, p);
        pts.insert(pts.end(), found.begin(), found.end());
    }
    std::stable_sort(pts.begin(), pts.end(),
                     [](const polar::PolarizationPoint& a, const polar::PolarizationPoint& b) {
                         return a.params.ka < b.params.ka;
                     });
    return pts;
}

int cmd_sweep(const CliOptions& o) {
    const io::RunConfig cfg = load_effective_config(o);
    const search::SweepSpec spec = require_sweep(cfg);
    const RingParams p = require_params(cfg);
    const RingGeometry g = require_geometry(cfg);
    const search::SweepResult res = search::sweep(spec, g, p);

    io::Table t;
    t.metadata = base_metadata("sweep");
    append_sweep_metadata(t, spec, p, g, res);
    t.columns = {"value", "gamma1", "gamma2", "eta1", "eta2", "reflect_prob",
                 "residual_a", "residual_b"};
    for (const auto& row : res.rows) {
        std::vector<io::Cell> cells;
        cells.emplace_back(row.x);
        if (row.valid) {
            for (double v : {row.gamma1, row.gamma2, row.eta1, row.eta2, row.reflect,
                             row.residual_a, row.residual_b})
                cells.emplace_back(v);
        } else {
            for (int i = 0; i < 7; ++i) cells.push_back(io::Cell::none());
        }
        t.rows.push_back(std::move(cells));
    }
    io::write_table(cfg.output.path, cfg.output.format, t);

    if (!cfg.output.points_path.empty()) {
        const auto pts = points_both_cases(spec, g, p, !o.has_case);
        io::Table pt = points_table(pts);
        pt.metadata = base_metadata("sweep/points");
        append_sweep_metadata(pt, spec, p, g, res);
        io::write_table(cfg.output.points_path, cfg.output.format, pt);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// points
// ---------------------------------------------------------------------------

int cmd_points(const CliOptions& o) {
    const io::RunConfig cfg = load_effective_config(o);
    const search::SweepSpec spec = require_sweep(cfg);
    const RingParams p = require_params(cfg);
    const RingGeometry g = require_geometry(cfg);
    const auto pts = points_both_cases(spec, g, p, !o.has_case);

    io::Table t = points_table(pts);
    t.metadata = base_metadata("points");
    const search::SweepResult res = search::sweep(spec, g, p);
    append_sweep_metadata(t, spec, p, g, res);
    t.metadata.emplace_back("points_found", std::to_string(pts.size()));
    io::write_table(cfg.output.path, cfg.output.format, t);
    return 0;
}

// ---------------------------------------------------------------------------
// texture
// ---------------------------------------------------------------------------

int cmd_texture(const CliOptions& o) {
    const io::RunConfig cfg = load_effective_config(o);
    const RingParams p = require_params(cfg);
    const RingGeometry g = require_geometry(cfg);
    const DerivedParams d = derive(p);
    const polar::InputMode mode = cfg.input_mode.value_or(polar::InputMode{});
    int n = cfg.texture_samples;
    if (o.has_samples) n = o.samples;
    if (n < 2) throw std::invalid_argument("texture needs at least 2 samples");

    std::vector<double> angles(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        angles[static_cast<std::size_t>(i)] = 2.0 * kPi * static_cast<double>(i) / (n - 1);
    const auto samples = polar::spin_texture(g, d, mode, angles);

    io::Table t;
    t.metadata = base_metadata("texture");
    meta_num(t.metadata, "so_ratio", p.so_ratio);
    meta_num(t.metadata, "ka", p.ka);
    meta_num(t.metadata, "gamma1", g.gamma1);
    meta_num(t.metadata, "gamma2", g.gamma2);
    switch (mode.kind) {
        case polar::InputKind::eigen_mixture: t.metadata.emplace_back("input_mode", "eigen_mixture"); break;
        case polar::InputKind::sz_mixture: t.metadata.emplace_back("input_mode", "sz_mixture"); break;
        case polar::InputKind::pure_state: t.metadata.emplace_back("input_mode", "pure"); break;
    }
    t.columns = {"phi", "segment", "prob1", "prob2", "bloch_x", "bloch_y", "bloch_z", "purity"};
    for (const auto& s : samples) {
        t.rows.push_back({io::Cell(s.phi), io::Cell(static_cast<double>(s.segment)),
                          io::Cell(s.prob[0]), io::Cell(s.prob[1]), io::Cell(s.bloch.x),
                          io::Cell(s.bloch.y), io::Cell(s.bloch.z), io::Cell(s.purity)});
    }
    io::write_table(cfg.output.path, cfg.output.format, t);
    return 0;
}

// ---------------------------------------------------------------------------
// oracle-check
// ---------------------------------------------------------------------------

int cmd_oracle_check(const CliOptions& o) {
    const int samples = o.has_samples ? o.samples : 200;
    if (samples < 1) throw std::invalid_argument("oracle-check needs at least 1 sample");
    constexpr double kTolEquiv = 1e-9;
    constexpr double kTolCurrent = 1e-10;

    DeterministicRng rng(o.seed);
    double worst_t = 0.0, worst_r = 0.0, worst_a = 0.0;
    double worst_balance = 0.0, worst_conservation = 0.0, worst_solve = 0.0, worst_cond = 0.0;
    for (int it = 0; it < samples; ++it) {
        const auto tup = rng.scattering_tuple();
        const DerivedParams d = derive(tup.params);
        const auto sys = oracle::assemble(tup.geom, d, tup.f);
        const auto osol = oracle::solve(sys);
        const auto tr = transport::transmission(tup.geom, d, d.ka);
        const Spinor t1 = tr.t[0] * tup.f;
        const Spinor t2 = tr.t[1] * tup.f;
        const Spinor r{tr.r_diag * tup.f.up, tr.r_diag * tup.f.down};
        worst_t = std::max({worst_t, std::abs(t1.up - osol.t1.up), std::abs(t1.down - osol.t1.down),
                            std::abs(t2.up - osol.t2.up), std::abs(t2.down - osol.t2.down)});
        worst_r = std::max({worst_r, std::abs(r.up - osol.r.up), std::abs(r.down - osol.r.down)});
        const auto cf = transport::ring_coefficients(tup.geom, d, d.ka, tup.f);
        for (int seg = 0; seg < 3; ++seg)
            for (int mu = 0; mu < 2; ++mu)
                for (int j = 0; j < 2; ++j)
                    worst_a = std::max(worst_a,
                                       std::abs(cf.a[seg][mu][j] - osol.coeffs.a[seg][mu][j]));
        worst_balance = std::max(worst_balance, oracle::junction_balance(sys, osol).max());
        const auto sol = transport::solve_scattering(tup.geom, d);
        worst_conservation = std::max(worst_conservation, sol.conservation_residual);
        worst_solve = std::max(worst_solve, osol.report.residual);
        worst_cond = std::max(worst_cond, osol.report.condition);
    }

    struct Check {
        const char* name;
        double value;
        double tol;
    };
    const Check checks[] = {
        {"transmission amplitudes agree", worst_t, kTolEquiv},
        {"reflection amplitudes agree", worst_r, kTolEquiv},
        {"ring coefficients agree", worst_a, kTolEquiv},
        {"junction current balance", worst_balance, kTolCurrent},
        {"closed-form probability conservation", worst_conservation, kTolCurrent},
        {"boundary solve residual", worst_solve, kTolCurrent},
    };

    std::cout << "# oracle-check seed=" << o.seed << " samples=" << samples << "\n"
              << "# version=" << kVersion << "\n"
              << "# distributions: so_ratio uniform [0,5]; ka uniform (0.1,12];"
                 " gamma1 uniform (0.05, 2*pi-0.15); gamma2 uniform (gamma1+0.02, 2*pi-0.02);"
                 " input spinor uniform on the complex unit square, normalized\n";
    bool all_pass = true;
    for (const auto& c : checks) {
        const bool pass = c.value < c.tol;
        all_pass = all_pass && pass;
        std::cout << (pass ? "PASS " : "FAIL ") << c.name << ": max deviation "
                  << io::fmt17(c.value) << " (tolerance " << io::fmt17(c.tol) << ")\n";
    }
    std::cout << "max boundary-system condition number: " << io::fmt17(worst_cond) << "\n";
    std::cout << "overall: " << (all_pass ? "PASS" : "FAIL") << "\n";
    return all_pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Exact spin-dependent transport through a one-dimensional ring\n"
                 "with Rashba spin-orbit coupling and three attached leads."};
    app.require_subcommand(1);
    CliOptions o;

    CLI::App* transmit = app.add_subcommand(
        "transmit", "transmission/reflection matrices and probabilities at one point");
    add_common_flags(transmit, o);
    add_physics_flags(transmit, o);

    CLI::App* sweep = app.add_subcommand(
        "sweep", "walk one parameter and tabulate transmissions and residuals");
    add_common_flags(sweep, o);
    add_physics_flags(sweep, o);
    sweep->add_option("--case", o.case_str, "polarization case: a or b");
    sweep->add_option("--samples", o.samples, "grid sample count");

    CLI::App* points = app.add_subcommand(
        "points", "locate and refine polarizing parameter points");
    add_common_flags(points, o);
    add_physics_flags(points, o);
    points->add_option("--case", o.case_str, "restrict to one polarization case");
    points->add_option("--samples", o.samples, "grid sample count");

    CLI::App* texture = app.add_subcommand(
        "texture", "spin state resolved along the ring circumference");
    add_common_flags(texture, o);
    add_physics_flags(texture, o);
    texture->add_option("--samples", o.samples, "number of angles in [0, 2*pi]");
    texture->add_option("--input", o.input_str, "input mixture: eigen or sz");

    CLI::App* oracle_check = app.add_subcommand(
        "oracle-check", "closed forms vs independent boundary-condition solve");
    oracle_check->add_option("--seed", o.seed, "random seed");
    oracle_check->add_option("--samples", o.samples, "number of random tuples");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        capture_presence(sub, o);
        if (sub == transmit) return cmd_transmit(o);
        if (sub == sweep) return cmd_sweep(o);
        if (sub == points) return cmd_points(o);
        if (sub == texture) return cmd_texture(o);
        if (sub == oracle_check) return cmd_oracle_check(o);
        return 2;
    } catch (const resonance_error& e) {
        std::cerr << "resonance: " << e.what() << "\n";
        return 3;
    } catch (const io::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 5;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
