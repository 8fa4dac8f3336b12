#include "vortexlab/pipeline.hpp"
#include "vortexlab/errors.hpp"
#include "vortexlab/explicit_solutions.hpp"
#include "vortexlab/field_io.hpp"
#include "vortexlab/gauge.hpp"
#include "vortexlab/sinh_gordon.hpp"
#include "vortexlab/stencils.hpp"
#include "vortexlab/vekua.hpp"

#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace vortexlab {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {
json divisor_json(const VortexDivisor& d) {
    json out = json::array();
    for (const auto& e : d.entries)
        out.push_back({{"re", e.point.real()}, {"im", e.point.imag()}, {"multiplicity", e.multiplicity}});
    return out;
}

json barrier_json(const BarrierReport& b) {
    json out;
    out["b"] = b.b;
    out["l"] = b.l;
    out["bprime"] = b.bprime;
    out["lprime"] = b.lprime;
    out["sigma"] = b.sigma;
    out["eta"] = b.eta;
    out["t2_plain"] = b.t2_plain;
    out["t2_sigma"] = b.t2_sigma;
    out["threshold_sup"] = b.threshold_sup;
    out["threshold_sub"] = b.threshold_sub;
    out["C_plus"] = b.C_plus ? json(*b.C_plus) : json(nullptr);
    out["C_minus"] = b.C_minus ? json(*b.C_minus) : json(nullptr);
    out["ordered_pair"] = b.ordered_pair;
    out["cert_plus_at"] = b.cert_plus_at;
    out["cert_minus_at"] = b.cert_minus_at;
    return out;
}

void write_report(const json& rep, const fs::path& dir) {
    std::ofstream os(dir / "report.json");
    if (!os) throw IoError("report: cannot open " + (dir / "report.json").string());
    os << rep.dump(2) << "\n";
}

json base_report(const RunConfig& cfg, const std::string& command) {
    json rep;
    rep["schema_version"] = kReportSchemaVersion;
    rep["command"] = command;
    rep["config_echo"] = cfg.canonical_text();
    rep["seed"] = cfg.seed;
    rep["grid"] = {{"n", cfg.grid.n}, {"extent", cfg.grid.extent}, {"spacing", cfg.grid.spacing()}};
    return rep;
}

struct Stopwatch {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

int do_generate(const RunConfig& cfg, const fs::path& dir, json& rep) {
    const auto& g = *cfg.generate;
    const double R = g.R.value_or(cfg.grid.extent);
    auto mask = build_mask(cfg.grid, R, {});

    SolutionFields s;
    if (g.family == "plane-wave") {
        s = generate_plane_wave(mask, g.c1, g.c2, g.sign);
    } else if (g.family == "divisor") {
        FamilyParams fp{g.c1, g.c2, g.theta, g.divisor};
        s = generate_divisor_solution(mask, fp);
    } else {
        if (g.c2.imag() != 0.0)
            throw ConfigError("generate: the higgs family needs real c2");
        s = generate_higgs_solution(mask, g.c1, g.c2.real());
    }

    write_field(s.A0, (dir / "a0.vortx").string());
    write_field(s.A1, (dir / "a1.vortx").string());
    write_field(s.psi1, (dir / "psi1.vortx").string());
    write_field(s.psi2, (dir / "psi2.vortx").string());
    if (s.higgs) write_field(*s.higgs, (dir / "phi.vortx").string());
    if (cfg.csv_export) {
        write_field_csv(s.A0, (dir / "a0.csv").string());
        write_field_csv(s.A1, (dir / "a1.csv").string());
        write_field_csv(s.psi1, (dir / "psi1.csv").string());
        write_field_csv(s.psi2, (dir / "psi2.csv").string());
        if (s.higgs) write_field_csv(*s.higgs, (dir / "phi.csv").string());
    }

    if (s.higgs) {
        const HiggsResiduals hr = residual_higgs(s);
        rep["residuals"] = {{"r1", hr.r1}, {"r2", hr.r2}, {"r3", hr.r3}, {"r4", hr.r4},
                            {"connection_reality_mismatch", hr.reality_mismatch}};
    } else {
        const MainEqResiduals mr = residual_maineq(s);
        rep["residuals"] = {{"r1", mr.r1}, {"r2", mr.r2}, {"r3", mr.r3}};
        const VortexDivisor rec = divisor_of(s);
        rep["zero_count"] = rec.degree();
        rep["recovered_divisor"] = divisor_json(rec);
    }
    const FluxResult fx = flux(s.A0, s.A1);
    rep["flux"] = fx.flux;
    rep["flux_over_2pi"] = fx.over_2pi;
    return kExitOk;
}

int do_solve(const RunConfig& cfg, const fs::path& dir, json& rep) {
    const SinhGordonProblem p = cfg.make_problem();
    const SolveResult r = solve_bvp(p);

    write_field(r.v, (dir / "v.vortx").string());
    write_field(r.u, (dir / "u.vortx").string());
    write_field(r.G, (dir / "G.vortx").string());
    write_field(r.r, (dir / "r.vortx").string());
    write_field(r.h, (dir / "h.vortx").string());
    if (cfg.csv_export) {
        write_field_csv(r.v, (dir / "v.csv").string());
        write_field_csv(r.u, (dir / "u.csv").string());
    }

    rep["residual_sup"] = r.residual_sup;
    rep["farfield_residual"] = r.farfield_residual;
    rep["newton_iters"] = r.newton_iters;
    rep["barrier"] = barrier_json(r.barrier);
    rep["monotone_ok"] = r.monotone_ok;
    rep["divisor"] = divisor_json(p.divisor);
    const std::vector<double> charges = distributional_charge(r.u, p.divisor, p.eps);
    rep["charges"] = charges;
    return kExitOk;
}

int do_refine(const RunConfig& cfg, const fs::path& dir, json& rep) {
    (void)dir;
    const auto& rf = *cfg.refine;
    SinhGordonProblem base = cfg.make_problem();
    const ConvergenceReport cr =
        nested_refinement(base, rf.eps_schedule, rf.R_schedule, rf.K_inner, rf.K_outer);
    json steps = json::array();
    for (const auto& s : cr.steps)
        steps.push_back({{"eps", s.eps}, {"R", s.R}, {"n", s.n}, {"residual_sup", s.residual_sup}});
    rep["steps"] = steps;
    rep["sup_diffs"] = cr.sup_diffs;
    rep["non_increasing"] = cr.non_increasing;
    rep["completed"] = cr.completed;
    if (!cr.completed) {
        rep["abort_reason"] = cr.abort_reason;
        return kExitSolver;
    }
    return kExitOk;
}

RealField require_real(AnyField f, const std::string& what) {
    if (auto* r = std::get_if<RealField>(&f)) return *r;
    throw ConfigError(what + ": expected a real field file");
}

ComplexField require_complex(AnyField f, const std::string& what) {
    if (auto* c = std::get_if<ComplexField>(&f)) return *c;
    throw ConfigError(what + ": expected a complex field file");
}

int do_verify(const RunConfig& cfg, const fs::path& dir, json& rep) {
    (void)dir;
    const auto& v = *cfg.verify;
    SolutionFields s;
    s.A0 = require_real(read_field(v.a0), "verify a0");
    s.A1 = require_real(read_field(v.a1), "verify a1");
    s.psi1 = require_complex(read_field(v.psi1), "verify psi1");
    s.psi2 = require_complex(read_field(v.psi2), "verify psi2");
    const MainEqResiduals mr = residual_maineq(s);
    rep["residuals"] = {{"r1", mr.r1}, {"r2", mr.r2}, {"r3", mr.r3}};
    rep["tolerances"] = {{"r1", v.tol_r1}, {"r2", v.tol_r2}, {"r3", v.tol_r3}};
    // decay-envelope diagnostics when the domain is large enough; reported,
    // never asserted
    if (s.psi1.mask->R >= 4.0) {
        try {
            const PropertyEFit fit = property_E_fit(s.psi1, s.psi2);
            const char* verdict = fit.verdict == EnvelopeVerdict::Consistent ? "consistent"
                                  : fit.verdict == EnvelopeVerdict::Inconsistent ? "inconsistent"
                                                                                 : "degenerate";
            rep["decay_fit"] = {{"M1", fit.M1},       {"M2", fit.M2},
                                {"N1", fit.N1},       {"N2", fit.N2},
                                {"rate1", fit.rate1}, {"rate2", fit.rate2},
                                {"verdict", verdict},
                                {"lambda_phase_dev", fit.lambda_phase_dev}};
        } catch (const GeometryError&) {
            rep["decay_fit"] = nullptr;
        }
    }
    const bool ok = mr.r1 <= v.tol_r1 && mr.r2 <= v.tol_r2 && mr.r3 <= v.tol_r3;
    rep["pass"] = ok;
    return ok ? kExitOk : kExitVerifyFail;
}

int do_vekua(const RunConfig& cfg, const fs::path& dir, json& rep) {
    (void)dir;
    const auto& vk = *cfg.vekua;
    if (vk.op == "toperator") {
        if (vk.field.empty()) throw ConfigError("[vekua]: toperator needs a field file");
        const ComplexField f = require_complex(read_field(vk.field), "vekua field");
        if (vk.points.empty()) throw ConfigError("[vekua]: toperator needs at least one point");
        const std::vector<cplx> vals = t_operator(f, vk.points);
        json pts = json::array();
        for (size_t k = 0; k < vals.size(); ++k)
            pts.push_back({{"re", vk.points[k].real()},
                           {"im", vk.points[k].imag()},
                           {"T_re", vals[k].real()},
                           {"T_im", vals[k].imag()}});
        rep["t_operator"] = pts;
    } else if (vk.op == "similarity") {
        if (vk.field.empty()) throw ConfigError("[vekua]: similarity needs a field file");
        const ComplexField w = require_complex(read_field(vk.field), "vekua field");
        VekuaCoeffs coeffs{sample_complex(w.mask, [&](cplx) { return vk.coeff_A; }),
                           sample_complex(w.mask, [&](cplx) { return vk.coeff_B; }), std::nullopt};
        const Factorization fac = similarity_factor(w, coeffs);
        rep["similarity"] = {{"cr_residual", fac.cr_residual},
                             {"branch_nodes", fac.branch_nodes},
                             {"degenerate", fac.degenerate}};
    } else if (vk.op == "lpnu") {
        std::function<cplx(cplx)> f;
        if (vk.profile == "constant")
            f = [](cplx) { return cplx(1.0, 0.0); };
        else if (vk.profile == "rational-decay")
            f = [](cplx z) { return cplx(1.0, 0.0) / std::pow(1.0 + std::norm(z), 2.0); };
        else
            throw ConfigError("[vekua]: unknown lpnu profile '" + vk.profile + "'");
        const LpnuResult r = lpnu_norms(f, vk.p, vk.nu);
        rep["lpnu"] = {{"norm_inner", r.norm_inner},
                       {"norm_inverted", r.norm_inverted},
                       {"member", r.member},
                       {"growth_ratio", r.growth_ratio}};
    } else {
        const DecayZeroRadius r = decay_zero_radius(vk.M, vk.N);
        rep["decay_zero_radius"] = {{"radius", r.radius}, {"zeros_possible", r.zeros_possible}};
    }
    return kExitOk;
}

int do_energy(const RunConfig& cfg, const fs::path& dir, json& rep) {
    (void)dir;
    const auto& e = *cfg.energy;
    const RealField A0 = require_real(read_field(e.a0), "energy a0");
    const RealField A1 = require_real(read_field(e.a1), "energy a1");
    const ComplexField phi = require_complex(read_field(e.phi), "energy phi");
    const EnergyReport er = bogomolny_split(A0, A1, phi);
    rep["energy"] = {{"ymh_direct", er.ymh_direct},
                     {"ymh_bogomolny", er.ymh_bogomolny},
                     {"part_grad_plus", er.part_grad_plus},
                     {"part_grad_minus", er.part_grad_minus},
                     {"part_potential", er.part_potential},
                     {"part_exact_form", er.part_exact_form},
                     {"flux", er.flux},
                     {"flux_over_2pi", er.flux_over_2pi},
                     {"defect", er.defect}};
    const TaubesResiduals tr = residual_taubes(A0, A1, phi);
    rep["taubes_residuals"] = {{"r1", tr.r1}, {"r2", tr.r2}};
    return kExitOk;
}
} // namespace

int run_pipeline(const RunConfig& cfg, const std::string& command, const std::string& out_dir) {
    const fs::path dir(out_dir);
    fs::create_directories(dir);
    json rep = base_report(cfg, command);
    Stopwatch watch;
    int code = kExitOk;
    try {
        if (command == "generate") {
            if (!cfg.generate) throw ConfigError("generate: missing [generate] section");
            code = do_generate(cfg, dir, rep);
        } else if (command == "solve") {
            code = do_solve(cfg, dir, rep);
        } else if (command == "refine") {
            if (!cfg.refine) throw ConfigError("refine: missing [refine] section");
            code = do_refine(cfg, dir, rep);
        } else if (command == "verify") {
            if (!cfg.verify) throw ConfigError("verify: missing [verify] section");
            code = do_verify(cfg, dir, rep);
        } else if (command == "vekua") {
            if (!cfg.vekua) throw ConfigError("vekua: missing [vekua] section");
            code = do_vekua(cfg, dir, rep);
        } else if (command == "energy") {
            if (!cfg.energy) throw ConfigError("energy: missing [energy] section");
            code = do_energy(cfg, dir, rep);
        } else {
            throw ConfigError("pipeline: unknown command '" + command + "'");
        }
    } catch (const std::exception& err) {
        rep["stage_error"] = {{"stage", command}, {"message", err.what()}};
        rep["timing"] = {{"wall_clock_seconds", watch.seconds()}};
        write_report(rep, dir); // partial artifacts preserved
        throw;
    }
    rep["timing"] = {{"wall_clock_seconds", watch.seconds()}};
    write_report(rep, dir);
    return code;
}

int run_report(const std::string& report_path) {
    std::ifstream is(report_path);
    if (!is) throw IoError("report: cannot open " + report_path);
    json rep;
    try {
        is >> rep;
    } catch (const std::exception& e) {
        throw IoError(std::string("report: malformed JSON: ") + e.what());
    }
    if (!rep.contains("schema_version") || rep["schema_version"] != kReportSchemaVersion)
        throw IoError("report: missing or unsupported schema_version");
    std::cout << rep.dump(2) << "\n";
    return kExitOk;
}

} // namespace vortexlab
