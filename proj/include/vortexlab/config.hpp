#pragma once

#include "vortexlab/grid.hpp"
#include "vortexlab/sinh_gordon.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace vortexlab {

// Text configuration: `key = value` lines, `[section]` headers, `#` comments.
// Repeated keys are accumulated only where a list is expected (vortex, schedules).
struct RunConfig {
    GridSpec grid{4.0, 129};
    std::uint64_t seed = 0;
    bool csv_export = false; // CLI flag: also write .csv heatmaps next to .vortx files

    struct Generate {
        std::string family = "divisor"; // plane-wave | divisor | higgs
        cplx c1{1.0, 0.0};
        cplx c2{0.0, 0.0};
        double theta = 0.0;
        int sign = +1;
        VortexDivisor divisor;
        std::optional<double> R; // defaults to grid extent
    };
    struct Solve {
        VortexDivisor divisor;
        double M = 0.25;
        double Mprime = 0.0;
        double R = 6.0;
        double eps = 0.1;
        double tol_newton = 1e-10;
        double tol_linear = 1e-10;
        int continuation_steps = 8;
        std::string mode = "newton"; // newton | monotone
    };
    struct Refine {
        std::vector<double> eps_schedule;
        std::vector<double> R_schedule;
        double K_inner = 0.5;
        double K_outer = 3.0;
    };
    struct Verify {
        std::string a0, a1, psi1, psi2;
        double tol_r1 = 1e-2, tol_r2 = 1e-2, tol_r3 = 1e-2;
    };
    struct Vekua {
        std::string op = "toperator"; // toperator | similarity | lpnu | decay-radius
        std::string field;            // input field path (toperator / similarity)
        std::vector<cplx> points;
        cplx coeff_A{0.0, 0.0};
        cplx coeff_B{0.0, 0.0};
        std::string profile = "constant"; // lpnu: constant | rational-decay
        double p = 2.0, nu = 2.0;
        double M = 1.0, N = 1.0; // decay-radius inputs
    };
    struct Energy {
        std::string a0, a1, phi;
    };

    std::optional<Generate> generate;
    std::optional<Solve> solve;
    std::optional<Refine> refine;
    std::optional<Verify> verify;
    std::optional<Vekua> vekua;
    std::optional<Energy> energy;

    SinhGordonProblem make_problem() const; // from [grid] + [solve]
    std::string canonical_text() const;     // normalized echo; reparses to an equal config
};

RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

// scalar parsers shared with the CLI (throw ConfigError on malformed input)
cplx parse_complex(const std::string& s);
VortexDivisor::Entry parse_vortex(const std::string& s); // "re+imi : mult"

} // namespace vortexlab
