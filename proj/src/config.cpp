#include "vortexlab/config.hpp"
#include "vortexlab/errors.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace vortexlab {

namespace {
std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& s, const std::string& where) {
    try {
        size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError(where + ": malformed number '" + s + "'");
    }
}

long parse_int(const std::string& s, const std::string& where) {
    try {
        size_t pos = 0;
        const long v = std::stol(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError(where + ": malformed integer '" + s + "'");
    }
}

std::vector<double> parse_list(const std::string& s, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, where));
    }
    if (out.empty()) throw ConfigError(where + ": empty list");
    return out;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

std::string fmt(cplx v) {
    std::ostringstream os;
    os.precision(17);
    os << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i";
    return os.str();
}
} // namespace

cplx parse_complex(const std::string& raw) {
    const std::string s = trim(raw);
    if (s.empty()) throw ConfigError("complex: empty value");
    // split at the last top-level +/- that is not an exponent sign
    size_t split = std::string::npos;
    for (size_t k = 1; k < s.size(); ++k) {
        if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') split = k;
    }
    auto parse_imag = [&](std::string t) -> double {
        t = trim(t);
        if (t.empty() || (t.back() != 'i' && t.back() != 'I'))
            throw ConfigError("complex: missing trailing 'i' in '" + raw + "'");
        t.pop_back();
        t = trim(t);
        if (t.empty() || t == "+") return 1.0;
        if (t == "-") return -1.0;
        return parse_double(t, "complex");
    };
    const bool imag_tail = s.back() == 'i' || s.back() == 'I';
    if (split == std::string::npos) {
        if (imag_tail) return {0.0, parse_imag(s)};
        return {parse_double(s, "complex"), 0.0};
    }
    if (!imag_tail) {
        // forms like "1e-3": the '-' found was an exponent edge case already excluded;
        // otherwise a trailing real part is malformed
        return {parse_double(s, "complex"), 0.0};
    }
    const double re = parse_double(trim(s.substr(0, split)), "complex");
    std::string rest = s.substr(split); // includes sign
    const double im = parse_imag(rest);
    return {re, im};
}

VortexDivisor::Entry parse_vortex(const std::string& raw) {
    const auto colon = raw.find(':');
    if (colon == std::string::npos)
        throw ConfigError("vortex: expected 'point : multiplicity' in '" + raw + "'");
    VortexDivisor::Entry e;
    e.point = parse_complex(raw.substr(0, colon));
    e.multiplicity = static_cast<int>(parse_int(trim(raw.substr(colon + 1)), "vortex"));
    if (e.multiplicity < 1) throw ConfigError("vortex: multiplicity must be at least 1");
    return e;
}

namespace {
struct RawConfig {
    // section -> ordered key/value pairs
    std::vector<std::pair<std::string, std::vector<std::pair<std::string, std::string>>>> sections;

    std::vector<std::pair<std::string, std::string>>* find(const std::string& name) {
        for (auto& [n, kv] : sections)
            if (n == name) return &kv;
        return nullptr;
    }
};

RawConfig tokenize(const std::string& text) {
    RawConfig raw;
    std::string current = "";
    raw.sections.push_back({current, {}});
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(lineno) + ": unterminated section");
            current = trim(line.substr(1, line.size() - 2));
            if (!raw.find(current)) raw.sections.push_back({current, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
        raw.find(current)->push_back({key, value});
    }
    return raw;
}

bool is_list_key(const std::string& k) { return k == "vortex"; }

// consume key/value pairs with duplicate detection
class SectionReader {
  public:
    SectionReader(const std::string& name, const std::vector<std::pair<std::string, std::string>>& kv)
        : name_(name), kv_(kv), used_(kv.size(), false) {}

    std::optional<std::string> get(const std::string& key) {
        std::optional<std::string> out;
        for (size_t k = 0; k < kv_.size(); ++k)
            if (kv_[k].first == key) {
                if (out && !is_list_key(key))
                    throw ConfigError("[" + name_ + "]: duplicate key '" + key + "'");
                out = kv_[k].second;
                used_[k] = true;
            }
        return out;
    }

    std::vector<std::string> get_all(const std::string& key) {
        std::vector<std::string> out;
        for (size_t k = 0; k < kv_.size(); ++k)
            if (kv_[k].first == key) {
                out.push_back(kv_[k].second);
                used_[k] = true;
            }
        return out;
    }

    void finish() const {
        for (size_t k = 0; k < kv_.size(); ++k)
            if (!used_[k])
                throw ConfigError("[" + name_ + "]: unknown key '" + kv_[k].first + "'");
    }

  private:
    std::string name_;
    std::vector<std::pair<std::string, std::string>> kv_;
    std::vector<bool> used_;
};
} // namespace

RunConfig parse_config(const std::string& text) {
    RawConfig raw = tokenize(text);
    RunConfig cfg;

    for (auto& [name, kv] : raw.sections) {
        SectionReader rd(name, kv);
        if (name == "") {
            if (auto v = rd.get("seed")) cfg.seed = static_cast<std::uint64_t>(parse_int(*v, "seed"));
            rd.finish();
        } else if (name == "grid") {
            double extent = cfg.grid.extent;
            int n = cfg.grid.n;
            if (auto v = rd.get("extent")) extent = parse_double(*v, "[grid] extent");
            if (auto v = rd.get("n")) n = static_cast<int>(parse_int(*v, "[grid] n"));
            if (auto v = rd.get("seed")) cfg.seed = static_cast<std::uint64_t>(parse_int(*v, "seed"));
            rd.finish();
            if (n < 3) throw ConfigError("[grid]: n must be at least 3");
            if (!(extent > 0)) throw ConfigError("[grid]: extent must be positive");
            cfg.grid = GridSpec(extent, n);
        } else if (name == "generate") {
            RunConfig::Generate g;
            if (auto v = rd.get("family")) g.family = *v;
            if (g.family != "plane-wave" && g.family != "divisor" && g.family != "higgs")
                throw ConfigError("[generate]: unknown family '" + g.family + "'");
            if (auto v = rd.get("c1")) g.c1 = parse_complex(*v);
            if (auto v = rd.get("c2")) g.c2 = parse_complex(*v);
            if (auto v = rd.get("theta")) g.theta = parse_double(*v, "[generate] theta");
            if (auto v = rd.get("sign")) {
                if (*v == "+") g.sign = +1;
                else if (*v == "-") g.sign = -1;
                else throw ConfigError("[generate]: sign must be '+' or '-'");
            }
            if (auto v = rd.get("R")) g.R = parse_double(*v, "[generate] R");
            for (const auto& v : rd.get_all("vortex")) g.divisor.entries.push_back(parse_vortex(v));
            rd.finish();
            if (g.c1 == cplx(0.0, 0.0)) throw ConfigError("[generate]: c1 must be nonzero");
            g.divisor.validate(1);
            cfg.generate = g;
        } else if (name == "solve") {
            RunConfig::Solve s;
            if (auto v = rd.get("M")) s.M = parse_double(*v, "[solve] M");
            if (auto v = rd.get("Mprime")) s.Mprime = parse_double(*v, "[solve] Mprime");
            if (auto v = rd.get("R")) s.R = parse_double(*v, "[solve] R");
            if (auto v = rd.get("eps")) s.eps = parse_double(*v, "[solve] eps");
            if (auto v = rd.get("tol_newton")) s.tol_newton = parse_double(*v, "[solve] tol_newton");
            if (auto v = rd.get("tol_linear")) s.tol_linear = parse_double(*v, "[solve] tol_linear");
            if (auto v = rd.get("continuation_steps"))
                s.continuation_steps = static_cast<int>(parse_int(*v, "[solve] continuation_steps"));
            if (auto v = rd.get("mode")) s.mode = *v;
            for (const auto& v : rd.get_all("vortex")) s.divisor.entries.push_back(parse_vortex(v));
            rd.finish();
            if (!(s.M > 0.0 && s.M < 1.0))
                throw ConfigError("[solve]: M = " + fmt(s.M) + " outside the range (0,1)");
            if (s.Mprime < 0.0) throw ConfigError("[solve]: Mprime must be nonnegative");
            if (s.mode != "newton" && s.mode != "monotone")
                throw ConfigError("[solve]: mode must be 'newton' or 'monotone'");
            s.divisor.validate(2);
            cfg.solve = s;
        } else if (name == "refine") {
            RunConfig::Refine r;
            if (auto v = rd.get("eps_schedule")) r.eps_schedule = parse_list(*v, "[refine] eps_schedule");
            else throw ConfigError("[refine]: missing required key 'eps_schedule'");
            if (auto v = rd.get("R_schedule")) r.R_schedule = parse_list(*v, "[refine] R_schedule");
            else throw ConfigError("[refine]: missing required key 'R_schedule'");
            if (auto v = rd.get("K_inner")) r.K_inner = parse_double(*v, "[refine] K_inner");
            if (auto v = rd.get("K_outer")) r.K_outer = parse_double(*v, "[refine] K_outer");
            rd.finish();
            cfg.refine = r;
        } else if (name == "verify") {
            RunConfig::Verify v0;
            auto need = [&](const char* key, std::string& dst) {
                if (auto v = rd.get(key)) dst = *v;
                else throw ConfigError(std::string("[verify]: missing required key '") + key + "'");
            };
            need("a0", v0.a0);
            need("a1", v0.a1);
            need("psi1", v0.psi1);
            need("psi2", v0.psi2);
            if (auto v = rd.get("tol_r1")) v0.tol_r1 = parse_double(*v, "[verify] tol_r1");
            if (auto v = rd.get("tol_r2")) v0.tol_r2 = parse_double(*v, "[verify] tol_r2");
            if (auto v = rd.get("tol_r3")) v0.tol_r3 = parse_double(*v, "[verify] tol_r3");
            rd.finish();
            cfg.verify = v0;
        } else if (name == "vekua") {
            RunConfig::Vekua vk;
            if (auto v = rd.get("op")) vk.op = *v;
            if (vk.op != "toperator" && vk.op != "similarity" && vk.op != "lpnu" &&
                vk.op != "decay-radius")
                throw ConfigError("[vekua]: unknown op '" + vk.op + "'");
            if (auto v = rd.get("field")) vk.field = *v;
            for (const auto& v : rd.get_all("point")) vk.points.push_back(parse_complex(v));
            if (auto v = rd.get("A")) vk.coeff_A = parse_complex(*v);
            if (auto v = rd.get("B")) vk.coeff_B = parse_complex(*v);
            if (auto v = rd.get("profile")) vk.profile = *v;
            if (auto v = rd.get("p")) vk.p = parse_double(*v, "[vekua] p");
            if (auto v = rd.get("nu")) vk.nu = parse_double(*v, "[vekua] nu");
            if (auto v = rd.get("M")) vk.M = parse_double(*v, "[vekua] M");
            if (auto v = rd.get("N")) vk.N = parse_double(*v, "[vekua] N");
            rd.finish();
            cfg.vekua = vk;
        } else if (name == "energy") {
            RunConfig::Energy e;
            auto need = [&](const char* key, std::string& dst) {
                if (auto v = rd.get(key)) dst = *v;
                else throw ConfigError(std::string("[energy]: missing required key '") + key + "'");
            };
            need("a0", e.a0);
            need("a1", e.a1);
            need("phi", e.phi);
            rd.finish();
            cfg.energy = e;
        } else {
            throw ConfigError("config: unknown section [" + name + "]");
        }
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("config: cannot open " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

SinhGordonProblem RunConfig::make_problem() const {
    if (!solve) throw ConfigError("config: [solve] section required");
    SinhGordonProblem p;
    p.divisor = solve->divisor;
    p.M = solve->M;
    p.Mprime = solve->Mprime;
    p.R = solve->R;
    p.eps = solve->eps;
    p.grid = grid;
    p.tol_newton = solve->tol_newton;
    p.tol_linear = solve->tol_linear;
    p.continuation_steps = solve->continuation_steps;
    p.mode = solve->mode == "monotone" ? SolveMode::Monotone : SolveMode::Newton;
    const double h = grid.spacing();
    if (p.eps < h)
        throw ConfigError("[solve]: eps = " + fmt(p.eps) + " is below the grid spacing " + fmt(h));
    return p;
}

std::string RunConfig::canonical_text() const {
    std::ostringstream os;
    os << "seed = " << seed << "\n";
    os << "[grid]\n";
    os << "extent = " << fmt(grid.extent) << "\n";
    os << "n = " << grid.n << "\n";
    if (generate) {
        os << "[generate]\n";
        os << "family = " << generate->family << "\n";
        os << "c1 = " << fmt(generate->c1) << "\n";
        os << "c2 = " << fmt(generate->c2) << "\n";
        os << "theta = " << fmt(generate->theta) << "\n";
        os << "sign = " << (generate->sign >= 0 ? "+" : "-") << "\n";
        if (generate->R) os << "R = " << fmt(*generate->R) << "\n";
        for (const auto& e : generate->divisor.entries)
            os << "vortex = " << fmt(e.point) << " : " << e.multiplicity << "\n";
    }
    if (solve) {
        os << "[solve]\n";
        os << "M = " << fmt(solve->M) << "\n";
        os << "Mprime = " << fmt(solve->Mprime) << "\n";
        os << "R = " << fmt(solve->R) << "\n";
        os << "eps = " << fmt(solve->eps) << "\n";
        os << "tol_newton = " << fmt(solve->tol_newton) << "\n";
        os << "tol_linear = " << fmt(solve->tol_linear) << "\n";
        os << "continuation_steps = " << solve->continuation_steps << "\n";
        os << "mode = " << solve->mode << "\n";
        for (const auto& e : solve->divisor.entries)
            os << "vortex = " << fmt(e.point) << " : " << e.multiplicity << "\n";
    }
    if (refine) {
        os << "[refine]\n";
        os << "eps_schedule = ";
        for (size_t k = 0; k < refine->eps_schedule.size(); ++k)
            os << (k ? ", " : "") << fmt(refine->eps_schedule[k]);
        os << "\nR_schedule = ";
        for (size_t k = 0; k < refine->R_schedule.size(); ++k)
            os << (k ? ", " : "") << fmt(refine->R_schedule[k]);
        os << "\nK_inner = " << fmt(refine->K_inner) << "\n";
        os << "K_outer = " << fmt(refine->K_outer) << "\n";
    }
    if (verify) {
        os << "[verify]\n";
        os << "a0 = " << verify->a0 << "\n";
        os << "a1 = " << verify->a1 << "\n";
        os << "psi1 = " << verify->psi1 << "\n";
        os << "psi2 = " << verify->psi2 << "\n";
        os << "tol_r1 = " << fmt(verify->tol_r1) << "\n";
        os << "tol_r2 = " << fmt(verify->tol_r2) << "\n";
        os << "tol_r3 = " << fmt(verify->tol_r3) << "\n";
    }
    if (vekua) {
        os << "[vekua]\n";
        os << "op = " << vekua->op << "\n";
        if (!vekua->field.empty()) os << "field = " << vekua->field << "\n";
        for (const auto& pt : vekua->points) os << "point = " << fmt(pt) << "\n";
        os << "A = " << fmt(vekua->coeff_A) << "\n";
        os << "B = " << fmt(vekua->coeff_B) << "\n";
        os << "profile = " << vekua->profile << "\n";
        os << "p = " << fmt(vekua->p) << "\n";
        os << "nu = " << fmt(vekua->nu) << "\n";
        os << "M = " << fmt(vekua->M) << "\n";
        os << "N = " << fmt(vekua->N) << "\n";
    }
    if (energy) {
        os << "[energy]\n";
        os << "a0 = " << energy->a0 << "\n";
        os << "a1 = " << energy->a1 << "\n";
        os << "phi = " << energy->phi << "\n";
    }
    return os.str();
}

} // namespace vortexlab
