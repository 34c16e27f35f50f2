#include "jwkbfit/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace jwkbfit {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key) {
    try {
        size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw DomainError("config: bad numeric value for " + key + ": '" + v + "'");
    }
}

std::vector<int> parse_int_list(const std::string& v, const std::string& key) {
    std::vector<int> out;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok = trim(tok);
        if (tok.empty()) continue;
        try {
            out.push_back(std::stoi(tok));
        } catch (const std::exception&) {
            throw DomainError("config: bad integer in " + key + ": '" + tok + "'");
        }
    }
    return out;
}

std::vector<cplx> parse_seed_list(const std::string& v) {
    std::vector<cplx> out;
    std::stringstream ss(v);
    std::string pair;
    while (std::getline(ss, pair, ';')) {
        pair = trim(pair);
        if (pair.empty()) continue;
        const auto comma = pair.find(',');
        if (comma == std::string::npos)
            throw DomainError("config: seeds must be re,im pairs separated by ';'");
        out.emplace_back(parse_double(trim(pair.substr(0, comma)), "seeds"),
                         parse_double(trim(pair.substr(comma + 1)), "seeds"));
    }
    return out;
}

void apply_key(RunConfig& cfg, const std::string& section, const std::string& key,
               const std::string& value) {
    if (section == "operator") {
        if (key == "kind") {
            if (value == "harmonic_complex") cfg.op.kind = PotentialKind::HarmonicComplex;
            else if (value == "gaussian_bump") cfg.op.kind = PotentialKind::GaussianBump;
            else if (value == "double_gaussian") cfg.op.kind = PotentialKind::DoubleGaussian;
            else throw DomainError("config: unknown operator kind '" + value + "'");
        } else if (key == "c_arg") {
            cfg.op.c = std::polar(1.0, parse_double(value, key));
        } else if (key == "c_re") {
            cfg.op.c = cplx(parse_double(value, key), cfg.op.c.imag());
        } else if (key == "c_im") {
            cfg.op.c = cplx(cfg.op.c.real(), parse_double(value, key));
        } else if (key == "b") {
            cfg.op.b = parse_double(value, key);
        } else if (key == "alpha") {
            cfg.op.alpha = parse_double(value, key);
        } else if (key == "beta") {
            cfg.op.beta = parse_double(value, key);
        } else if (key == "gamma") {
            cfg.op.gamma = parse_double(value, key);
        } else {
            throw DomainError("config: unknown key operator." + key);
        }
    } else if (section == "run") {
        if (key == "m_values") cfg.m_values = parse_int_list(value, key);
        else if (key == "grid_points") cfg.grid_points = static_cast<int>(parse_double(value, key));
        else if (key == "truncation_radius") cfg.truncation_radius = parse_double(value, key);
        else if (key == "jwkb_h") cfg.jwkb_h = parse_double(value, key);
        else if (key == "seeds") cfg.seeds = parse_seed_list(value);
        else if (key == "output_dir") cfg.output_dir = value;
        else throw DomainError("config: unknown key run." + key);
    } else {
        throw DomainError("config: unknown section [" + section + "]");
    }
}

}  // namespace

void RunConfig::validate() const {
    op.validate();
    if (grid_points < 4000) throw DomainError("config: grid_points must be >= 4000");
    if (truncation_radius < 0.0) throw DomainError("config: truncation_radius must be >= 0");
    if (!(jwkb_h > 0.0)) throw DomainError("config: jwkb_h must be > 0");
    for (int m : m_values)
        if (m < 0) throw DomainError("config: m_values must be nonnegative");
    if (!std::is_sorted(m_values.begin(), m_values.end()))
        throw DomainError("config: m_values must be sorted ascending");
    if (!seeds.empty() && seeds.size() != m_values.size())
        throw DomainError("config: seeds must pair one-to-one with m_values");
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("config: cannot open " + path);
    RunConfig cfg;
    cfg.op.c = std::polar(1.0, kPi / 8.0);  // the default rotation everywhere
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw DomainError("config: malformed section at line " + std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw DomainError("config: expected key = value at line " + std::to_string(lineno));
        apply_key(cfg, section, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return cfg;
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw DomainError("override: expected section.key=value");
    const std::string key = trim(assignment.substr(0, eq));
    const std::string value = trim(assignment.substr(eq + 1));
    const auto dot = key.find('.');
    if (dot == std::string::npos) throw DomainError("override: expected section.key=value");
    apply_key(cfg, key.substr(0, dot), key.substr(dot + 1), value);
}

std::string kind_name(PotentialKind kind) {
    switch (kind) {
        case PotentialKind::HarmonicComplex: return "harmonic_complex";
        case PotentialKind::GaussianBump: return "gaussian_bump";
        case PotentialKind::DoubleGaussian: return "double_gaussian";
    }
    return "?";
}

}  // namespace jwkbfit
