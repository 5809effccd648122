#include "config.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "cbi/errors.hpp"

namespace cbi::cli {

namespace {

std::string trim(const std::string& s) {
    const size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double x = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw Error(Errc::TypeError, "key '" + key + "' expects a number, got '" + value + "'");
    return x;
}

long parse_integer(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long x = std::strtol(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        throw Error(Errc::TypeError, "key '" + key + "' expects an integer, got '" + value + "'");
    return x;
}

JumpMeasure::Atom parse_atom(const std::string& key, const std::string& value) {
    std::istringstream ss(value);
    double z1, z2, w;
    if (!(ss >> z1 >> z2 >> w))
        throw Error(Errc::TypeError, "key '" + key + "' expects 'z1 z2 weight', got '" + value + "'");
    std::string rest;
    if (ss >> rest)
        throw Error(Errc::TypeError, "key '" + key + "' has trailing content: '" + rest + "'");
    JumpMeasure::Atom a{Vec2{{z1, z2}}, w};
    JumpMeasure probe{{a}};
    probe.validate();
    return a;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::set<std::string> seen_b;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        if (const size_t hash = line.find('#'); hash != std::string::npos)
            line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::string where = " (line " + std::to_string(lineno) + ")";

        if (line.front() == '[') {
            if (line.back() != ']')
                throw Error(Errc::TypeError, "malformed section header" + where);
            section = line.substr(1, line.size() - 2);
            if (section != "model" && section != "experiment")
                throw Error(Errc::UnknownKey, "unknown section [" + section + "]" + where);
            continue;
        }

        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw Error(Errc::TypeError, "expected 'key = value'" + where);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (section.empty())
            throw Error(Errc::TypeError, "key '" + key + "' outside any section" + where);

        if (section == "model") {
            if (key == "c1") cfg.model.c[0] = parse_number(key, value);
            else if (key == "c2") cfg.model.c[1] = parse_number(key, value);
            else if (key == "beta1") cfg.model.beta[0] = parse_number(key, value);
            else if (key == "beta2") cfg.model.beta[1] = parse_number(key, value);
            else if (key == "b11") { cfg.model.B(0, 0) = parse_number(key, value); seen_b.insert(key); }
            else if (key == "b12") { cfg.model.B(0, 1) = parse_number(key, value); seen_b.insert(key); }
            else if (key == "b21") { cfg.model.B(1, 0) = parse_number(key, value); seen_b.insert(key); }
            else if (key == "b22") { cfg.model.B(1, 1) = parse_number(key, value); seen_b.insert(key); }
            else if (key == "nu_atom") cfg.model.nu.atoms.push_back(parse_atom(key, value));
            else if (key == "mu1_atom") cfg.model.mu1.atoms.push_back(parse_atom(key, value));
            else if (key == "mu2_atom") cfg.model.mu2.atoms.push_back(parse_atom(key, value));
            else throw Error(Errc::UnknownKey, "unknown [model] key '" + key + "'" + where);
        } else {
            if (key == "n") cfg.n = parse_integer(key, value);
            else if (key == "reps") cfg.reps = parse_integer(key, value);
            else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(parse_integer(key, value));
            else if (key == "euler_h") cfg.euler_h = parse_number(key, value);
            else if (key == "limit_h") cfg.limit_h = parse_number(key, value);
            else if (key == "output") cfg.output = value;
            else throw Error(Errc::UnknownKey, "unknown [experiment] key '" + key + "'" + where);
        }
    }

    for (const char* k : {"b11", "b12", "b21", "b22"})
        if (!seen_b.count(k))
            throw Error(Errc::MissingKey, std::string("missing [model] key '") + k + "'");
    cfg.model.validate();
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error(Errc::IoError, "cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

}  // namespace cbi::cli
