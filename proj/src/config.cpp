#include "fraflow/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "fraflow/grid.hpp"

namespace fraflow {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

double parse_number(const std::string& key, const std::string& val) {
    try {
        std::size_t pos = 0;
        double x = std::stod(val, &pos);
        if (pos != val.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config: key '" + key + "' expects a number, got '" + val + "'");
    }
}

int parse_int(const std::string& key, const std::string& val) {
    double x = parse_number(key, val);
    if (x != std::floor(x))
        throw ConfigError("config: key '" + key + "' expects an integer, got '" + val + "'");
    return static_cast<int>(x);
}

bool parse_bool(const std::string& key, const std::string& val) {
    if (val == "true" || val == "1" || val == "yes") return true;
    if (val == "false" || val == "0" || val == "no") return false;
    throw ConfigError("config: key '" + key + "' expects a boolean, got '" + val + "'");
}

std::vector<double> parse_list(const std::string& key, const std::string& val) {
    std::vector<double> out;
    std::stringstream ss(val);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_number(key, item));
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open '" + path + "'");

    ExperimentConfig cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::size_t hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config: malformed section header at line " +
                                  std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            if (section != "experiment" && section != "params" && section != "grid" &&
                section != "integrator" && section != "optimizer" && section != "gap" &&
                section != "output" && section != "sweep")
                throw ConfigError("config: unknown section [" + section + "]");
            continue;
        }

        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config: expected 'key = value' at line " +
                              std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string val = trim(line.substr(eq + 1));
        std::string full = section + "." + key;

        if (section == "experiment") {
            if (key == "name") cfg.name = val;
            else if (key == "seed") cfg.seed = static_cast<unsigned long long>(
                    parse_number(full, val));
            else throw ConfigError("config: unknown key '" + full + "'");
        } else if (section == "params") {
            if (key == "d") cfg.params.d = parse_int(full, val);
            else if (key == "s") cfg.params.s = parse_number(full, val);
            else if (key == "m") cfg.params.m = parse_number(full, val);
            else if (key == "M") cfg.params.M = parse_number(full, val);
            else throw ConfigError("config: unknown key '" + full + "'");
        } else if (section == "grid") {
            if (key == "n") cfg.grid.n = parse_int(full, val);
            else if (key == "L") cfg.grid.L = parse_number(full, val);
            else throw ConfigError("config: unknown key '" + full + "'");
        } else if (section == "integrator") {
            if (key == "T") cfg.integrator.T = parse_number(full, val);
            else if (key == "stride") cfg.integrator.stride = parse_number(full, val);
            else if (key == "cfl") cfg.integrator.cfl = parse_number(full, val);
            else if (key == "floor_rel") cfg.integrator.floor_rel = parse_number(full, val);
            else if (key == "fixed_dt") cfg.integrator.fixed_dt = parse_number(full, val);
            else if (key == "init") cfg.integrator.init = val;
            else if (key == "kappa_ref") cfg.integrator.kappa_ref = parse_number(full, val);
            else throw ConfigError("config: unknown key '" + full + "'");
        } else if (section == "optimizer") {
            if (key == "max_iters") cfg.optimizer.max_iters = parse_int(full, val);
            else if (key == "step0") cfg.optimizer.step0 = parse_number(full, val);
            else if (key == "polish") cfg.optimizer.polish = parse_bool(full, val);
            else if (key == "polish_iters") cfg.optimizer.polish_iters = parse_int(full, val);
            else throw ConfigError("config: unknown key '" + full + "'");
        } else if (section == "gap") {
            if (key == "max_iters") cfg.gap.max_iters = parse_int(full, val);
            else if (key == "restarts") cfg.gap.restarts = parse_int(full, val);
            else if (key == "tol") cfg.gap.tol = parse_number(full, val);
            else if (key == "floor_rel") cfg.gap.floor_rel = parse_number(full, val);
            else if (key == "check_stationarity")
                cfg.gap.check_stationarity = parse_bool(full, val);
            else throw ConfigError("config: unknown key '" + full + "'");
        } else if (section == "output") {
            if (key == "dir") cfg.output.dir = val;
            else throw ConfigError("config: unknown key '" + full + "'");
        } else if (section == "sweep") {
            if (key == "key") cfg.sweep.key = val;
            else if (key == "values") cfg.sweep.values = parse_list(full, val);
            else if (key == "run") cfg.sweep.run = val;
            else throw ConfigError("config: unknown key '" + full + "'");
        } else {
            throw ConfigError("config: key '" + key + "' outside any section");
        }
    }
    validate_config(cfg);
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    try {
        cfg.params.validate();
        Grid probe(cfg.params.d, cfg.grid.n, cfg.grid.L);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!(cfg.integrator.T >= 0.0))
        throw ConfigError("config: integrator.T must be >= 0");
    if (!(cfg.integrator.stride > 0.0))
        throw ConfigError("config: integrator.stride must be > 0");
    if (!(cfg.integrator.cfl > 0.0 && cfg.integrator.cfl <= 1.0))
        throw ConfigError("config: integrator.cfl must lie in (0, 1]");
    if (!(cfg.integrator.floor_rel >= 0.0 && cfg.integrator.floor_rel < 1.0))
        throw ConfigError("config: integrator.floor_rel must lie in [0, 1)");
    if (!(cfg.integrator.fixed_dt >= 0.0))
        throw ConfigError("config: integrator.fixed_dt must be >= 0");
    if (cfg.integrator.init != "stationary" && cfg.integrator.init != "gaussian")
        throw ConfigError("config: integrator.init must be 'stationary' or 'gaussian'");
    if (!(cfg.integrator.kappa_ref >= 0.0))
        throw ConfigError("config: integrator.kappa_ref must be >= 0");
    if (cfg.optimizer.max_iters < 1 || cfg.optimizer.polish_iters < 0)
        throw ConfigError("config: optimizer iteration counts out of range");
    if (!(cfg.optimizer.step0 > 0.0))
        throw ConfigError("config: optimizer.step0 must be > 0");
    if (cfg.gap.max_iters < 1 || cfg.gap.restarts < 1)
        throw ConfigError("config: gap iteration counts out of range");
    if (!(cfg.gap.tol > 0.0) || !(cfg.gap.floor_rel >= 0.0))
        throw ConfigError("config: gap tolerances out of range");
    if (!cfg.sweep.key.empty() && cfg.sweep.key != "params.m" &&
        cfg.sweep.key != "params.s" && cfg.sweep.key != "params.M")
        throw ConfigError("config: sweep.key must be one of params.m, params.s, params.M");
    if (!cfg.sweep.key.empty()) {
        static const char* kRuns[] = {"simulate", "rescaled", "gns",
                                      "gap", "identities", "compare-selfsim"};
        bool ok = false;
        for (const char* r : kRuns) ok = ok || cfg.sweep.run == r;
        if (!ok)
            throw ConfigError("config: sweep.run must name a non-sweep subcommand");
    }
}

std::string render_config(const ExperimentConfig& cfg) {
    std::ostringstream os;
    os.precision(17);
    os << "[experiment]\n"
       << "name = " << cfg.name << "\n"
       << "seed = " << cfg.seed << "\n\n"
       << "[params]\n"
       << "d = " << cfg.params.d << "\n"
       << "s = " << cfg.params.s << "\n"
       << "m = " << cfg.params.m << "\n"
       << "M = " << cfg.params.M << "\n\n"
       << "[grid]\n"
       << "n = " << cfg.grid.n << "\n"
       << "L = " << cfg.grid.L << "\n\n"
       << "[integrator]\n"
       << "T = " << cfg.integrator.T << "\n"
       << "stride = " << cfg.integrator.stride << "\n"
       << "cfl = " << cfg.integrator.cfl << "\n"
       << "floor_rel = " << cfg.integrator.floor_rel << "\n"
       << "fixed_dt = " << cfg.integrator.fixed_dt << "\n"
       << "init = " << cfg.integrator.init << "\n"
       << "kappa_ref = " << cfg.integrator.kappa_ref << "\n\n"
       << "[optimizer]\n"
       << "max_iters = " << cfg.optimizer.max_iters << "\n"
       << "step0 = " << cfg.optimizer.step0 << "\n"
       << "polish = " << (cfg.optimizer.polish ? "true" : "false") << "\n"
       << "polish_iters = " << cfg.optimizer.polish_iters << "\n\n"
       << "[gap]\n"
       << "max_iters = " << cfg.gap.max_iters << "\n"
       << "restarts = " << cfg.gap.restarts << "\n"
       << "tol = " << cfg.gap.tol << "\n"
       << "floor_rel = " << cfg.gap.floor_rel << "\n"
       << "check_stationarity = " << (cfg.gap.check_stationarity ? "true" : "false")
       << "\n\n[sweep]\n"
       << "key = " << cfg.sweep.key << "\n"
       << "values =";
    for (std::size_t i = 0; i < cfg.sweep.values.size(); ++i)
        os << (i ? "," : " ") << cfg.sweep.values[i];
    os << "\nrun = " << cfg.sweep.run << "\n";
    return os.str();
}

}  // namespace fraflow
