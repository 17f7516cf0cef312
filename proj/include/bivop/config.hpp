#pragma once

// Sectioned key = value experiment configuration.  Lists are comma
// separated; "inf" is accepted wherever a p value is expected.
//
//   [run]        seed tolerance threads out
//   [scan]       dims ps sigmas trials scale spectrum_radius terms
//   [identities] dims sigmas seeds scale
//   [search]     p dims sigma restarts iterations rejection_limit initial_step
//   [converge]   dim pairs k_min k_max
//   [sharp]      dims sigmas trials
//   [dois]       trials duality_trials duality_probes

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bivop/harness.hpp"

namespace bivop {

/// Usage or config error; the CLI maps it to exit status 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "inf" || t == "infinity") return kInf;
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != t.size()) throw ConfigError("config: " + key + ": not a number: '" + t + "'");
    return v;
}

inline long long parse_int(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(t, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != t.size()) throw ConfigError("config: " + key + ": not an integer: '" + t + "'");
    return v;
}

inline std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!trim(item).empty()) out.push_back(trim(item));
    return out;
}

inline std::vector<double> parse_doubles(const std::string& key, const std::string& text) {
    std::vector<double> out;
    for (const auto& s : split_list(text)) out.push_back(parse_double(key, s));
    if (out.empty()) throw ConfigError("config: " + key + ": empty list");
    return out;
}

inline std::vector<int> parse_ints(const std::string& key, const std::string& text) {
    std::vector<int> out;
    for (const auto& s : split_list(text)) out.push_back(static_cast<int>(parse_int(key, s)));
    if (out.empty()) throw ConfigError("config: " + key + ": empty list");
    return out;
}

template <class T>
std::string join(const std::vector<T>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        if constexpr (std::is_floating_point_v<T>) out += fmt_p(v[i]);
        else out += std::to_string(v[i]);
    }
    return out;
}

}  // namespace detail

inline ExperimentConfig parse_config(std::istream& is) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::read_ini(is, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ParseError(e.line(), e.message());
    }
    ExperimentConfig c;
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty())
            throw ConfigError("config: key '" + section + "' outside a section");
        for (const auto& [name, node] : body) {
            const std::string key = section + "." + name;
            const std::string v = node.data();
            using namespace detail;
            if (key == "run.seed") c.seed = static_cast<std::uint64_t>(parse_int(key, v));
            else if (key == "run.tolerance") c.tolerance = parse_double(key, v);
            else if (key == "run.threads") c.threads = static_cast<int>(parse_int(key, v));
            else if (key == "run.out") c.out = trim(v);
            else if (key == "scan.dims") c.dims = parse_ints(key, v);
            else if (key == "scan.ps") c.ps = parse_doubles(key, v);
            else if (key == "scan.sigmas") c.sigmas = parse_doubles(key, v);
            else if (key == "scan.trials") c.trials = static_cast<int>(parse_int(key, v));
            else if (key == "scan.scale") c.scale = parse_double(key, v);
            else if (key == "scan.spectrum_radius") c.spectrum_radius = parse_double(key, v);
            else if (key == "scan.terms") c.terms = static_cast<int>(parse_int(key, v));
            else if (key == "identities.dims") c.identities.dims = parse_ints(key, v);
            else if (key == "identities.sigmas") c.identities.sigmas = parse_doubles(key, v);
            else if (key == "identities.seeds") c.identities.seeds = static_cast<int>(parse_int(key, v));
            else if (key == "identities.scale") c.identities.scale = parse_double(key, v);
            else if (key == "search.p") c.search.p = parse_double(key, v);
            else if (key == "search.dims") c.search.dims = parse_ints(key, v);
            else if (key == "search.sigma") c.search.sigma = parse_double(key, v);
            else if (key == "search.restarts") c.search.restarts = static_cast<int>(parse_int(key, v));
            else if (key == "search.iterations") c.search.iterations = static_cast<int>(parse_int(key, v));
            else if (key == "search.rejection_limit") c.search.rejection_limit = static_cast<int>(parse_int(key, v));
            else if (key == "search.initial_step") c.search.initial_step = parse_double(key, v);
            else if (key == "converge.dim") c.converge.dim = static_cast<int>(parse_int(key, v));
            else if (key == "converge.pairs") c.converge.pairs = static_cast<int>(parse_int(key, v));
            else if (key == "converge.k_min") c.converge.k_min = static_cast<int>(parse_int(key, v));
            else if (key == "converge.k_max") c.converge.k_max = static_cast<int>(parse_int(key, v));
            else if (key == "sharp.dims") c.sharp.dims = parse_ints(key, v);
            else if (key == "sharp.sigmas") c.sharp.sigmas = parse_doubles(key, v);
            else if (key == "sharp.trials") c.sharp.trials = static_cast<int>(parse_int(key, v));
            else if (key == "dois.trials") c.doi_trials = static_cast<int>(parse_int(key, v));
            else if (key == "dois.duality_trials") c.duality_trials = static_cast<int>(parse_int(key, v));
            else if (key == "dois.duality_probes") c.duality_probes = static_cast<int>(parse_int(key, v));
            else throw ConfigError("config: unknown key '" + key + "'");
        }
    }
    try {
        validate(c);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

/// Every effective setting in a fixed order; parse_config(canonical) gives
/// back the same configuration.
inline std::string canonical_config_text(const ExperimentConfig& c) {
    using detail::join;
    std::ostringstream os;
    os << "[run]\nseed = " << c.seed << "\ntolerance = " << fmt_num(c.tolerance) << "\nthreads = " << c.threads
       << "\nout = " << c.out << "\n\n";
    os << "[scan]\ndims = " << join(c.dims) << "\nps = " << join(c.ps) << "\nsigmas = " << join(c.sigmas)
       << "\ntrials = " << c.trials << "\nscale = " << fmt_num(c.scale) << "\nspectrum_radius = "
       << fmt_num(c.spectrum_radius) << "\nterms = " << c.terms << "\n\n";
    os << "[identities]\ndims = " << join(c.identities.dims) << "\nsigmas = " << join(c.identities.sigmas)
       << "\nseeds = " << c.identities.seeds << "\nscale = " << fmt_num(c.identities.scale) << "\n\n";
    os << "[search]\np = " << fmt_p(c.search.p) << "\ndims = " << join(c.search.dims) << "\nsigma = "
       << fmt_num(c.search.sigma) << "\nrestarts = " << c.search.restarts << "\niterations = " << c.search.iterations
       << "\nrejection_limit = " << c.search.rejection_limit << "\ninitial_step = " << fmt_num(c.search.initial_step)
       << "\n\n";
    os << "[converge]\ndim = " << c.converge.dim << "\npairs = " << c.converge.pairs << "\nk_min = " << c.converge.k_min
       << "\nk_max = " << c.converge.k_max << "\n\n";
    os << "[sharp]\ndims = " << join(c.sharp.dims) << "\nsigmas = " << join(c.sharp.sigmas)
       << "\ntrials = " << c.sharp.trials << "\n\n";
    os << "[dois]\ntrials = " << c.doi_trials << "\nduality_trials = " << c.duality_trials
       << "\nduality_probes = " << c.duality_probes << "\n";
    return os.str();
}

/// 64-bit FNV-1a, printed as 16 hex digits.
inline std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

inline std::string config_hash(const ExperimentConfig& c) { return fnv1a_hex(canonical_config_text(c)); }

}  // namespace bivop
