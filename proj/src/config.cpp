#include "dirac/config.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "dirac/io.hpp"

namespace dirac {

std::string to_string(ExperimentKind k)
{
    switch (k) {
        case ExperimentKind::verify: return "verify";
        case ExperimentKind::covariance: return "covariance";
        case ExperimentKind::ensemble: return "ensemble";
        case ExperimentKind::rooms: return "rooms";
        case ExperimentKind::decay: return "decay";
    }
    return "verify";
}

ExperimentKind experiment_from_string(const std::string& s)
{
    if (s == "verify") return ExperimentKind::verify;
    if (s == "covariance") return ExperimentKind::covariance;
    if (s == "ensemble") return ExperimentKind::ensemble;
    if (s == "rooms") return ExperimentKind::rooms;
    if (s == "decay") return ExperimentKind::decay;
    throw ConfigError("unknown experiment: " + s);
}

namespace {

std::string trim(const std::string& s)
{
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(trim(cur));
    return out;
}

double parse_number(const std::string& section, const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": not a number: '" + v + "'");
    }
}

long parse_integer(const std::string& section, const std::string& key, const std::string& v)
{
    try {
        std::size_t pos = 0;
        long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("[" + section + "] " + key + ": not an integer: '" + v + "'");
    }
}

bool parse_bool(const std::string& section, const std::string& key, const std::string& v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("[" + section + "] " + key + ": not a boolean: '" + v + "'");
}

std::vector<double> parse_list(const std::string& section, const std::string& key,
                               const std::string& v)
{
    std::vector<double> out;
    for (const std::string& item : split(v, ','))
        if (!item.empty()) out.push_back(parse_number(section, key, item));
    return out;
}

// Consumption-tracked view of the parsed sections so leftover keys can be
// rejected (silent typos corrupt experiments).
class Reader {
public:
    using Sections = std::map<std::string, std::map<std::string, std::string>>;

    explicit Reader(Sections s) : sections_(std::move(s)) {}

    bool has(const std::string& sec, const std::string& key)
    {
        auto s = sections_.find(sec);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    std::string take(const std::string& sec, const std::string& key, const std::string& fallback)
    {
        auto s = sections_.find(sec);
        if (s == sections_.end()) return fallback;
        auto it = s->second.find(key);
        if (it == s->second.end()) return fallback;
        consumed_.insert(sec + "\n" + key);
        return it->second;
    }

    void finish() const
    {
        for (const auto& [sec, kv] : sections_)
            for (const auto& [key, value] : kv)
                if (consumed_.count(sec + "\n" + key) == 0)
                    throw ConfigError("unknown key '" + key + "' in section [" + sec + "]");
    }

private:
    Sections sections_;
    std::set<std::string> consumed_;
};

Reader::Sections tokenize(const std::string& text)
{
    Reader::Sections sections;
    std::string section;  // top-level keys live in the "" section
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    static const std::set<std::string> known_sections = {
        "",       "grid",  "model", "sampler", "phi",
        "ensemble", "covariance", "rooms", "decay", "verify", "output"};
    while (std::getline(is, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("line " + std::to_string(lineno) + ": malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (known_sections.count(section) == 0)
                throw ConfigError("unknown section [" + section + "]");
            continue;
        }
        std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(lineno) + ": empty key");
        if (sections[section].count(key))
            throw ConfigError("duplicate key '" + key + "' in section [" + section + "]");
        sections[section][key] = value;
    }
    return sections;
}

}  // namespace

ExperimentConfig ExperimentConfig::parse_file(const std::string& path)
{
    return parse(read_text_file(path));
}

ExperimentConfig ExperimentConfig::parse(const std::string& text)
{
    Reader r(tokenize(text));
    ExperimentConfig c;

    c.experiment = experiment_from_string(r.take("", "experiment", "verify"));

    c.grid = GridSpec(int(parse_integer("grid", "n", r.take("grid", "n", "64"))),
                      parse_number("grid", "length", r.take("grid", "length", "64")));
    c.mass = parse_number("model", "mass", r.take("model", "mass", "1"));

    c.sampler.grid = c.grid;
    c.sampler.kind = sampler_kind_from_string(r.take("sampler", "kind", "gaussian_spectral"));
    c.sampler.seed = std::uint64_t(parse_integer("sampler", "seed", r.take("sampler", "seed", "1")));
    c.sampler.family = symbol_family_from_string(r.take("sampler", "symbol", "gaussian_bump"));
    c.sampler.kappa = parse_number("sampler", "kappa", r.take("sampler", "kappa", "1"));
    c.sampler.scale = parse_number("sampler", "scale", r.take("sampler", "scale", "1"));
    if (r.has("sampler", "weights")) {
        auto w = parse_list("sampler", "weights", r.take("sampler", "weights", ""));
        if (w.size() != 8) throw ConfigError("[sampler] weights: expected 8 values");
        for (int i = 0; i < 8; ++i) c.sampler.weights[i] = w[i];
    }
    c.sampler.kernel_radius =
        parse_number("sampler", "kernel_radius", r.take("sampler", "kernel_radius", "3"));
    c.sampler.kernel_amplitude = parse_number("sampler", "kernel_amplitude",
                                              r.take("sampler", "kernel_amplitude", "0"));

    std::string bump_kind = r.take("phi", "kind", "smooth");
    if (bump_kind == "point")
        c.phi.bump.kind = BumpKind::point;
    else if (bump_kind == "smooth")
        c.phi.bump.kind = BumpKind::smooth;
    else if (bump_kind == "gauss_taper")
        c.phi.bump.kind = BumpKind::gauss_taper;
    else
        throw ConfigError("[phi] kind: unknown test-function kind '" + bump_kind + "'");
    c.phi.bump.radius = parse_number("phi", "radius", r.take("phi", "radius", "4"));
    c.phi.bump.sigma = parse_number("phi", "sigma", r.take("phi", "sigma", "2.2"));
    c.phi.bump.component = int(parse_integer("phi", "component", r.take("phi", "component", "0")));
    c.phi.bump.amplitude = parse_number("phi", "amplitude", r.take("phi", "amplitude", "1"));
    c.phi.normalize_variance =
        parse_bool("phi", "normalize_variance", r.take("phi", "normalize_variance", "false"));

    c.ensemble_times = parse_list("ensemble", "times", r.take("ensemble", "times", "0, 24"));
    c.ensemble_samples =
        int(parse_integer("ensemble", "samples", r.take("ensemble", "samples", "10000")));
    c.lambdas = parse_list("ensemble", "lambdas", r.take("ensemble", "lambdas", "0.5, 1, 2"));
    c.spot_checks = int(parse_integer("ensemble", "spot_checks",
                                      r.take("ensemble", "spot_checks", "10")));
    c.sampler_suite =
        parse_bool("ensemble", "sampler_suite", r.take("ensemble", "sampler_suite", "false"));

    c.covariance_times = parse_list("covariance", "times",
                                    r.take("covariance", "times", "2, 2.83, 4, 5.66, 8, 11.31, 16, 20"));
    std::string probes = r.take("covariance", "probes", "0 0 0; 1 0 0; 2 1 0; 3 0 0; 0 2 2; 4 2 1");
    c.probes.clear();
    for (const std::string& triple : split(probes, ';')) {
        if (triple.empty()) continue;
        std::istringstream ts(triple);
        int x, y, z;
        if (!(ts >> x >> y >> z))
            throw ConfigError("[covariance] probes: expected 'x y z' triples separated by ';'");
        c.probes.emplace_back(x, y, z);
    }

    c.rooms_times = parse_list("rooms", "times", r.take("rooms", "times", "4, 8, 16, 24"));
    c.rooms_delta = parse_number("rooms", "delta", r.take("rooms", "delta", "0.75"));
    c.rooms_samples = int(parse_integer("rooms", "samples", r.take("rooms", "samples", "2000")));

    c.decay_times = parse_list("decay", "times",
                               r.take("decay", "times", "8, 11.31, 16, 22.63, 32, 45.25"));
    c.decay_masses = parse_list("decay", "masses", r.take("decay", "masses", "1, 2"));

    c.verify_random_k =
        int(parse_integer("verify", "random_k", r.take("verify", "random_k", "1000")));
    c.verify_seminorm_radius = parse_number("verify", "seminorm_radius",
                                            r.take("verify", "seminorm_radius", "10"));
    c.fixed_point_times = parse_list("verify", "fixed_point_times",
                                     r.take("verify", "fixed_point_times", "1, 10, 100"));
    c.average_windows =
        parse_list("verify", "average_windows", r.take("verify", "average_windows", "25, 50, 100"));

    c.out_dir = r.take("output", "directory", "out");
    c.threads = int(parse_integer("output", "threads", r.take("output", "threads", "1")));
    c.dump_fields = parse_bool("output", "dump_fields", r.take("output", "dump_fields", "false"));

    r.finish();
    return c;
}

std::string ExperimentConfig::serialize() const
{
    std::ostringstream os;
    auto num = [](double v) { return format_double(v); };
    auto list = [&](const std::vector<double>& vs) {
        std::string s;
        for (std::size_t i = 0; i < vs.size(); ++i) s += (i ? ", " : "") + num(vs[i]);
        return s;
    };
    os << "experiment = " << to_string(experiment) << "\n\n";
    os << "[grid]\nn = " << grid.n << "\nlength = " << num(grid.length) << "\n\n";
    os << "[model]\nmass = " << num(mass) << "\n\n";
    os << "[sampler]\nkind = " << dirac::to_string(sampler.kind) << "\nseed = " << sampler.seed
       << "\nsymbol = " << dirac::to_string(sampler.family) << "\nkappa = " << num(sampler.kappa)
       << "\nscale = " << num(sampler.scale) << "\nweights = ";
    for (int i = 0; i < 8; ++i) os << (i ? ", " : "") << num(sampler.weights[i]);
    os << "\nkernel_radius = " << num(sampler.kernel_radius)
       << "\nkernel_amplitude = " << num(sampler.kernel_amplitude) << "\n\n";
    os << "[phi]\nkind = "
       << (phi.bump.kind == BumpKind::point
               ? "point"
               : phi.bump.kind == BumpKind::smooth ? "smooth" : "gauss_taper")
       << "\nradius = " << num(phi.bump.radius) << "\nsigma = " << num(phi.bump.sigma)
       << "\ncomponent = " << phi.bump.component << "\namplitude = " << num(phi.bump.amplitude)
       << "\nnormalize_variance = " << (phi.normalize_variance ? "true" : "false") << "\n\n";
    os << "[ensemble]\ntimes = " << list(ensemble_times) << "\nsamples = " << ensemble_samples
       << "\nlambdas = " << list(lambdas) << "\nspot_checks = " << spot_checks
       << "\nsampler_suite = " << (sampler_suite ? "true" : "false") << "\n\n";
    os << "[covariance]\ntimes = " << list(covariance_times) << "\nprobes = ";
    for (std::size_t i = 0; i < probes.size(); ++i)
        os << (i ? "; " : "") << probes[i][0] << " " << probes[i][1] << " " << probes[i][2];
    os << "\n\n";
    os << "[rooms]\ntimes = " << list(rooms_times) << "\ndelta = " << num(rooms_delta)
       << "\nsamples = " << rooms_samples << "\n\n";
    os << "[decay]\ntimes = " << list(decay_times) << "\nmasses = " << list(decay_masses)
       << "\n\n";
    os << "[verify]\nrandom_k = " << verify_random_k
       << "\nseminorm_radius = " << num(verify_seminorm_radius)
       << "\nfixed_point_times = " << list(fixed_point_times)
       << "\naverage_windows = " << list(average_windows) << "\n\n";
    os << "[output]\ndirectory = " << out_dir << "\nthreads = " << threads
       << "\ndump_fields = " << (dump_fields ? "true" : "false") << "\n";
    return os.str();
}

void ExperimentConfig::validate() const
{
    const double half = 0.5 * grid.length;
    if (!(mass > 0.0)) throw ConfigError("[model] mass must be positive");
    if (threads < 1) throw ConfigError("[output] threads must be >= 1");
    if (phi.bump.radius >= half) throw ConfigError("[phi] radius must be < L/2");

    double corr = 0.0;
    try {
        Sampler sampler_probe(sampler);  // validates kernel support <= L/4
        corr = sampler_probe.correlation_range();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("[sampler] ") + e.what());
    }

    auto check_budget = [&](double t, const char* what) {
        if (!(std::abs(t) + phi.bump.radius + corr < half))
            throw ConfigError(std::string(what) +
                              ": no-wraparound budget violated at t = " + format_double(t) +
                              " (t + phi radius + correlation range must be < L/2)");
    };

    switch (experiment) {
        case ExperimentKind::verify:
            if (verify_random_k < 1) throw ConfigError("[verify] random_k must be >= 1");
            if (!(verify_seminorm_radius < half))
                throw ConfigError("[verify] seminorm_radius must be < L/2");
            break;
        case ExperimentKind::covariance:
            for (const auto& p : probes)
                if (p.cwiseAbs().maxCoeff() * grid.h() >= half)
                    throw ConfigError("[covariance] probe offset exceeds L/2");
            if (covariance_times.empty()) throw ConfigError("[covariance] times must not be empty");
            break;
        case ExperimentKind::ensemble:
            if (ensemble_samples < 2) throw ConfigError("[ensemble] samples must be >= 2");
            for (double t : ensemble_times) check_budget(t, "[ensemble]");
            break;
        case ExperimentKind::rooms:
            if (rooms_samples < 4) throw ConfigError("[rooms] samples must be >= 4");
            if (!(rooms_delta > 0.0 && rooms_delta < 1.0))
                throw ConfigError("[rooms] delta must be in (0,1)");
            for (double t : rooms_times) {
                if (!(t > 0.0)) throw ConfigError("[rooms] times must be positive");
                check_budget(t, "[rooms]");
            }
            break;
        case ExperimentKind::decay:
            for (double m : decay_masses)
                if (!(m > 0.0)) throw ConfigError("[decay] masses must be positive");
            for (double t : decay_times)
                if (!(std::abs(t) + phi.bump.radius < half))
                    throw ConfigError("[decay] t + phi radius must be < L/2");
            break;
    }
}

bool ExperimentConfig::operator==(const ExperimentConfig& o) const
{
    return serialize() == o.serialize();
}

}  // namespace dirac
