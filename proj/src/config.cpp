#include "config.hpp"

#include <fstream>
#include <sstream>

namespace walklab::cli {

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); }

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(s);
    while (std::getline(is, cur, sep)) out.push_back(cur);
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

int parse_int(const std::string& s, const std::string& what) {
    try {
        size_t used = 0;
        const int v = std::stoi(trim(s), &used);
        if (used != trim(s).size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        config_error("bad integer '" + s + "' in " + what);
    }
}

LatticeVector parse_pos(const std::string& s, int d) {
    LatticeVector v;
    for (const auto& part : split(s, ',')) v.push_back(parse_int(part, "position"));
    if (static_cast<int>(v.size()) != d)
        config_error("position '" + s + "' has " + std::to_string(v.size()) + " components, walk has d=" +
                     std::to_string(d));
    return v;
}

LatticeVector json_pos(const json& v, int d) {
    LatticeVector p;
    if (v.is_number_integer()) p.push_back(v.get<int>());
    else if (v.is_array())
        for (const auto& c : v) p.push_back(c.get<int>());
    else config_error("lattice vector must be an integer or an array of integers");
    if (static_cast<int>(p.size()) != d) config_error("lattice vector has wrong dimension");
    return p;
}

double json_real(const json& v) {
    const cplx z = json_amplitude(v);
    if (std::abs(z.imag()) > 1e-15) config_error("expected a real number");
    return z.real();
}

std::vector<cplx> json_amplitudes(const json& v) {
    std::vector<cplx> out;
    if (v.is_string()) {
        for (const auto& part : split(v.get<std::string>(), ',')) out.push_back(parse_amplitude(part));
    } else if (v.is_array()) {
        for (const auto& x : v) out.push_back(json_amplitude(x));
    } else config_error("expected a list of amplitudes");
    return out;
}

AmplitudeTable json_table(const json& rows, int d) {
    AmplitudeTable t;
    for (const auto& r : rows) {
        // Spin labels in configuration files are 1-based.
        Amplitude a;
        a.i = r.at("i").get<int>() - 1;
        a.j = r.at("j").get<int>() - 1;
        a.p = json_pos(r.at("p"), d);
        a.value = json_amplitude(r.at("value"));
        t.push_back(a);
    }
    return t;
}

ModelParams json_model(const json& m) {
    ModelParams p;
    if (m.is_string()) {
        p.model = m.get<std::string>();
        return p;
    }
    if (!m.is_object()) config_error("model must be a name or an object");
    p.model = m.value("name", std::string("hadamard"));
    if (m.contains("a")) p.a = json_amplitude(m["a"]);
    if (m.contains("b")) p.b = json_amplitude(m["b"]);
    if (m.contains("c")) p.c = json_amplitude(m["c"]);
    if (m.contains("d") && p.model != "custom") p.d = json_amplitude(m["d"]);
    if (m.contains("alpha")) p.alpha = m["alpha"].get<int>();
    if (m.contains("beta")) p.beta = m["beta"].get<int>();
    if (m.contains("r")) p.r = json_real(m["r"]);
    if (m.contains("t")) p.t = json_real(m["t"]);
    if (m.contains("dim")) p.dim = m["dim"].get<int>();
    if (m.contains("coin")) p.coin = json_amplitudes(m["coin"]);
    if (m.contains("parts")) {
        const json& parts = m["parts"];
        if (parts.is_string())
            for (const auto& name : split(parts.get<std::string>(), ',')) p.parts.push_back(json_model(trim(name)));
        else
            for (const auto& q : parts) p.parts.push_back(json_model(q));
    }
    if (p.model == "custom") {
        p.custom_d = m.value("d", 1);
        p.custom_nu = m.value("nu", 1);
        if (!m.contains("amplitudes")) config_error("custom model needs an 'amplitudes' table");
        p.custom = json_table(m["amplitudes"], p.custom_d);
    }
    return p;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        config_error("cannot parse '" + path + "': " + e.what());
    }
}

}  // namespace

cplx json_amplitude(const json& v) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) return parse_amplitude(v.get<std::string>());
    if (v.is_array() && v.size() == 2) return {v[0].get<double>(), v[1].get<double>()};
    config_error("expected a number, an amplitude expression or [re, im]");
}

std::vector<StateEntry> parse_state_string(const std::string& s, int d) {
    std::vector<StateEntry> out;
    for (const auto& raw : split(s, ';')) {
        const std::string item = trim(raw);
        if (item.empty()) continue;
        const auto parts = split(item, ':');
        if (parts.size() != 3) config_error("state entry '" + item + "' is not pos:spinJ:amp");
        std::string spin = trim(parts[1]);
        if (spin.rfind("spin", 0) == 0) spin = spin.substr(4);
        StateEntry e;
        e.pos = parse_pos(parts[0], d);
        e.spin = parse_int(spin, "spin label") - 1;
        if (e.spin < 0) config_error("spin labels start at 1 in '" + item + "'");
        e.amp = parse_amplitude(parts[2]);
        out.push_back(e);
    }
    if (out.empty()) config_error("state is empty");
    return out;
}

Observable parse_observable_preset(const std::string& s, int N, int d) {
    const auto colon = s.find(':');
    const std::string name = trim(s.substr(0, colon));
    const std::string arg = colon == std::string::npos ? "" : s.substr(colon + 1);
    if (name == "odd") return parity_indicator(N, d, 1);
    if (name == "even") return parity_indicator(N, d, 0);
    if (name == "const") return constant_observable(N, d, arg.empty() ? cplx{1.0} : parse_amplitude(arg));
    if (name == "delta" || name == "set") {
        // Summable: indicator of the listed sites, restricted to the box.
        std::vector<std::pair<LatticeVector, cplx>> t;
        for (const auto& p : split(arg, ';'))
            if (!trim(p).empty()) t.push_back({parse_pos(p, d), 1.0});
        if (t.empty()) config_error("observable '" + s + "' lists no sites");
        return Observable::summable(std::move(t));
    }
    if (name == "indicator") {
        // indicator:x0,x1,... in d=1 (sites are reduced mod N)
        if (d != 1) config_error("indicator preset is for d=1; use set:pos;pos");
        std::vector<cplx> v(N);
        for (const auto& p : split(arg, ',')) {
            long long x = parse_int(p, "indicator site") % N;
            if (x < 0) x += N;
            v[x] = 1.0;
        }
        return Observable::bounded(N, std::move(v));
    }
    if (name == "cos") {
        // cos:m  gives cos(2 pi m x / N) as a sampled field in d=1
        if (d != 1) config_error("cos preset is for d=1");
        const int m = arg.empty() ? 1 : parse_int(arg, "cos frequency");
        return Observable::sampled({{{m}, 0.5}, {{-m}, 0.5}});
    }
    config_error("unknown observable preset '" + s + "'");
}

namespace {

Observable json_observable(const json& o, int N, int d) {
    if (o.is_string()) return parse_observable_preset(o.get<std::string>(), N, d);
    const std::string kind = o.value("kind", std::string("bounded"));
    if (kind == "bounded") {
        if (o.contains("preset")) return parse_observable_preset(o["preset"].get<std::string>(), N, d);
        std::vector<cplx> v;
        for (const auto& x : o.at("values")) v.push_back(json_amplitude(x));
        if (static_cast<long long>(v.size()) != ipow(N, d)) config_error("bounded observable has wrong length");
        return Observable::bounded(N, std::move(v));
    }
    std::vector<std::pair<LatticeVector, cplx>> t;
    for (const auto& r : o.at("table")) t.push_back({json_pos(r.at(kind == "sampled" ? "m" : "p"), d), json_amplitude(r.at("value"))});
    if (kind == "sampled") return Observable::sampled(std::move(t));
    if (kind == "summable") return Observable::summable(std::move(t));
    config_error("unknown observable kind '" + kind + "'");
}

}  // namespace

ModelParams ExperimentConfig::model_params() const {
    if (doc.contains("walk_file")) {
        const json f = read_json_file(doc["walk_file"].get<std::string>());
        return json_model(f.contains("model") ? f["model"] : f);
    }
    return json_model(doc.contains("model") ? doc["model"] : json("hadamard"));
}

WalkSpec ExperimentConfig::walk() const { return make_model(model_params()); }

std::vector<int> ExperimentConfig::box_sizes() const {
    std::vector<int> out;
    if (doc.contains("N")) {
        const json& n = doc["N"];
        if (n.is_array())
            for (const auto& x : n) out.push_back(x.get<int>());
        else out.push_back(n.get<int>());
    } else if (doc.contains("subsequence")) {
        const json& s = doc["subsequence"];
        const long long M = s.at("M").get<long long>(), k = s.at("k").get<long long>();
        const auto range = s.at("n");
        for (long long n = range.at(0).get<long long>(); n <= range.at(1).get<long long>(); ++n)
            out.push_back(static_cast<int>(n * M + k));
    }
    for (int N : out)
        if (N < 1) config_error("box sizes must be positive");
    return out;
}

int ExperimentConfig::box_size() const {
    const auto v = box_sizes();
    if (v.empty()) config_error("this command needs a box size (--N or subsequence)");
    return v.front();
}

std::vector<StateEntry> ExperimentConfig::state() const {
    const int d = walk().d();
    if (!doc.contains("state")) config_error("this command needs an initial state (--state)");
    const json& s = doc["state"];
    std::vector<StateEntry> out;
    if (s.is_string()) out = parse_state_string(s.get<std::string>(), d);
    else
        for (const auto& e : s) out.push_back({json_pos(e.at("pos"), d), e.at("spin").get<int>() - 1, json_amplitude(e.at("amp"))});
    return normalized(out);
}

Observable ExperimentConfig::observable(int N, int d) const {
    if (!doc.contains("observable")) config_error("this command needs an observable (--observable)");
    return json_observable(doc["observable"], N, d);
}

std::vector<Observable> ExperimentConfig::spin_observable(int N, int d, int nu) const {
    if (!doc.contains("spin_observable")) config_error("this command needs a spin observable (--spin-observable)");
    const json& s = doc["spin_observable"];
    std::vector<Observable> out;
    if (s.is_string())
        for (const auto& p : split(s.get<std::string>(), '|')) out.push_back(parse_observable_preset(trim(p), N, d));
    else
        for (const auto& o : s) out.push_back(json_observable(o, N, d));
    if (static_cast<int>(out.size()) != nu)
        config_error("spin observable has " + std::to_string(out.size()) + " components, walk has nu=" + std::to_string(nu));
    return out;
}

std::vector<LatticeVector> ExperimentConfig::window(int d) const {
    const std::string w = str("window", "-5:5");
    const auto parts = split(w, ':');
    if (parts.size() != 2) config_error("window must be lo:hi");
    const int lo = parse_int(parts[0], "window"), hi = parse_int(parts[1], "window");
    if (lo > hi) config_error("window is empty");
    // Cube [lo, hi]^d in lexicographic order.
    std::vector<LatticeVector> out;
    LatticeVector x(d, lo);
    while (true) {
        out.push_back(x);
        int a = d - 1;
        while (a >= 0 && x[a] == hi) x[a--] = lo;
        if (a < 0) break;
        ++x[a];
    }
    return out;
}

std::optional<long long> ExperimentConfig::opt_int(const std::string& key) const {
    if (!doc.contains(key)) return std::nullopt;
    return doc[key].get<long long>();
}

std::string ExperimentConfig::str(const std::string& key, const std::string& fallback) const {
    return doc.contains(key) ? doc[key].get<std::string>() : fallback;
}

double ExperimentConfig::num(const std::string& key, double fallback) const {
    if (!doc.contains(key)) return fallback;
    return json_real(doc[key]);
}

void ExperimentConfig::validate() const {
    for (const char* key : {"group_tol", "eig_tol", "relation_tol", "G", "q_max", "Q", "T"})
        if (doc.contains(key) && !(num(key, 1.0) > 0.0)) config_error(std::string(key) + " must be positive");
    if (doc.contains("N") && doc.contains("subsequence")) config_error("give either N or subsequence, not both");
    box_sizes();
}

ExperimentConfig load_config(const std::string& command, const Overrides& o) {
    ExperimentConfig cfg;
    cfg.command = command;
    if (o.config) cfg.doc = read_json_file(*o.config);
    if (!cfg.doc.is_object() && !cfg.doc.is_null()) config_error("configuration must be an object");
    if (cfg.doc.is_null()) cfg.doc = json::object();
    if (cfg.doc.contains("command") && cfg.doc["command"].get<std::string>() != command)
        config_error("configuration is for command '" + cfg.doc["command"].get<std::string>() + "'");
    json& d = cfg.doc;

    // Model flags are merged into the model section.
    const bool model_flags = o.model || o.a || o.b || o.c || o.d || o.r || o.t || o.coin || o.alpha || o.beta ||
                             o.dim || o.parts;
    if (model_flags) {
        json m = d.contains("model") ? d["model"] : json::object();
        if (m.is_string()) m = json{{"name", m.get<std::string>()}};
        if (o.model) {
            if (m.value("name", std::string()) != *o.model) m = json::object();
            m["name"] = *o.model;
        }
        if (o.a) m["a"] = *o.a;
        if (o.b) m["b"] = *o.b;
        if (o.c) m["c"] = *o.c;
        if (o.d) m["d"] = *o.d;
        if (o.r) m["r"] = *o.r;
        if (o.t) m["t"] = *o.t;
        if (o.coin) m["coin"] = *o.coin;
        if (o.alpha) m["alpha"] = *o.alpha;
        if (o.beta) m["beta"] = *o.beta;
        if (o.dim) m["dim"] = *o.dim;
        if (o.parts) m["parts"] = *o.parts;
        d["model"] = m;
        d.erase("walk_file");
    }
    if (o.walk_file) {
        d["walk_file"] = *o.walk_file;
        d.erase("model");
    }
    if (o.N) {
        d["N"] = *o.N;
        d.erase("subsequence");
    }
    if (o.state) d["state"] = *o.state;
    if (o.observable) d["observable"] = *o.observable;
    if (o.spin_observable) d["spin_observable"] = *o.spin_observable;
    if (o.window) d["window"] = *o.window;
    if (o.output) d["output"] = *o.output;
    if (o.method) d["method"] = *o.method;
    if (o.theta) d["theta"] = *o.theta;
    if (o.k) d["k"] = *o.k;
    if (o.M) d["M"] = *o.M;
    if (o.G) d["G"] = *o.G;
    if (o.q_max) d["q_max"] = *o.q_max;
    if (o.Q) d["Q"] = *o.Q;
    if (o.spin) d["j"] = *o.spin;
    if (o.n_max) d["n_max"] = *o.n_max;
    if (o.T) d["T"] = *o.T;
    if (o.steps) d["steps"] = *o.steps;
    if (o.group_tol) d["group_tol"] = *o.group_tol;
    if (o.eig_tol) d["eig_tol"] = *o.eig_tol;
    if (o.rel_tol) d["relation_tol"] = *o.rel_tol;
    try {
        cfg.validate();
    } catch (const json::exception& e) {
        config_error(e.what());
    }
    return cfg;
}

}  // namespace walklab::cli
