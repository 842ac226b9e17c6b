#include "commands.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

namespace walklab::cli {

namespace {

constexpr double kMassTol = 1e-8;

[[noreturn]] void invariant_error(const std::string& msg) { throw Error(ErrorKind::ConvergenceFailure, msg); }

std::string label(int zero_based) { return std::to_string(zero_based + 1); }

std::string coords(const LatticeVector& v) {
    std::string s;
    for (size_t a = 0; a < v.size(); ++a) s += (a ? "," : "") + std::to_string(v[a]);
    return s;
}

std::string coord_header(const std::string& prefix, int d) {
    if (d == 1) return prefix;
    std::string s;
    for (int a = 1; a <= d; ++a) s += (a > 1 ? "," : "") + prefix + std::to_string(a);
    return s;
}

std::string model_name(const ExperimentConfig& cfg) {
    if (cfg.doc.contains("walk_file")) return "file:" + cfg.doc["walk_file"].get<std::string>();
    return cfg.model_params().model;
}

RelationOptions relation_options(const ExperimentConfig& cfg) {
    RelationOptions ro;
    ro.q_max = cfg.q_max();
    ro.G = cfg.G(256);
    ro.tol = cfg.rel_tol();
    return ro;
}

// Re-verifies that probability columns carry the declared mass before emitting.
void check_mass(const MeasurePair& m, double declared) {
    if (std::abs(m.total.mass() - declared) > kMassTol)
        invariant_error("measure mass " + fmt(m.total.mass()) + " differs from " + fmt(declared));
    double spin_mass = 0.0;
    for (const auto& ps : m.per_spin) spin_mass += ps.mass();
    if (std::abs(spin_mass - declared) > kMassTol) invariant_error("per-spin columns do not add up to the total mass");
}

void emit_measure(std::ostringstream& os, const MeasurePair& m) {
    const int d = m.total.d, nu = static_cast<int>(m.per_spin.size());
    os << coord_header("x", d) << ",weight";
    for (int j = 0; j < nu; ++j) os << ",spin" << label(j);
    os << "\n";
    for (size_t x = 0; x < m.total.weights.size(); ++x) {
        os << coords(unflatten(static_cast<long long>(x), m.total.N, d)) << "," << fmt(m.total.weights[x]);
        for (const auto& ps : m.per_spin) os << "," << fmt(ps.weights[x]);
        os << "\n";
    }
}

MeasurePair measure_for(const ExperimentConfig& cfg, const WalkSpec& w, const BoxState& s) {
    const std::string method = cfg.str("method", "limit");
    if (method == "limit") return limit_measure(w, s, cfg.group_tol());
    if (method == "time") return time_avg_measure(w, s, cfg.T());
    throw Error(ErrorKind::ConfigError, "method must be 'limit' or 'time'");
}

std::string cmd_validate(const ExperimentConfig& cfg) {
    const ModelParams mp = cfg.model_params();
    WalkSpec w = mp.model == "custom"
                     ? build_walk(mp.custom_d, mp.custom_nu, mp.custom, std::numeric_limits<double>::infinity())
                     : make_model(mp);
    const bool unitary = w.unitarity_residual() < kUnitarityTol;
    std::ostringstream os;
    os << "model: " << model_name(cfg) << "\n"
       << "d: " << w.d() << "\n"
       << "nu: " << w.nu() << "\n"
       << "range: " << w.range() << "\n"
       << "jumps: " << w.jumps().size() << "\n"
       << "unitary: " << (unitary ? "true" : "false") << "\n"
       << "max_residual: " << fmt(w.unitarity_residual()) << "\n";
    if (!unitary) throw Error(ErrorKind::UnitarityViolation, os.str());
    return os.str();
}

std::string cmd_spectrum(const ExperimentConfig& cfg) {
    const WalkSpec w = cfg.walk();
    BranchOptions opt;
    opt.periods = static_cast<int>(cfg.num("periods", 1));
    const BranchTable bt = branch_table(w, cfg.G(64), opt);
    std::ostringstream os;
    os << "# G=" << bt.G << " doublings=" << bt.doublings << " refine_needed=" << (bt.refine_needed ? 1 : 0)
       << " monodromy=";
    for (size_t s = 0; s < bt.monodromy.size(); ++s) os << (s ? " " : "") << label(bt.monodromy[s]);
    os << "\n";
    os << "t,branch,re,im,angle\n";
    for (int i = 0; i < bt.samples(); ++i)
        for (int s = 0; s < bt.nu(); ++s) {
            const cplx z = bt.branches[s][i];
            os << fmt(static_cast<double>(i) / bt.G) << "," << label(s) << "," << fmt(z.real()) << "," << fmt(z.imag())
               << "," << fmt(std::arg(z)) << "\n";
        }
    return os.str();
}

std::string cmd_flatbands(const ExperimentConfig& cfg) {
    const WalkSpec w = cfg.walk();
    const auto fb = detect_flat_bands(w, static_cast<int>(cfg.num("G", 0)), cfg.eig_tol());
    std::ostringstream os;
    os << "re,im,angle\n";
    for (const cplx& z : fb) os << fmt(z.real()) << "," << fmt(z.imag()) << "," << fmt(std::arg(z)) << "\n";
    return os.str();
}

std::string cmd_nrg(const ExperimentConfig& cfg) {
    const WalkSpec w = cfg.walk();
    std::ostringstream os;
    for (int N : cfg.box_sizes()) {
        const NrgReport r = nrg_statistic(w, N, cfg.eig_tol());
        os << "# N=" << N << " sup_ratio=" << fmt(r.sup_ratio) << " argmax=" << format_vector(r.argmax)
           << " sup_ratio_fine=" << fmt(r.sup_ratio_fine) << " tolerance_sensitive=" << (r.tolerance_sensitive ? 1 : 0)
           << "\n";
        os << "N," << coord_header("m", w.d()) << ",s,w,count,ratio\n";
        for (const NrgRow& row : r.rows)
            os << N << "," << coords(row.m) << "," << (row.s < 0 ? "*" : label(row.s)) << ","
               << (row.w < 0 ? "*" : label(row.w)) << "," << row.count << "," << fmt(row.ratio) << "\n";
    }
    if (cfg.box_sizes().empty()) throw Error(ErrorKind::ConfigError, "nrg needs --N");
    return os.str();
}

std::string cmd_relations(const ExperimentConfig& cfg) {
    const WalkSpec w = cfg.walk();
    const auto rel = detect_phase_relations(w, relation_options(cfg));
    const long long M = compute_M(rel);
    std::ostringstream os;
    os << "# M=" << M << "\n";
    for (long long k = 1; k <= M; ++k) {
        os << "# subsequence k=" << k << ":";
        for (long long n = 1; n <= 5; ++n) os << " " << subsequence(M, k, n);
        os << "\n";
    }
    os << "s,w,p,q,phi,xi,xi_fraction,residual,breaks_nrg,charpoly_check\n";
    for (const auto& r : rel)
        os << label(r.s) << "," << label(r.w) << "," << r.p << "," << r.q << "," << fmt(r.phi()) << "," << fmt(r.xi)
           << "," << (r.snapped ? std::to_string(r.xi_num) + "/" + std::to_string(r.xi_den) : std::string("-")) << ","
           << fmt(r.residual) << "," << (r.breaks_nrg ? 1 : 0) << "," << r.charpoly_check << "\n";
    return os.str();
}

std::string cmd_charpoly(const ExperimentConfig& cfg) {
    const WalkSpec w = cfg.walk();
    const LaurentPoly p = laurent_charpoly(w);
    const auto zs = zeta_shift_invariances(p, cfg.Q());
    std::ostringstream os;
    os << "# zeta_shifts Q=" << cfg.Q() << " count=" << zs.size() << "\n";
    for (const auto& z : zs) {
        os << "# zeta";
        for (auto& [a, q] : z.t) os << " " << a << "/" << q;
        os << "\n";
    }
    os << coord_header("z", w.d()) << ",lambda,re,im\n";
    for (const auto& [m, c] : p.terms())
        os << coords(m.zexp) << "," << m.lam << "," << fmt(c.real()) << "," << fmt(c.imag()) << "\n";
    return os.str();
}

std::string cmd_evolve(const ExperimentConfig& cfg) {
    const WalkSpec w = cfg.walk();
    const BoxState s0 = make_box_state(cfg.box_size(), w.d(), w.nu(), cfg.state());
    const std::string method = cfg.str("method", "momentum");
    BoxState s;
    if (method == "momentum") s = evolve(w, s0, cfg.steps());
    else if (method == "direct") s = evolve_direct(w, s0, cfg.steps());
    else throw Error(ErrorKind::ConfigError, "method must be 'momentum' or 'direct'");
    if (std::abs(s.norm2() - 1.0) > kMassTol) invariant_error("evolution lost norm: " + fmt(s.norm2()));
    std::ostringstream os;
    os << coord_header("x", w.d()) << ",spin,re,im\n";
    for (long long x = 0; x < s.sites(); ++x)
        for (int j = 0; j < s.nu; ++j) {
            const cplx z = s.at(x, j);
            os << coords(unflatten(x, s.N, s.d)) << "," << label(j) << "," << fmt(z.real()) << "," << fmt(z.imag())
               << "\n";
        }
    return os.str();
}

std::string cmd_measure(const ExperimentConfig& cfg, bool limit) {
    const WalkSpec w = cfg.walk();
    const BoxState s = make_box_state(cfg.box_size(), w.d(), w.nu(), cfg.state());
    const MeasurePair m = limit ? limit_measure(w, s, cfg.group_tol()) : time_avg_measure(w, s, cfg.T());
    check_mass(m, 1.0);
    std::ostringstream os;
    if (limit)
        os << "# clusters=" << m.clusters << " grouping_unstable=" << (m.grouping_unstable ? 1 : 0) << "\n";
    else
        os << "# T=" << cfg.T() << "\n";
    emit_measure(os, m);
    return os.str();
}

std::string cmd_pqe(const ExperimentConfig& cfg) {
    const WalkSpec w = cfg.walk();
    const auto psi = cfg.state();
    std::ostringstream os;
    os << "N,integral_re,integral_im,uniform_re,uniform_im,gap\n";
    for (int N : cfg.box_sizes()) {
        const BoxState s = make_box_state(N, w.d(), w.nu(), psi);
        const MeasurePair m = measure_for(cfg, w, s);
        check_mass(m, 1.0);
        const Observable phi = cfg.observable(N, w.d());
        const cplx lim = integrate(m.total, phi.on_box(N, w.d()));
        const cplx uni = uniform_average(phi, N, w.d());
        os << N << "," << fmt(lim.real()) << "," << fmt(lim.imag()) << "," << fmt(uni.real()) << "," << fmt(uni.imag())
           << "," << fmt(std::abs(lim - uni)) << "\n";
    }
    if (cfg.box_sizes().empty()) throw Error(ErrorKind::ConfigError, "pqe needs --N");
    return os.str();
}

std::string cmd_fqe(const ExperimentConfig& cfg) {
    const WalkSpec w = cfg.walk();
    const auto psi = cfg.state();
    std::ostringstream os;
    os << "N,limit_re,limit_im,target_re,target_im,gap\n";
    for (int N : cfg.box_sizes()) {
        const BoxState s = make_box_state(N, w.d(), w.nu(), psi);
        const auto a = cfg.spin_observable(N, w.d(), w.nu());
        const MeasurePair m = measure_for(cfg, w, s);
        check_mass(m, 1.0);
        const cplx lim = pair_with(m, spin_tables(a, N, w.d()));
        const cplx tgt = target_average(w, s, a, cfg.group_tol());
        os << N << "," << fmt(lim.real()) << "," << fmt(lim.imag()) << "," << fmt(tgt.real()) << "," << fmt(tgt.imag())
           << "," << fmt(std::abs(lim - tgt)) << "\n";
    }
    if (cfg.box_sizes().empty()) throw Error(ErrorKind::ConfigError, "fqe needs --N");
    return os.str();
}

std::string cmd_tvd(const ExperimentConfig& cfg) {
    const WalkSpec w = cfg.walk();
    const auto psi = cfg.state();
    std::ostringstream os;
    os << "N,tvd\n";
    for (int N : cfg.box_sizes()) {
        const BoxState s = make_box_state(N, w.d(), w.nu(), psi);
        const MeasurePair m = measure_for(cfg, w, s);
        check_mass(m, 1.0);
        os << N << "," << fmt(tv_distance(m.total, uniform_measure(N, w.d()))) << "\n";
    }
    if (cfg.box_sizes().empty()) throw Error(ErrorKind::ConfigError, "tvd needs --N");
    return os.str();
}

std::string cmd_subset_coefs(const ExperimentConfig& cfg) {
    const WalkSpec w = cfg.walk();
    const auto psi = cfg.state();
    const auto rel = detect_phase_relations(w, relation_options(cfg));
    const long long M = cfg.opt_int("M").value_or(compute_M(rel));
    const long long k = cfg.opt_int("k").value_or(1);
    const auto sc = subset_coefficients(w, psi, k, M, rel, static_cast<int>(cfg.num("G", 512)), cfg.rel_tol());
    std::ostringstream os;
    os << "# M=" << M << " k=" << k << " G=" << sc.G << " offset=" << fmt(sc.offset)
       << " quadrature_error=" << fmt(sc.quadrature_error) << "\n";
    os << "u,re,im\n";
    for (long long u = 0; u < M; ++u) os << u << "," << fmt(sc.c[u].real()) << "," << fmt(sc.c[u].imag()) << "\n";
    return os.str();
}

std::string cmd_cpsij(const ExperimentConfig& cfg) {
    const WalkSpec w = cfg.walk();
    const auto psi = cfg.state();
    std::vector<int> spins;
    if (cfg.doc.contains("j")) spins.push_back(static_cast<int>(cfg.num("j", 1)) - 1);
    else
        for (int j = 0; j < w.nu(); ++j) spins.push_back(j);
    std::ostringstream os;
    os << "j,value,coarse,error,G\n";
    for (int j : spins) {
        const QuadratureValue q = c_psi_j(w, psi, j, static_cast<int>(cfg.num("G", 0)));
        os << label(j) << "," << fmt(q.value) << "," << fmt(q.coarse) << "," << fmt(q.error) << "," << q.G << "\n";
    }
    return os.str();
}

std::string cmd_rage(const ExperimentConfig& cfg) {
    const WalkSpec w = cfg.walk();
    const auto psi = cfg.state();
    const long long n_max = static_cast<long long>(cfg.num("n_max", 200));
    const auto norms = rage_escape(w, psi, cfg.window(w.d()), n_max);
    std::ostringstream os;
    os << "# window=" << cfg.str("window", "-5:5") << "\n";
    os << "n,norm,cesaro_mean_sq\n";
    double acc = 0.0;
    for (size_t n = 0; n < norms.size(); ++n) {
        acc += norms[n] * norms[n];
        os << n << "," << fmt(norms[n]) << "," << fmt(acc / static_cast<double>(n + 1)) << "\n";
    }
    return os.str();
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::string cmd_report(const ExperimentConfig& cfg) {
    const WalkSpec w = cfg.walk();
    json r;
    r["model"] = model_name(cfg);
    r["d"] = w.d();
    r["nu"] = w.nu();
    r["range"] = w.range();
    r["unitary"] = w.unitarity_residual() < kUnitarityTol;
    r["tolerances"] = {{"group_tol", cfg.group_tol()}, {"eig_tol", cfg.eig_tol()}, {"relation_tol", cfg.rel_tol()},
                       {"G", cfg.G(256)},           {"q_max", cfg.q_max()},    {"Q", cfg.Q()}};
    json cls;
    if (w.d() == 1) {
        const Classification c = classify(w, relation_options(cfg), 0, cfg.eig_tol());
        cls["regime"] = to_string(c.regime);
        cls["M"] = c.M;
        cls["flat_bands"] = json::array();
        for (const cplx& z : c.flat_bands) cls["flat_bands"].push_back(complex_json(z));
        cls["relations"] = json::array();
        for (const auto& rel : c.relations) {
            if (!rel.xi_zero()) continue;  // relations with xi != 0 leave NRG intact
            cls["relations"].push_back({{"s", rel.s + 1},
                                        {"w", rel.w + 1},
                                        {"phi", std::to_string(rel.p) + "/" + std::to_string(rel.q)},
                                        {"breaks_nrg", rel.breaks_nrg},
                                        {"charpoly_check", rel.charpoly_check}});
        }
        long long other = 0;
        for (const auto& rel : c.relations) other += rel.xi_zero() ? 0 : 1;
        cls["relations_with_phase"] = other;
        cls["implications"] = c.implications;
    } else {
        const auto fb = detect_flat_bands(w, 0, cfg.eig_tol());
        cls["flat_bands"] = json::array();
        for (const cplx& z : fb) cls["flat_bands"].push_back(complex_json(z));
        json shifts = json::array();
        bool have_charpoly = w.nu() <= kCharpolyMaxNu;
        if (have_charpoly)
            for (const auto& z : zeta_shift_invariances(laurent_charpoly(w), cfg.Q())) {
                json t = json::array();
                for (auto& [a, q] : z.t) t.push_back(std::to_string(a) + "/" + std::to_string(q));
                shifts.push_back(t);
            }
        cls["zeta_shifts"] = have_charpoly ? shifts : json(nullptr);
        // A band that is flat along one direction breaks NRG without a flat band or a
        // zeta shift, so two consecutive (coprime) boxes are probed for full coincidence.
        json probe = json::array();
        bool saturated = w.d() <= 3;
        if (saturated)
            for (int N : w.d() == 2 ? std::vector<int>{9, 10} : std::vector<int>{5, 6}) {
                const NrgReport nr = nrg_statistic(w, N, cfg.eig_tol());
                probe.push_back({{"N", N}, {"sup_ratio", nr.sup_ratio}, {"argmax", nr.argmax}});
                saturated = saturated && nr.sup_ratio == 1.0 && !nr.tolerance_sensitive;
            }
        cls["nrg_probe"] = probe;
        if (!fb.empty()) cls["regime"] = "FlatBand";
        else if (have_charpoly && !shifts.empty()) cls["regime"] = "NoFlatBands+ZetaShiftsPresent";
        else if (saturated) cls["regime"] = "NoFlatBands+NRGFails";
        else cls["regime"] = have_charpoly ? "NRG" : "Undetermined";
    }
    r["classification"] = cls;
    const auto sizes = cfg.box_sizes();
    if (!sizes.empty()) {
        json cells = json::array();
        for (int N : sizes) {
            json cell;
            cell["N"] = N;
            const NrgReport nr = nrg_statistic(w, N, cfg.eig_tol());
            cell["nrg"] = {{"sup_ratio", nr.sup_ratio},
                           {"argmax", nr.argmax},
                           {"tolerance_sensitive", nr.tolerance_sensitive}};
            if (cfg.doc.contains("state")) {
                const BoxState s = make_box_state(N, w.d(), w.nu(), cfg.state());
                const MeasurePair m = limit_measure(w, s, cfg.group_tol());
                check_mass(m, 1.0);
                cell["tvd"] = tv_distance(m.total, uniform_measure(N, w.d()));
                cell["grouping_unstable"] = m.grouping_unstable;
            }
            cells.push_back(cell);
        }
        r["boxes"] = cells;
    }
    return r.dump(2) + "\n";
}

}  // namespace

std::string fmt(double x) {
    if (x == 0.0) x = 0.0;
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"validate", "spectrum",     "flatbands", "nrg", "relations",
                                                    "charpoly", "evolve",       "measure",   "limit-measure",
                                                    "pqe",      "fqe",          "tvd",       "subset-coefs",
                                                    "cpsij",    "rage",         "report"};
    return names;
}

std::string run_command(const ExperimentConfig& cfg) {
    const std::string& c = cfg.command;
    if (c == "validate") return cmd_validate(cfg);
    if (c == "spectrum") return cmd_spectrum(cfg);
    if (c == "flatbands") return cmd_flatbands(cfg);
    if (c == "nrg") return cmd_nrg(cfg);
    if (c == "relations") return cmd_relations(cfg);
    if (c == "charpoly") return cmd_charpoly(cfg);
    if (c == "evolve") return cmd_evolve(cfg);
    if (c == "measure") return cmd_measure(cfg, false);
    if (c == "limit-measure") return cmd_measure(cfg, true);
    if (c == "pqe") return cmd_pqe(cfg);
    if (c == "fqe") return cmd_fqe(cfg);
    if (c == "tvd") return cmd_tvd(cfg);
    if (c == "subset-coefs") return cmd_subset_coefs(cfg);
    if (c == "cpsij") return cmd_cpsij(cfg);
    if (c == "rage") return cmd_rage(cfg);
    if (c == "report") return cmd_report(cfg);
    throw Error(ErrorKind::ConfigError, "unknown command '" + c + "'");
}

int exit_status(ErrorKind k) {
    switch (k) {
    case ErrorKind::BudgetExceeded:
    case ErrorKind::SizeLimit: return kExitBudget;
    case ErrorKind::ConvergenceFailure:
    case ErrorKind::RefineExhausted:
    case ErrorKind::GroupingUnstable:
    case ErrorKind::RelationMissing: return kExitInvariant;
    default: return kExitConfig;
    }
}

int run(const ExperimentConfig& cfg) {
    std::string out;
    try {
        out = run_command(cfg);
    } catch (const Error& e) {
        std::cerr << "walklab " << cfg.command << ": " << e.what() << "\n";
        return exit_status(e.kind());
    } catch (const json::exception& e) {
        std::cerr << "walklab " << cfg.command << ": ConfigError: " << e.what() << "\n";
        return kExitConfig;
    }
    const std::string path = cfg.str("output", "-");
    if (path == "-") {
        std::cout << out;
        std::cout.flush();
    } else {
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            std::cerr << "walklab " << cfg.command << ": ConfigError: cannot write '" << path << "'\n";
            return kExitConfig;
        }
        f << out;
    }
    return kExitOk;
}

}  // namespace walklab::cli
