#pragma once
// Box dynamics on L_N^d with periodic boundary: Fourier transforms, exact
// momentum-space evolution, position-space stepping, time-averaged and exact
// infinite-time position measures, and windowed escape norms.

#include <fftw3.h>

#include <mutex>

#include "eigen.hpp"
#include "parallel.hpp"
#include "walk.hpp"

namespace walklab {

// Spinor field on L_N^d; amplitude of spin i at site idx is amp[idx*nu + i],
// sites in lexicographic order.
struct BoxState {
    int N = 0, d = 0, nu = 0;
    std::vector<cplx> amp;

    BoxState() = default;
    BoxState(int N_, int d_, int nu_) : N(N_), d(d_), nu(nu_), amp(static_cast<size_t>(ipow(N_, d_)) * nu_) {}

    long long sites() const { return ipow(N, d); }
    cplx& at(long long site, int spin) { return amp[static_cast<size_t>(site) * nu + spin]; }
    const cplx& at(long long site, int spin) const { return amp[static_cast<size_t>(site) * nu + spin]; }
    double norm2() const {
        double s = 0.0;
        for (const cplx& z : amp) s += std::norm(z);
        return s;
    }
};

// Same layout, indexed by quasimomentum node r.
struct MomentumState : BoxState {
    using BoxState::BoxState;
};

struct PositionMeasure {
    int N = 0, d = 0;
    std::vector<double> weights;

    double mass() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

struct StateEntry {
    LatticeVector pos;  // on Z^d, reduced mod N when placed in a box
    int spin = 0;       // 0-based
    cplx amp;
};

inline double entries_norm(const std::vector<StateEntry>& e) {
    double s = 0.0;
    for (const auto& x : e) s += std::norm(x.amp);
    return std::sqrt(s);
}

inline std::vector<StateEntry> normalized(std::vector<StateEntry> e) {
    const double n = entries_norm(e);
    if (n == 0.0) throw Error(ErrorKind::InvalidParams, "initial state is zero");
    for (auto& x : e) x.amp /= n;
    return e;
}

inline int support_radius(const std::vector<StateEntry>& e) {
    int r = 0;
    for (const auto& x : e)
        for (int c : x.pos) r = std::max(r, std::abs(c));
    return r;
}

inline BoxState make_box_state(int N, int d, int nu, const std::vector<StateEntry>& entries) {
    BoxState s(N, d, nu);
    for (const auto& e : entries) {
        if (static_cast<int>(e.pos.size()) != d)
            throw Error(ErrorKind::DimensionMismatch, "state position " + format_vector(e.pos) + " needs " +
                                                          std::to_string(d) + " components");
        if (e.spin < 0 || e.spin >= nu) throw Error(ErrorKind::DimensionMismatch, "state spin out of range");
        s.at(flatten(e.pos, N), e.spin) += e.amp;
    }
    return s;
}

// ---------------------------------------------------------------------------
// Fourier transform  psi^(r) = N^{-d/2} sum_k exp(-2 pi i k.r/N) psi(k)

namespace detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

inline void fftw_transform(int N, int d, int nu, const std::vector<cplx>& in, std::vector<cplx>& out, int sign) {
    out.assign(in.size(), cplx{});
    std::vector<int> dims(d, N);
    std::vector<cplx> src = in;
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        plan = fftw_plan_many_dft(d, dims.data(), nu, reinterpret_cast<fftw_complex*>(src.data()), nullptr, nu, 1,
                                  reinterpret_cast<fftw_complex*>(out.data()), nullptr, nu, 1, sign, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(fftw_planner_mutex());
        fftw_destroy_plan(plan);
    }
    const double scale = 1.0 / std::sqrt(static_cast<double>(ipow(N, d)));
    for (cplx& z : out) z *= scale;
}

}  // namespace detail

inline MomentumState dft_forward(const BoxState& s) {
    MomentumState m(s.N, s.d, s.nu);
    detail::fftw_transform(s.N, s.d, s.nu, s.amp, m.amp, FFTW_FORWARD);
    return m;
}

inline BoxState dft_inverse(const MomentumState& m) {
    BoxState s(m.N, m.d, m.nu);
    detail::fftw_transform(m.N, m.d, m.nu, m.amp, s.amp, FFTW_BACKWARD);
    return s;
}

// Separable direct summation, kept as an independent check of the fast path.
inline std::vector<cplx> dft_direct(int N, int d, int nu, const std::vector<cplx>& in, int sign) {
    std::vector<cplx> tw(N);
    for (int k = 0; k < N; ++k) tw[k] = std::polar(1.0, sign * kTwoPi * k / N);
    std::vector<cplx> cur = in, nxt(in.size());
    const long long sites = ipow(N, d);
    for (int axis = 0; axis < d; ++axis) {
        const long long stride = ipow(N, d - 1 - axis);
        for (long long idx = 0; idx < sites; ++idx) {
            const int r = static_cast<int>((idx / stride) % N);
            const long long base = idx - static_cast<long long>(r) * stride;
            for (int i = 0; i < nu; ++i) {
                cplx acc{};
                for (int k = 0; k < N; ++k)
                    acc += tw[(static_cast<long long>(k) * r) % N] * cur[static_cast<size_t>(base + k * stride) * nu + i];
                nxt[static_cast<size_t>(idx) * nu + i] = acc / std::sqrt(static_cast<double>(N));
            }
        }
        std::swap(cur, nxt);
    }
    return cur;
}

inline std::vector<double> node_theta(long long idx, int N, int d) {
    LatticeVector r = unflatten(idx, N, d);
    std::vector<double> th(d);
    for (int a = 0; a < d; ++a) th[a] = static_cast<double>(r[a]) / N;
    return th;
}

// ---------------------------------------------------------------------------
// Evolution

inline void check_compatible(const WalkSpec& w, const BoxState& s) {
    if (w.d() != s.d || w.nu() != s.nu)
        throw Error(ErrorKind::DimensionMismatch, "walk and state disagree on d or nu");
}

// U_N^k psi through (U^k psi)^(r) = U^(r/N)^k psi^(r).
inline BoxState evolve(const WalkSpec& w, const BoxState& s, long long k) {
    check_compatible(w, s);
    MomentumState m = dft_forward(s);
    const int nu = s.nu;
    parallel_for(m.sites(), [&](long long idx) {
        FloquetEigen fe = eigensystem(floquet_matrix(w, node_theta(idx, s.N, s.d)));
        CMat pk = matrix_power(fe, k);
        std::vector<cplx> v(m.amp.begin() + idx * nu, m.amp.begin() + (idx + 1) * nu);
        v = pk.apply(v);
        std::copy(v.begin(), v.end(), m.amp.begin() + idx * nu);
    });
    return dft_inverse(m);
}

namespace detail {

struct StepTable {
    std::vector<long long> shift_site;  // per (jump, site): destination site
    int njumps = 0;
};

inline StepTable step_table(const WalkSpec& w, int N) {
    StepTable t;
    const int d = w.d();
    const long long sites = ipow(N, d);
    t.njumps = static_cast<int>(w.jumps().size());
    t.shift_site.resize(static_cast<size_t>(t.njumps) * sites);
    for (int j = 0; j < t.njumps; ++j)
        for (long long idx = 0; idx < sites; ++idx) {
            LatticeVector k = unflatten(idx, N, d);
            for (int a = 0; a < d; ++a) k[a] += w.jumps()[j][a];
            t.shift_site[static_cast<size_t>(j) * sites + idx] = flatten(k, N);
        }
    return t;
}

// One application of U: (U psi)_i(x + p) += U_ij(p) psi_j(x).
inline void apply_once(const WalkSpec& w, const StepTable& t, const BoxState& in, BoxState& out) {
    std::fill(out.amp.begin(), out.amp.end(), cplx{});
    const long long sites = in.sites();
    const int nu = in.nu;
    for (int j = 0; j < t.njumps; ++j) {
        const CMat& c = w.coeffs()[j];
        const long long* dest = &t.shift_site[static_cast<size_t>(j) * sites];
        for (long long idx = 0; idx < sites; ++idx) {
            const cplx* src = &in.amp[static_cast<size_t>(idx) * nu];
            cplx* dst = &out.amp[static_cast<size_t>(dest[idx]) * nu];
            for (int a = 0; a < nu; ++a)
                for (int b = 0; b < nu; ++b) dst[a] += c(a, b) * src[b];
        }
    }
}

}  // namespace detail

inline BoxState evolve_direct(const WalkSpec& w, const BoxState& s, long long k) {
    check_compatible(w, s);
    auto table = detail::step_table(w, s.N);
    BoxState cur = s, nxt(s.N, s.d, s.nu);
    for (long long step = 0; step < k; ++step) {
        detail::apply_once(w, table, cur, nxt);
        std::swap(cur, nxt);
    }
    return cur;
}

struct MeasurePair {
    PositionMeasure total;
    std::vector<PositionMeasure> per_spin;
    bool grouping_unstable = false;  // limit measure only
    long long clusters = 0;          // distinct U_N eigenvalues met by the state
};

inline MeasurePair empty_measures(int N, int d, int nu) {
    MeasurePair m;
    const size_t sites = static_cast<size_t>(ipow(N, d));
    m.total = PositionMeasure{N, d, std::vector<double>(sites, 0.0)};
    m.per_spin.assign(nu, m.total);
    return m;
}

inline void finish_total(MeasurePair& m) {
    for (size_t x = 0; x < m.total.weights.size(); ++x) {
        double acc = 0.0;
        for (auto& ps : m.per_spin) {
            if (ps.weights[x] < 0.0 && ps.weights[x] > -1e-12) ps.weights[x] = 0.0;
            acc += ps.weights[x];
        }
        m.total.weights[x] = acc;
    }
}

// mu_T(x) = (1/T) sum_{k<T} |(U^k psi)(x)|^2, by position-space stepping.
inline MeasurePair time_avg_measure(const WalkSpec& w, const BoxState& s, long long T) {
    check_compatible(w, s);
    if (T < 1) throw Error(ErrorKind::InvalidParams, "T must be positive");
    MeasurePair m = empty_measures(s.N, s.d, s.nu);
    auto table = detail::step_table(w, s.N);
    BoxState cur = s, nxt(s.N, s.d, s.nu);
    const long long sites = s.sites();
    for (long long k = 0; k < T; ++k) {
        for (long long x = 0; x < sites; ++x)
            for (int i = 0; i < s.nu; ++i) m.per_spin[i].weights[x] += std::norm(cur.at(x, i));
        if (k + 1 < T) {
            detail::apply_once(w, table, cur, nxt);
            std::swap(cur, nxt);
        }
    }
    for (auto& ps : m.per_spin)
        for (double& v : ps.weights) v /= static_cast<double>(T);
    finish_total(m);
    return m;
}

// ---------------------------------------------------------------------------
// Exact infinite-time limit  mu(x) = sum_lambda |(P_lambda psi)(x)|^2

namespace detail {

struct SpectralPiece {
    double angle;
    long long node;
    std::vector<cplx> vec;  // P_{E_s}(r/N) psi^(r)
};

// Partition of angle-sorted pieces into runs with consecutive gaps below tol,
// closing the circle at the seam. Returns run ids in sorted order.
inline std::vector<long long> angle_runs(const std::vector<SpectralPiece>& p, double tol, long long& nruns) {
    const size_t n = p.size();
    std::vector<long long> id(n, 0);
    if (n == 0) {
        nruns = 0;
        return id;
    }
    const double arc = 2.0 * std::asin(std::min(1.0, tol / 2.0));
    long long cur = 0;
    for (size_t i = 1; i < n; ++i) {
        if (p[i].angle - p[i - 1].angle >= arc) ++cur;
        id[i] = cur;
    }
    nruns = cur + 1;
    if (nruns > 1 && p.front().angle + kTwoPi - p.back().angle < arc) {
        for (size_t i = 0; i < n; ++i)
            if (id[i] == cur) id[i] = 0;
        --nruns;
    }
    return id;
}

}  // namespace detail

inline MeasurePair limit_measure(const WalkSpec& w, const BoxState& s, double group_tol = kGroupTol) {
    check_compatible(w, s);
    const int N = s.N, d = s.d, nu = s.nu;
    const long long sites = s.sites();
    MomentumState m = dft_forward(s);

    std::vector<std::vector<detail::SpectralPiece>> per_node(sites);
    parallel_for(sites, [&](long long idx) {
        FloquetEigen fe = eigensystem(floquet_matrix(w, node_theta(idx, N, d)), group_tol);
        std::vector<cplx> v(m.amp.begin() + idx * nu, m.amp.begin() + (idx + 1) * nu);
        for (size_t g = 0; g < fe.values.size(); ++g) {
            std::vector<cplx> pv = fe.projections[g].apply(v);
            double nrm = 0.0;
            for (const cplx& z : pv) nrm += std::norm(z);
            if (nrm < 1e-300) continue;
            per_node[idx].push_back({std::arg(fe.values[g]), idx, std::move(pv)});
        }
    });
    std::vector<detail::SpectralPiece> pieces;
    for (auto& v : per_node)
        for (auto& p : v) pieces.push_back(std::move(p));
    std::stable_sort(pieces.begin(), pieces.end(), [](const auto& a, const auto& b) {
        if (a.angle != b.angle) return a.angle < b.angle;
        return a.node < b.node;
    });

    long long nruns = 0, nruns_fine = 0;
    std::vector<long long> id = detail::angle_runs(pieces, group_tol, nruns);
    std::vector<long long> id_fine = detail::angle_runs(pieces, group_tol / 10, nruns_fine);

    MeasurePair out = empty_measures(N, d, nu);
    out.clusters = nruns;
    // The partition is stable when refining the tolerance splits no run.
    for (size_t i = 1; i < pieces.size() && !out.grouping_unstable; ++i)
        if ((id[i] == id[i - 1]) != (id_fine[i] == id_fine[i - 1])) out.grouping_unstable = true;
    if (nruns != nruns_fine) out.grouping_unstable = true;

    // Gather runs: node -> summed projected vector.
    std::vector<size_t> order(pieces.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        return std::tie(id[a], pieces[a].node) < std::tie(id[b], pieces[b].node);
    });
    std::vector<std::vector<std::pair<long long, std::vector<cplx>>>> runs(nruns);
    for (size_t i : order) {
        auto& run = runs[id[i]];
        if (!run.empty() && run.back().first == pieces[i].node)
            for (int a = 0; a < nu; ++a) run.back().second[a] += pieces[i].vec[a];
        else run.emplace_back(pieces[i].node, pieces[i].vec);
    }

    std::vector<cplx> tw(N);
    for (int k = 0; k < N; ++k) tw[k] = std::polar(1.0, kTwoPi * k / N);
    const double inv_sites = 1.0 / static_cast<double>(sites);
    const double log_sites = std::log2(static_cast<double>(sites)) + 1.0;

    // Single-node runs are plane waves: uniform |.|^2 / N^d.
    std::vector<double> uniform(nu, 0.0);
    std::vector<size_t> multi;
    for (size_t c = 0; c < runs.size(); ++c) {
        if (runs[c].size() == 1) {
            for (int a = 0; a < nu; ++a) uniform[a] += std::norm(runs[c][0].second[a]) * inv_sites;
        } else {
            multi.push_back(c);
        }
    }
    // Multi-node runs: per-chunk partial sums merged in chunk order.
    const int chunks = 64;
    std::vector<std::vector<double>> partial(chunks);
    parallel_chunks(static_cast<long long>(multi.size()), chunks, [&](int chunk, long long b, long long e) {
        std::vector<double> acc(static_cast<size_t>(sites) * nu, 0.0);
        BoxState field(N, d, nu);
        for (long long c = b; c < e; ++c) {
            const auto& run = runs[multi[c]];
            if (static_cast<double>(run.size()) <= 4.0 * log_sites) {
                std::vector<LatticeVector> rs;
                for (auto& [node, vec] : run) rs.push_back(unflatten(node, N, d));
                for (long long x = 0; x < sites; ++x) {
                    LatticeVector k = unflatten(x, N, d);
                    for (int a = 0; a < nu; ++a) field.at(x, a) = 0.0;
                    for (size_t t = 0; t < run.size(); ++t) {
                        long long ph = 0;
                        for (int q = 0; q < d; ++q) ph += static_cast<long long>(k[q]) * rs[t][q];
                        const cplx e = tw[ph % N];
                        for (int a = 0; a < nu; ++a) field.at(x, a) += e * run[t].second[a];
                    }
                }
                const double sc = inv_sites;
                for (long long x = 0; x < sites; ++x)
                    for (int a = 0; a < nu; ++a) acc[static_cast<size_t>(x) * nu + a] += std::norm(field.at(x, a)) * sc;
            } else {
                MomentumState mm(N, d, nu);
                for (auto& [node, vec] : run)
                    for (int a = 0; a < nu; ++a) mm.at(node, a) = vec[a];
                BoxState f = dft_inverse(mm);
                for (long long x = 0; x < sites; ++x)
                    for (int a = 0; a < nu; ++a) acc[static_cast<size_t>(x) * nu + a] += std::norm(f.at(x, a));
            }
        }
        partial[chunk] = std::move(acc);
    });
    for (long long x = 0; x < sites; ++x)
        for (int a = 0; a < nu; ++a) {
            double v = uniform[a];
            for (const auto& p : partial)
                if (!p.empty()) v += p[static_cast<size_t>(x) * nu + a];
            out.per_spin[a].weights[x] = v;
        }
    finish_total(out);
    return out;
}

// |(P_lambda psi)(x)|^2 for one eigenvalue lambda of U_N (e.g. a flat band).
inline PositionMeasure eigenvalue_component(const WalkSpec& w, const BoxState& s, cplx lambda,
                                            double tol = kGroupTol) {
    check_compatible(w, s);
    MomentumState m = dft_forward(s);
    MomentumState proj(s.N, s.d, s.nu);
    const int nu = s.nu;
    parallel_for(s.sites(), [&](long long idx) {
        FloquetEigen fe = eigensystem(floquet_matrix(w, node_theta(idx, s.N, s.d)), tol);
        std::vector<cplx> v(m.amp.begin() + idx * nu, m.amp.begin() + (idx + 1) * nu);
        for (size_t g = 0; g < fe.values.size(); ++g) {
            if (std::abs(fe.values[g] - lambda) >= tol) continue;
            std::vector<cplx> pv = fe.projections[g].apply(v);
            for (int a = 0; a < nu; ++a) proj.at(idx, a) += pv[a];
        }
    });
    BoxState f = dft_inverse(proj);
    PositionMeasure out{s.N, s.d, std::vector<double>(s.sites(), 0.0)};
    for (long long x = 0; x < s.sites(); ++x)
        for (int a = 0; a < nu; ++a) out.weights[x] += std::norm(f.at(x, a));
    return out;
}

// Per-spin table a_j(x) on the box.
using SpinObservable = std::vector<std::vector<cplx>>;

inline cplx pair_with(const MeasurePair& m, const SpinObservable& a) {
    if (a.size() != m.per_spin.size()) throw Error(ErrorKind::DimensionMismatch, "observable needs one table per spin");
    cplx acc{};
    for (size_t j = 0; j < a.size(); ++j) {
        if (a[j].size() != m.per_spin[j].weights.size())
            throw Error(ErrorKind::BoxMismatch, "observable table does not cover the box");
        for (size_t x = 0; x < a[j].size(); ++x) acc += a[j][x] * m.per_spin[j].weights[x];
    }
    return acc;
}

// lim (1/T) sum_k <U^k psi, a U^k psi> = sum_lambda <P_lambda psi, a P_lambda psi>.
inline cplx fqe_limit(const WalkSpec& w, const BoxState& s, const SpinObservable& a, double group_tol = kGroupTol) {
    return pair_with(limit_measure(w, s, group_tol), a);
}

// (1/T) sum_{k<T} <U^k psi, a U^k psi>, the Cesaro oracle for fqe_limit.
inline cplx cesaro_average(const WalkSpec& w, const BoxState& s, const SpinObservable& a, long long T) {
    return pair_with(time_avg_measure(w, s, T), a);
}

// ---------------------------------------------------------------------------
// Escape norms on an effectively infinite lattice

inline constexpr long long kRageSiteBudget = 1LL << 22;

inline std::vector<double> rage_escape(const WalkSpec& w, const std::vector<StateEntry>& psi,
                                       const std::vector<LatticeVector>& window, long long n_max) {
    const int d = w.d(), nu = w.nu();
    int rad = support_radius(psi);
    for (const auto& x : window)
        for (int c : x) rad = std::max(rad, std::abs(c));
    // Support grows by at most R per step, so this box never wraps.
    const long long N = 2 * (static_cast<long long>(w.range()) * n_max + rad) + 1;
    if (static_cast<double>(N) > 1e9 || static_cast<double>(ipow(N, d)) * nu > static_cast<double>(kRageSiteBudget))
        throw Error(ErrorKind::BudgetExceeded, "escape box of size " + std::to_string(N) + "^" + std::to_string(d) +
                                                   " exceeds the site budget");
    BoxState cur = make_box_state(static_cast<int>(N), d, nu, psi);
    BoxState nxt(cur.N, d, nu);
    auto table = detail::step_table(w, cur.N);
    std::vector<long long> win;
    for (const auto& x : window) win.push_back(flatten(x, cur.N));
    std::sort(win.begin(), win.end());
    win.erase(std::unique(win.begin(), win.end()), win.end());
    std::vector<double> out;
    for (long long n = 0; n <= n_max; ++n) {
        double acc = 0.0;
        for (long long x : win)
            for (int i = 0; i < nu; ++i) acc += std::norm(cur.at(x, i));
        out.push_back(std::sqrt(acc));
        if (n < n_max) {
            detail::apply_once(w, table, cur, nxt);
            std::swap(cur, nxt);
        }
    }
    return out;
}

}  // namespace walklab
