#pragma once
// Observables, spatial and spectral averages, ergodicity gaps, total variation
// distance, weak-limit constants and subset-equidistribution coefficients.

#include <deque>
#include <map>

#include "dynamics.hpp"
#include "spectra.hpp"

namespace walklab {

enum class ObservableKind { SampledField, SummableRestriction, Bounded };

struct Observable {
    ObservableKind kind = ObservableKind::Bounded;
    // SampledField: Fourier coefficients, f(x) = sum_m c_m exp(2 pi i m.x).
    // SummableRestriction: values on Z^d; only sites inside [0, N-1]^d are kept.
    std::vector<std::pair<LatticeVector, cplx>> table;
    // Bounded: explicit values on L_N^d in lexicographic order.
    int N = 0;
    std::vector<cplx> values;

    static Observable sampled(std::vector<std::pair<LatticeVector, cplx>> fourier) {
        return {ObservableKind::SampledField, std::move(fourier), 0, {}};
    }
    static Observable summable(std::vector<std::pair<LatticeVector, cplx>> t) {
        return {ObservableKind::SummableRestriction, std::move(t), 0, {}};
    }
    static Observable bounded(int N, std::vector<cplx> v) {
        for (const cplx& z : v)
            if (std::abs(z) > 1.0 + 1e-12) throw Error(ErrorKind::InvalidParams, "bounded observable exceeds 1");
        return {ObservableKind::Bounded, {}, N, std::move(v)};
    }

    std::vector<cplx> on_box(int boxN, int d) const {
        const long long sites = ipow(boxN, d);
        std::vector<cplx> v(sites);
        switch (kind) {
        case ObservableKind::SampledField: {
            std::vector<cplx> tw(boxN);
            for (int k = 0; k < boxN; ++k) tw[k] = std::polar(1.0, kTwoPi * k / boxN);
            for (long long x = 0; x < sites; ++x) {
                LatticeVector k = unflatten(x, boxN, d);
                cplx acc{};
                for (auto& [m, c] : table) {
                    long long ph = 0;
                    for (int a = 0; a < d; ++a) ph += static_cast<long long>(m[a]) * k[a];
                    ph %= boxN;
                    if (ph < 0) ph += boxN;
                    acc += c * tw[ph];
                }
                v[x] = acc;
            }
            break;
        }
        case ObservableKind::SummableRestriction:
            for (auto& [p, c] : table) {
                bool inside = static_cast<int>(p.size()) == d;
                for (int a = 0; a < d && inside; ++a) inside = p[a] >= 0 && p[a] < boxN;
                if (inside) v[flatten(p, boxN)] += c;
            }
            break;
        case ObservableKind::Bounded:
            if (N != boxN || static_cast<long long>(values.size()) != sites)
                throw Error(ErrorKind::BoxMismatch, "bounded observable was built for a different box");
            v = values;
            break;
        }
        return v;
    }
};

// Indicator of sites whose coordinate sum has the given parity (0 even, 1 odd).
inline Observable parity_indicator(int N, int d, int parity) {
    std::vector<cplx> v(ipow(N, d));
    for (long long x = 0; x < static_cast<long long>(v.size()); ++x) {
        LatticeVector k = unflatten(x, N, d);
        int s = 0;
        for (int c : k) s += c;
        v[x] = (s % 2 == parity) ? 1.0 : 0.0;
    }
    return Observable::bounded(N, std::move(v));
}

inline Observable constant_observable(int N, int d, cplx c) {
    return Observable::bounded(N, std::vector<cplx>(ipow(N, d), c));
}

inline cplx uniform_average(const Observable& phi, int N, int d) {
    cplx acc{};
    for (const cplx& z : phi.on_box(N, d)) acc += z;
    return acc / static_cast<double>(ipow(N, d));
}

inline SpinObservable spin_tables(const std::vector<Observable>& a, int N, int d) {
    SpinObservable t;
    for (const auto& o : a) t.push_back(o.on_box(N, d));
    return t;
}

// <a>_psi = sum_j <a_j> sum_r sum_s |[P_{E_s}(r/N) psi^(r)]_j|^2.
inline cplx target_average(const WalkSpec& w, const BoxState& s, const std::vector<Observable>& a,
                           double group_tol = kGroupTol) {
    check_compatible(w, s);
    if (static_cast<int>(a.size()) != s.nu) throw Error(ErrorKind::DimensionMismatch, "observable needs one entry per spin");
    MomentumState m = dft_forward(s);
    const int nu = s.nu;
    std::vector<std::vector<double>> weight(s.sites(), std::vector<double>(nu, 0.0));
    parallel_for(s.sites(), [&](long long idx) {
        FloquetEigen fe = eigensystem(floquet_matrix(w, node_theta(idx, s.N, s.d)), group_tol);
        std::vector<cplx> v(m.amp.begin() + idx * nu, m.amp.begin() + (idx + 1) * nu);
        for (const CMat& p : fe.projections) {
            std::vector<cplx> pv = p.apply(v);
            for (int j = 0; j < nu; ++j) weight[idx][j] += std::norm(pv[j]);
        }
    });
    cplx acc{};
    for (int j = 0; j < nu; ++j) {
        double wj = 0.0;
        for (auto& row : weight) wj += row[j];
        acc += uniform_average(a[j], s.N, s.d) * wj;
    }
    return acc;
}

inline PositionMeasure uniform_measure(int N, int d) {
    const long long sites = ipow(N, d);
    return PositionMeasure{N, d, std::vector<double>(sites, 1.0 / static_cast<double>(sites))};
}

inline double tv_distance(const PositionMeasure& a, const PositionMeasure& b) {
    if (a.N != b.N || a.d != b.d || a.weights.size() != b.weights.size())
        throw Error(ErrorKind::BoxMismatch, "measures live on different boxes");
    double s = 0.0;
    for (size_t x = 0; x < a.weights.size(); ++x) s += std::abs(a.weights[x] - b.weights[x]);
    return 0.5 * s;
}

inline cplx integrate(const PositionMeasure& mu, const std::vector<cplx>& phi) {
    cplx acc{};
    for (size_t x = 0; x < phi.size(); ++x) acc += phi[x] * mu.weights[x];
    return acc;
}

// |sum_r phi(r) mu_psi(r) - <phi>| with the exact limit measure.
inline double pqe_gap(const WalkSpec& w, const BoxState& s, const Observable& phi, double group_tol = kGroupTol) {
    MeasurePair m = limit_measure(w, s, group_tol);
    return std::abs(integrate(m.total, phi.on_box(s.N, s.d)) - uniform_average(phi, s.N, s.d));
}

inline double fqe_gap(const WalkSpec& w, const BoxState& s, const std::vector<Observable>& a,
                      double group_tol = kGroupTol) {
    const cplx lim = fqe_limit(w, s, spin_tables(a, s.N, s.d), group_tol);
    return std::abs(lim - target_average(w, s, a, group_tol));
}

// ---------------------------------------------------------------------------
// Quasimomentum integrals of compactly supported states

// psi~(theta) = sum_k psi(k) exp(-2 pi i k.theta).
inline std::vector<cplx> symbol_at(const std::vector<StateEntry>& psi, int nu, const std::vector<double>& theta) {
    std::vector<cplx> v(nu);
    for (const auto& e : psi) {
        double ph = 0.0;
        for (size_t a = 0; a < theta.size(); ++a) ph += e.pos[a] * theta[a];
        v[e.spin] += e.amp * std::polar(1.0, -kTwoPi * ph);
    }
    return v;
}

struct QuadratureValue {
    double value = 0.0;     // at the refined grid 2G
    double coarse = 0.0;    // at G
    double error = 0.0;     // |refined - coarse|
    int G = 0;
};

namespace detail {

inline double cpsi_grid(const WalkSpec& w, const std::vector<StateEntry>& psi, int j, int G, double offset) {
    const int d = w.d(), nu = w.nu();
    const long long nodes = ipow(G, d);
    std::vector<double> part(nodes, 0.0);
    parallel_for(nodes, [&](long long idx) {
        LatticeVector k = unflatten(idx, G, d);
        std::vector<double> th(d);
        for (int a = 0; a < d; ++a) th[a] = (k[a] + offset) / G;
        FloquetEigen fe = eigensystem(floquet_matrix(w, th));
        std::vector<cplx> v = symbol_at(psi, nu, th);
        double acc = 0.0;
        for (const CMat& p : fe.projections) acc += std::norm(p.apply(v)[j]);
        part[idx] = acc;
    });
    double s = 0.0;
    for (double x : part) s += x;
    return s / static_cast<double>(nodes);
}

}  // namespace detail

// c_{psi,j} = int sum_s |[P_{E_s}(theta) psi~(theta)]_j|^2 dtheta, periodic
// trapezoid rule. The grid is offset by an irrational fraction of a step so
// that nodes avoid band crossings, where grouping changes the integrand.
inline QuadratureValue c_psi_j(const WalkSpec& w, const std::vector<StateEntry>& psi, int j, int G = 0) {
    if (j < 0 || j >= w.nu()) throw Error(ErrorKind::DimensionMismatch, "spin index out of range");
    if (G <= 0) G = w.d() == 1 ? 512 : (w.d() == 2 ? 48 : 12);
    if (static_cast<double>(ipow(2 * G, w.d())) > 4e6) throw Error(ErrorKind::BudgetExceeded, "quadrature grid too large");
    constexpr double kOffset = 0.3819660112501051;
    QuadratureValue q;
    q.G = G;
    q.coarse = detail::cpsi_grid(w, psi, j, G, kOffset);
    q.value = detail::cpsi_grid(w, psi, j, 2 * G, kOffset);
    q.error = std::abs(q.value - q.coarse);
    return q;
}

// ---------------------------------------------------------------------------
// Subset equidistribution along N = nM + k  (d = 1)

inline void check_modulus(long long N, long long M, long long k) {
    if (M < 1 || k < 1 || k > M) throw Error(ErrorKind::ModulusMismatch, "need 1 <= k <= M");
    if (N % M != k % M)
        throw Error(ErrorKind::ModulusMismatch,
                    "N=" + std::to_string(N) + " is not congruent to k=" + std::to_string(k) + " mod M=" + std::to_string(M));
}

// Averages over B_u = {u, u+M, ...} inside [0, N-1], u = 0..M-1.
inline std::vector<cplx> subset_averages(const Observable& phi, int N, long long M, long long k) {
    check_modulus(N, M, k);
    std::vector<cplx> v = phi.on_box(N, 1);
    std::vector<cplx> out(M);
    for (long long u = 0; u < M; ++u) {
        cplx acc{};
        long long cnt = 0;
        for (long long x = u; x < N; x += M) {
            acc += v[x];
            ++cnt;
        }
        out[u] = cnt ? acc / static_cast<double>(cnt) : cplx{};
    }
    return out;
}

struct SubsetCoefficients {
    std::vector<cplx> c;          // u = 0..M-1
    std::vector<cplx> c_coarse;   // same at quadrature G (values use 2G)
    double quadrature_error = 0.0;
    int G = 0;
    double offset = 0.0;          // grid offset in units of the step
};

namespace detail {

struct NodeSpectrum {
    std::vector<cplx> values;
    std::vector<std::vector<cplx>> projected;  // P_g psi~(theta)
};

inline std::vector<NodeSpectrum> node_spectra(const WalkSpec& w, const std::vector<StateEntry>& psi, int G,
                                              double offset) {
    std::vector<NodeSpectrum> out(G);
    parallel_for(G, [&](long long i) {
        const double th = (static_cast<double>(i) + offset) / G;
        FloquetEigen fe = eigensystem(floquet_matrix(w, th));
        std::vector<cplx> v = symbol_at(psi, w.nu(), {th});
        out[i].values = fe.values;
        for (const CMat& p : fe.projections) out[i].projected.push_back(p.apply(v));
    });
    return out;
}

inline cplx inner(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    cplx s{};
    for (size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// Pairs (group at theta+phi, group at theta) with equal eigenvalues, and the
// integral of <P_a psi~(theta+phi), P_b psi~(theta)> over the grid.
inline std::pair<cplx, std::vector<int>> paired_integral(const std::vector<NodeSpectrum>& ns, int shift, double tol) {
    const int G = static_cast<int>(ns.size());
    cplx acc{};
    std::vector<int> count(G, 0);
    for (int i = 0; i < G; ++i) {
        const auto& a = ns[(i + shift) % G];
        const auto& b = ns[i];
        for (size_t x = 0; x < a.values.size(); ++x)
            for (size_t y = 0; y < b.values.size(); ++y)
                if (std::abs(a.values[x] - b.values[y]) < tol) {
                    acc += inner(a.projected[x], b.projected[y]);
                    ++count[i];
                }
    }
    return {acc / static_cast<double>(G), count};
}

inline bool degenerate_nodes(const std::vector<NodeSpectrum>& ns) {
    size_t generic = 0;
    for (const auto& n : ns) generic = std::max(generic, n.values.size());
    for (const auto& n : ns)
        if (n.values.size() != generic) return true;
    return false;
}

inline std::vector<cplx> coefficients_at(const WalkSpec& w, const std::vector<StateEntry>& psi, long long k, long long M,
                                         const std::vector<PhaseRelation>& relations, int G, double offset, double tol,
                                         bool& unstable) {
    const long long g = gcd_ll(M, k);
    std::vector<cplx> c(M, 1.0 / static_cast<double>(M));
    if (g == 1) return c;
    auto ns = node_spectra(w, psi, G, offset);
    unstable = degenerate_nodes(ns);
    for (long long rho = 1; rho < g; ++rho) {
        const long long gg = gcd_ll(rho, g);
        const long long p = rho / gg, q = g / gg;
        auto [integral, count] = paired_integral(ns, static_cast<int>(rho * G / g), tol);
        long long hit = 0, varying = 0;
        for (int x : count) {
            hit += x > 0;
            varying += x != count[0];
        }
        const bool have = std::any_of(relations.begin(), relations.end(),
                                      [&](const PhaseRelation& r) { return r.breaks_nrg && r.p == p && r.q == q; });
        if (2 * hit > G && !have)
            throw Error(ErrorKind::RelationMissing, "eigenvalue pairing at phi=" + std::to_string(p) + "/" +
                                                        std::to_string(q) + " has no matching relation");
        if (!have) continue;
        if (varying) unstable = true;
        for (long long u = 0; u < M; ++u)
            c[u] += std::polar(1.0, -kTwoPi * static_cast<double>(u) * static_cast<double>(rho) / static_cast<double>(g)) *
                    integral / static_cast<double>(M);
    }
    return c;
}

}  // namespace detail

// c_u = 1/M + (1/M) sum_{rho=1}^{g-1} e^{-2 pi i u rho/g}
//        * int sum_{E_s(theta+phi)=E_w(theta)} <P_s psi~(theta+phi), P_w psi~(theta)> dtheta,
// g = gcd(M, k), phi = rho/g, psi~(theta) = sum_k psi(k) e^{-2 pi i k theta}.
inline SubsetCoefficients subset_coefficients(const WalkSpec& w, const std::vector<StateEntry>& psi, long long k,
                                              long long M, const std::vector<PhaseRelation>& relations, int G = 512,
                                              double tol = kRelationTol) {
    if (w.d() != 1) throw Error(ErrorKind::InvalidParams, "subset coefficients are defined for d=1");
    if (M < 1 || k < 1 || k > M) throw Error(ErrorKind::ModulusMismatch, "need 1 <= k <= M");
    const long long g = gcd_ll(M, k);
    const int Gg = static_cast<int>(g * ((G + g - 1) / g));
    SubsetCoefficients out;
    out.G = Gg;
    // Offsets tried in order until no node sits on a band crossing.
    const double offsets[] = {0.3819660112501051, 0.5, 0.1234567, 0.0};
    for (double off : offsets) {
        bool u1 = false, u2 = false;
        auto c1 = detail::coefficients_at(w, psi, k, M, relations, Gg, off, tol, u1);
        auto c2 = detail::coefficients_at(w, psi, k, M, relations, 2 * Gg, 2 * off, tol, u2);
        out.c = c2;
        out.c_coarse = c1;
        out.offset = off;
        out.quadrature_error = 0.0;
        for (long long u = 0; u < M; ++u) out.quadrature_error = std::max(out.quadrature_error, std::abs(c2[u] - c1[u]));
        if (!u1 && !u2) break;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Sites reachable from the support of psi through nonzero amplitudes

inline std::vector<char> reachable_sites(const WalkSpec& w, int N, const std::vector<StateEntry>& psi) {
    const int d = w.d(), nu = w.nu();
    const long long sites = ipow(N, d);
    std::vector<char> seen(static_cast<size_t>(sites) * nu, 0);
    std::deque<long long> queue;
    for (const auto& e : psi)
        if (e.amp != cplx{}) {
            const long long st = flatten(e.pos, N) * nu + e.spin;
            if (!seen[st]) {
                seen[st] = 1;
                queue.push_back(st);
            }
        }
    while (!queue.empty()) {
        const long long st = queue.front();
        queue.pop_front();
        const long long x = st / nu;
        const int j = static_cast<int>(st % nu);
        const LatticeVector k = unflatten(x, N, d);
        for (size_t t = 0; t < w.jumps().size(); ++t)
            for (int i = 0; i < nu; ++i) {
                if (w.coeffs()[t](i, j) == cplx{}) continue;
                LatticeVector y = k;
                for (int a = 0; a < d; ++a) y[a] += w.jumps()[t][a];
                const long long nst = flatten(y, N) * nu + i;
                if (!seen[nst]) {
                    seen[nst] = 1;
                    queue.push_back(nst);
                }
            }
    }
    std::vector<char> out(sites, 0);
    for (long long x = 0; x < sites; ++x)
        for (int i = 0; i < nu; ++i) out[x] = out[x] || seen[static_cast<size_t>(x) * nu + i];
    return out;
}

// ---------------------------------------------------------------------------

struct ErgodicityReport {
    int N = 0;
    bool exact = true;  // infinite-time limits from spectral grouping
    long long T = 0;    // time horizon when not exact
    double pqe_gap = 0.0;
    double fqe_gap = 0.0;
    double tvd = 0.0;
    NrgReport nrg;
    std::vector<PhaseRelation> relations;
    long long M = 1;
    std::vector<cplx> subset_coefs;
    double group_tol = kGroupTol, eig_tol = kEigTol, relation_tol = kRelationTol;
};

}  // namespace walklab
