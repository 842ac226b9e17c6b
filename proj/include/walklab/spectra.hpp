#pragma once
// Band structure diagnostics: continuation-labelled branches, flat bands, the
// NRG coincidence statistic, rational phase-shift relations and zeta-shift
// invariances of the characteristic polynomial.

#include <map>
#include <optional>

#include "eigen.hpp"
#include "laurent.hpp"
#include "parallel.hpp"
#include "walk.hpp"

namespace walklab {

inline constexpr double kEigTol = 1e-8;
inline constexpr double kRelationTol = 1e-8;

// ---------------------------------------------------------------------------
// Branch tables

struct BranchTable {
    int G = 0;        // samples per unit of the line parameter
    int periods = 1;  // samples cover t in [0, periods]
    std::vector<double> base, dir;
    std::vector<std::vector<cplx>> branches;  // nu arrays of periods*G+1 samples
    std::vector<int> monodromy;               // label at t=1 -> label at t=0
    bool refine_needed = false;               // ambiguity left at the final grid
    int doublings = 0;

    int nu() const { return static_cast<int>(branches.size()); }
    int samples() const { return periods * G + 1; }
};

struct BranchOptions {
    int periods = 1;
    int max_doublings = 4;
    bool throw_on_exhaust = true;
    std::vector<double> base;  // default: origin
    std::vector<double> dir;   // default: first axis
};

namespace detail {

// Best assignment of candidate values to labels given predictions. Returns the
// permutation (label -> candidate) and whether a distinct second choice is
// within a factor of two of the best (in distance).
inline std::pair<std::vector<int>, bool> match_branches(const std::vector<cplx>& pred,
                                                        const std::vector<cplx>& cand) {
    const int n = static_cast<int>(pred.size());
    std::vector<int> best(n), perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    if (n <= 6) {
        double c1 = std::numeric_limits<double>::infinity();
        std::vector<std::pair<double, std::vector<int>>> all;
        do {
            double c = 0.0;
            for (int s = 0; s < n; ++s) c += std::norm(pred[s] - cand[perm[s]]);
            all.emplace_back(c, perm);
            if (c < c1) {
                c1 = c;
                best = perm;
            }
        } while (std::next_permutation(perm.begin(), perm.end()));
        bool ambiguous = false;
        for (auto& [c, p] : all) {
            bool differs = false;
            for (int s = 0; s < n && !differs; ++s) differs = std::abs(cand[p[s]] - cand[best[s]]) > 1e-9;
            if (differs && c < 4.0 * c1) ambiguous = true;
        }
        return {best, ambiguous};
    }
    // Greedy on ascending distance for larger spin counts.
    std::vector<std::tuple<double, int, int>> pairs;
    for (int s = 0; s < n; ++s)
        for (int x = 0; x < n; ++x) pairs.emplace_back(std::abs(pred[s] - cand[x]), s, x);
    std::sort(pairs.begin(), pairs.end());
    std::vector<char> used_s(n, 0), used_x(n, 0);
    for (auto& [dist, s, x] : pairs)
        if (!used_s[s] && !used_x[x]) {
            best[s] = x;
            used_s[s] = used_x[x] = 1;
        }
    bool ambiguous = false;
    for (int s = 0; s < n; ++s) {
        const double d1 = std::abs(pred[s] - cand[best[s]]);
        for (int x = 0; x < n; ++x)
            if (std::abs(cand[x] - cand[best[s]]) > 1e-9 && std::abs(pred[s] - cand[x]) < 2.0 * d1) ambiguous = true;
    }
    return {best, ambiguous};
}

inline std::vector<cplx> node_values(const WalkSpec& w, const std::vector<double>& theta) {
    return eigensystem(floquet_matrix(w, theta)).all_values;
}

inline BranchTable branch_table_once(const WalkSpec& w, const std::vector<double>& base,
                                     const std::vector<double>& dir, int G, int periods, bool& ambiguous) {
    const int nu = w.nu();
    const int total = periods * G + 1;
    const double h = 1.0 / G;
    auto theta_at = [&](double t) {
        std::vector<double> th(base.size());
        for (size_t a = 0; a < th.size(); ++a) th[a] = base[a] + t * dir[a];
        return th;
    };
    // Node values are independent of labelling, so compute them in parallel.
    std::vector<std::vector<cplx>> raw(total + 2);
    parallel_for(total + 2, [&](long long i) { raw[i] = node_values(w, theta_at((static_cast<double>(i) - 2.0) * h)); });

    // Start two steps before t=0 so the first recorded step already has a slope.
    std::vector<std::vector<cplx>> lab(total + 2, std::vector<cplx>(nu));
    lab[0] = raw[0];
    ambiguous = false;
    for (int i = 1; i < total + 2; ++i) {
        std::vector<cplx> pred(nu);
        for (int s = 0; s < nu; ++s) pred[s] = (i >= 2) ? 2.0 * lab[i - 1][s] - lab[i - 2][s] : lab[i - 1][s];
        auto [perm, amb] = match_branches(pred, raw[i]);
        if (amb && i >= 2) ambiguous = true;
        for (int s = 0; s < nu; ++s) lab[i][s] = raw[i][perm[s]];
    }
    // Canonical labels: sorted by angle at t=0 (ties broken by the next sample).
    std::vector<int> order(nu);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const double da = std::arg(lab[2][a]), db = std::arg(lab[2][b]);
        if (std::abs(da - db) > 1e-9) return da < db;
        return std::arg(lab[3][a]) < std::arg(lab[3][b]);
    });
    BranchTable bt;
    bt.G = G;
    bt.periods = periods;
    bt.base = base;
    bt.dir = dir;
    bt.branches.assign(nu, std::vector<cplx>(total));
    for (int s = 0; s < nu; ++s)
        for (int i = 0; i < total; ++i) bt.branches[s][i] = lab[i + 2][order[s]];
    // Monodromy: values at t=1 matched against values at t=0.
    std::vector<cplx> at0(nu), at1(nu);
    for (int s = 0; s < nu; ++s) {
        at0[s] = bt.branches[s][0];
        at1[s] = bt.branches[s][G];
    }
    bt.monodromy = match_branches(at1, at0).first;
    return bt;
}

}  // namespace detail

// Labels the nu eigenvalue branches along theta(t) = base + t*dir by linear
// prediction from the two previous samples, doubling G while the matching is
// ambiguous.
inline BranchTable branch_table(const WalkSpec& w, int G, BranchOptions opt = {}) {
    if (G < 4) throw Error(ErrorKind::InvalidParams, "branch grid needs G >= 4");
    std::vector<double> base = opt.base.empty() ? std::vector<double>(w.d(), 0.0) : opt.base;
    std::vector<double> dir = opt.dir;
    if (dir.empty()) {
        dir.assign(w.d(), 0.0);
        dir[0] = 1.0;
    }
    if (static_cast<int>(base.size()) != w.d() || static_cast<int>(dir.size()) != w.d())
        throw Error(ErrorKind::DimensionMismatch, "branch line must have d components");
    for (int k = 0;; ++k) {
        bool ambiguous = false;
        BranchTable bt = detail::branch_table_once(w, base, dir, G << k, opt.periods, ambiguous);
        bt.doublings = k;
        if (!ambiguous) return bt;
        if (k >= opt.max_doublings) {
            if (opt.throw_on_exhaust)
                throw Error(ErrorKind::RefineExhausted,
                            "branch matching still ambiguous at G=" + std::to_string(G << k));
            bt.refine_needed = true;
            return bt;
        }
    }
}

// ---------------------------------------------------------------------------
// Flat bands

inline std::vector<cplx> detect_flat_bands_once(const WalkSpec& w, int G, double tol) {
    const int d = w.d();
    const long long nodes = ipow(G, d);
    auto theta_of = [&](long long idx) {
        LatticeVector k = unflatten(idx, G, d);
        std::vector<double> th(d);
        for (int a = 0; a < d; ++a) th[a] = static_cast<double>(k[a]) / G;
        return th;
    };
    FloquetEigen e0 = eigensystem(floquet_matrix(w, theta_of(0)));
    std::vector<cplx> cand = e0.values;
    std::vector<char> alive(cand.size(), 1);
    std::vector<std::vector<char>> hit(nodes);
    parallel_for(nodes, [&](long long idx) {
        std::vector<cplx> vals = detail::node_values(w, theta_of(idx));
        std::vector<char> h(cand.size(), 0);
        for (size_t c = 0; c < cand.size(); ++c)
            for (const cplx& v : vals)
                if (std::abs(v - cand[c]) < tol) h[c] = 1;
        hit[idx] = std::move(h);
    });
    for (long long idx = 0; idx < nodes; ++idx)
        for (size_t c = 0; c < cand.size(); ++c) alive[c] = alive[c] && hit[idx][c];
    std::vector<cplx> out;
    for (size_t c = 0; c < cand.size(); ++c)
        if (alive[c]) out.push_back(cand[c]);
    return out;
}

inline int default_flat_grid(int d) { return d == 1 ? 64 : (d == 2 ? 16 : 8); }

// Eigenvalues present (within tol) at every node of a G^d grid, kept only if
// they survive the 2G grid as well.
inline std::vector<cplx> detect_flat_bands(const WalkSpec& w, int G = 0, double tol = kEigTol) {
    if (G <= 0) G = default_flat_grid(w.d());
    if (static_cast<double>(ipow(2 * G, w.d())) > 4e6)
        throw Error(ErrorKind::BudgetExceeded, "flat-band grid too large");
    std::vector<cplx> a = detect_flat_bands_once(w, G, tol);
    if (a.empty()) return a;
    std::vector<cplx> b = detect_flat_bands_once(w, 2 * G, tol);
    std::vector<cplx> out;
    for (const cplx& x : a)
        for (const cplx& y : b)
            if (std::abs(x - y) < tol) {
                out.push_back(x);
                break;
            }
    std::sort(out.begin(), out.end(), [](cplx x, cplx y) { return std::arg(x) < std::arg(y); });
    return out;
}

// ---------------------------------------------------------------------------
// NRG statistic

struct NrgRow {
    LatticeVector m;
    int s = -1, w = -1;  // maximizing branch pair (d=1); -1 means any pair (d>=2)
    long long count = 0;
    double ratio = 0.0;
};

struct NrgReport {
    int N = 0, d = 0;
    double tol = kEigTol;
    double sup_ratio = 0.0;
    LatticeVector argmax;
    std::vector<NrgRow> rows;  // one per m != 0, lexicographic
    double sup_ratio_fine = 0.0;  // same statistic at tol/10
    bool tolerance_sensitive = false;
    bool labelled = false;  // per-branch-pair counts (d=1) or per-node multisets
};

inline void check_nrg_budget(int d, int N) {
    if (N < 2) throw Error(ErrorKind::InvalidParams, "N must be at least 2");
    const bool ok = (d == 1 && N <= 4096) || (d == 2 && N <= 128) || (d >= 3 && ipow(N, d) <= 16384);
    if (!ok)
        throw Error(ErrorKind::BudgetExceeded, "NRG budget exceeded for d=" + std::to_string(d) + ", N=" +
                                                   std::to_string(N));
}

// Branch values at the box quasimomenta r/N, r = 0..N-1 (d=1).
inline std::vector<std::vector<cplx>> box_branches(const WalkSpec& w, int N) {
    BranchOptions opt;
    opt.throw_on_exhaust = false;
    int G = N;
    while (G < 4) G *= 2;
    BranchTable bt = branch_table(w, G, opt);
    const int stride = bt.G / N;
    std::vector<std::vector<cplx>> v(w.nu(), std::vector<cplx>(N));
    for (int s = 0; s < w.nu(); ++s)
        for (int r = 0; r < N; ++r) v[s][r] = bt.branches[s][static_cast<size_t>(r) * stride];
    return v;
}

namespace detail {

// Sorted angles of the node eigenvalues (with multiplicity).
inline std::vector<std::vector<double>> box_angles(const WalkSpec& w, int N) {
    const int d = w.d();
    const long long n = ipow(N, d);
    std::vector<std::vector<double>> ang(n);
    parallel_for(n, [&](long long idx) {
        LatticeVector k = unflatten(idx, N, d);
        std::vector<double> th(d);
        for (int a = 0; a < d; ++a) th[a] = static_cast<double>(k[a]) / N;
        std::vector<double> a;
        for (const cplx& z : node_values(w, th)) a.push_back(std::arg(z));
        std::sort(a.begin(), a.end());
        ang[idx] = std::move(a);
    });
    return ang;
}

// True when some angle of a lies within tol of some angle of b on the circle.
// Chord length and arc length agree to O(tol^3), far below any tolerance used.
inline bool angles_meet(const std::vector<double>& a, const std::vector<double>& b, double tol) {
    size_t j = 0;
    for (double x : a) {
        while (j < b.size() && b[j] < x - tol) ++j;
        if (j < b.size() && b[j] <= x + tol) return true;
    }
    // Wrap at the +-pi seam.
    if (!a.empty() && !b.empty()) {
        if (a.front() + kTwoPi - b.back() <= tol || b.front() + kTwoPi - a.back() <= tol) return true;
    }
    return false;
}

inline double chord_to_arc(double tol) { return 2.0 * std::asin(std::min(1.0, tol / 2.0)); }

}  // namespace detail

// Number of r with an eigenvalue coincidence between nodes r+m and r (any
// branch pair, multiset form).
inline long long nrg_count_at(const WalkSpec& w, int N, const LatticeVector& m, double tol = kEigTol) {
    check_nrg_budget(w.d(), N);
    auto ang = detail::box_angles(w, N);
    const int d = w.d();
    const double arc = detail::chord_to_arc(tol);
    long long count = 0;
    for (long long idx = 0; idx < static_cast<long long>(ang.size()); ++idx) {
        LatticeVector r = unflatten(idx, N, d);
        for (int a = 0; a < d; ++a) r[a] += m[a];
        if (detail::angles_meet(ang[flatten(r, N)], ang[idx], arc)) ++count;
    }
    return count;
}

inline NrgReport nrg_statistic(const WalkSpec& w, int N, double tol = kEigTol) {
    const int d = w.d(), nu = w.nu();
    check_nrg_budget(d, N);
    NrgReport rep;
    rep.N = N;
    rep.d = d;
    rep.tol = tol;
    const long long n = ipow(N, d);
    const double denom = static_cast<double>(n);
    std::vector<NrgRow> rows(n - 1);
    std::vector<long long> fine(n - 1, 0);
    if (d == 1) {
        rep.labelled = true;
        auto v = box_branches(w, N);
        parallel_for(N - 1, [&](long long mi) {
            const int m = static_cast<int>(mi) + 1;
            NrgRow row;
            row.m = {m};
            long long best_fine = 0;
            for (int s = 0; s < nu; ++s)
                for (int t = 0; t < nu; ++t) {
                    long long c = 0, cf = 0;
                    for (int r = 0; r < N; ++r) {
                        const double dist = std::abs(v[s][(r + m) % N] - v[t][r]);
                        if (dist < tol) ++c;
                        if (dist < tol / 10) ++cf;
                    }
                    if (c > row.count || row.s < 0) {
                        row.count = c;
                        row.s = s;
                        row.w = t;
                    }
                    best_fine = std::max(best_fine, cf);
                }
            row.ratio = static_cast<double>(row.count) / denom;
            rows[mi] = row;
            fine[mi] = best_fine;
        });
    } else {
        auto ang = detail::box_angles(w, N);
        const double arc = detail::chord_to_arc(tol), arc_fine = detail::chord_to_arc(tol / 10);
        parallel_for(n - 1, [&](long long mi) {
            const LatticeVector m = unflatten(mi + 1, N, d);
            long long c = 0, cf = 0;
            for (long long idx = 0; idx < n; ++idx) {
                LatticeVector r = unflatten(idx, N, d);
                for (int a = 0; a < d; ++a) r[a] += m[a];
                const auto& shifted = ang[flatten(r, N)];
                if (detail::angles_meet(shifted, ang[idx], arc)) {
                    ++c;
                    if (detail::angles_meet(shifted, ang[idx], arc_fine)) ++cf;
                }
            }
            NrgRow row;
            row.m = m;
            row.count = c;
            row.ratio = static_cast<double>(c) / denom;
            rows[mi] = row;
            fine[mi] = cf;
        });
    }
    long long best_fine = 0;
    for (size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].ratio > rep.sup_ratio || rep.argmax.empty()) {
            rep.sup_ratio = rows[i].ratio;
            rep.argmax = rows[i].m;
        }
        best_fine = std::max(best_fine, fine[i]);
    }
    rep.sup_ratio_fine = static_cast<double>(best_fine) / denom;
    rep.tolerance_sensitive = rep.sup_ratio_fine != rep.sup_ratio;
    rep.rows = std::move(rows);
    return rep;
}

// ---------------------------------------------------------------------------
// Phase-shift relations  E_s(theta + p/q) = exp(2 pi i xi) E_w(theta)

struct PhaseRelation {
    int s = 0, w = 0;  // 0-based branch labels (sorted by angle at theta=0)
    long long p = 0, q = 1;
    double xi = 0.0;
    double residual = 0.0;
    bool snapped = false;
    long long xi_num = 0, xi_den = 0;  // valid when snapped
    bool breaks_nrg = false;           // xi = 0 and phi > 0
    int charpoly_check = -1;           // -1 not run, 0 spectrum-wide identity fails, 1 holds

    double phi() const { return static_cast<double>(p) / static_cast<double>(q); }
    bool xi_zero() const { return snapped && xi_num == 0; }
};

struct RelationOptions {
    int q_max = 12;
    int G = 256;
    double tol = kRelationTol;
    bool charpoly_check = true;
};

namespace detail {

// Nearest rational with denominator <= max_den, if within eps.
inline std::optional<std::pair<long long, long long>> snap_rational(double x, long long max_den, double eps) {
    std::optional<std::pair<long long, long long>> best;
    double best_err = eps;
    for (long long den = 1; den <= max_den; ++den) {
        const long long num = std::llround(x * static_cast<double>(den));
        const double err = std::abs(x - static_cast<double>(num) / static_cast<double>(den));
        if (err < best_err) {
            best_err = err;
            const long long g = gcd_ll(num, den);
            best = std::make_pair(num / g, den / g);
        }
    }
    if (best && best->first == best->second) best = std::make_pair(0LL, 1LL);
    return best;
}

inline double relation_residual(const BranchTable& bt, int s, int w, long long p, long long q, cplx& ratio) {
    const int G = bt.G;
    const long long off = p * G / q;
    cplx mean{};
    std::vector<cplx> rho(G + 1);
    for (int i = 0; i <= G; ++i) {
        rho[i] = bt.branches[s][i + off] / bt.branches[w][i];
        mean += rho[i];
    }
    mean /= static_cast<double>(G + 1);
    double res = 0.0;
    for (const cplx& r : rho) res = std::max(res, std::abs(r - mean));
    ratio = mean;
    return res;
}

}  // namespace detail

// p(z, exp(2 pi i t) lambda).
inline LaurentPoly lambda_scaled(const LaurentPoly& p, double t) {
    LaurentPoly r(p.d());
    for (auto& [m, c] : p.terms()) r.add_term(m.zexp, m.lam, c * std::polar(1.0, kTwoPi * t * m.lam));
    return r;
}

// Whether the whole spectrum obeys the shift: p(zeta z, lambda) equals
// exp(2 pi i nu xi) p(z, exp(-2 pi i xi) lambda) with zeta = exp(2 pi i phi).
inline bool charpoly_shift_identity(const LaurentPoly& p, int nu, double phi, double xi, double tol = 1e-10) {
    std::vector<double> t(p.d(), 0.0);
    t[0] = phi;
    LaurentPoly lhs = p.zeta_scaled(t);
    LaurentPoly rhs = lambda_scaled(p, -xi) * std::polar(1.0, kTwoPi * nu * xi);
    return lhs.max_coeff_diff(rhs) < tol;
}

inline std::vector<PhaseRelation> detect_phase_relations(const WalkSpec& w, RelationOptions opt = {}) {
    if (w.d() != 1) throw Error(ErrorKind::InvalidParams, "phase relations are detected for d=1 only");
    if (opt.q_max < 1 || opt.G < 4) throw Error(ErrorKind::InvalidParams, "need q_max >= 1 and G >= 4");
    const int nu = w.nu();
    std::optional<LaurentPoly> poly;
    if (opt.charpoly_check && nu <= kCharpolyMaxNu) poly = laurent_charpoly(w);
    std::vector<PhaseRelation> out;
    for (int q = 1; q <= opt.q_max; ++q) {
        const int Gq = q * ((opt.G + q - 1) / q);
        BranchOptions bo;
        bo.periods = 2;
        BranchTable t1 = branch_table(w, Gq, bo);
        BranchTable t2 = branch_table(w, 2 * t1.G, bo);
        for (int p = 0; p < q; ++p) {
            if (gcd_ll(p, q) != 1) continue;
            for (int s = 0; s < nu; ++s)
                for (int u = 0; u < nu; ++u) {
                    if (p == 0 && s == u) continue;
                    cplx c1, c2;
                    const double r1 = detail::relation_residual(t1, s, u, p, q, c1);
                    if (r1 >= opt.tol) continue;
                    const double r2 = detail::relation_residual(t2, s, u, p, q, c2);
                    if (r2 >= opt.tol) continue;
                    PhaseRelation rel;
                    rel.s = s;
                    rel.w = u;
                    rel.p = p;
                    rel.q = q;
                    rel.residual = std::max(r1, r2);
                    rel.xi = wrap_unit(std::arg(c2) / kTwoPi);
                    if (auto sn = detail::snap_rational(rel.xi, 2LL * opt.q_max, 1e-9)) {
                        rel.snapped = true;
                        rel.xi_num = sn->first;
                        rel.xi_den = sn->second;
                        rel.xi = static_cast<double>(sn->first) / static_cast<double>(sn->second);
                    }
                    if (p == 0 && rel.xi_zero()) continue;  // identical branches, trivial
                    rel.breaks_nrg = rel.xi_zero() && p > 0;
                    if (poly) rel.charpoly_check = charpoly_shift_identity(*poly, nu, rel.phi(), rel.xi) ? 1 : 0;
                    out.push_back(rel);
                }
        }
    }
    return out;
}

// lcm of the denominators of NRG-breaking relations; 1 when there are none.
inline long long compute_M(const std::vector<PhaseRelation>& relations) {
    long long M = 1;
    for (const auto& r : relations)
        if (r.breaks_nrg) M = lcm_ll(M, r.q);
    return M;
}

inline long long subsequence(long long M, long long k, long long n) {
    if (M < 1 || k < 1 || k > M) throw Error(ErrorKind::InvalidParams, "subsequence needs 1 <= k <= M");
    return n * M + k;
}

// ---------------------------------------------------------------------------
// Zeta-shift invariances  p(zeta z, lambda) = p(z, lambda)

struct ZetaShift {
    std::vector<std::pair<long long, long long>> t;  // zeta_a = exp(2 pi i num/den)

    std::vector<double> phases() const {
        std::vector<double> r;
        for (auto& [a, q] : t) r.push_back(static_cast<double>(a) / static_cast<double>(q));
        return r;
    }
    std::vector<cplx> zeta() const {
        std::vector<cplx> r;
        for (double x : phases()) r.push_back(std::polar(1.0, kTwoPi * x));
        return r;
    }
};

// All reduced fractions a/q in [0,1) with q <= Q, ascending.
inline std::vector<std::pair<long long, long long>> farey_fractions(int Q) {
    std::vector<std::pair<long long, long long>> f;
    for (long long q = 1; q <= Q; ++q)
        for (long long a = 0; a < q; ++a)
            if (gcd_ll(a, q) == 1) f.emplace_back(a, q);
    std::sort(f.begin(), f.end(), [](auto x, auto y) { return x.first * y.second < y.first * x.second; });
    return f;
}

// Coefficient tables are compared after dividing by the coefficient of the first
// monomial, so invariance up to an overall constant counts.
inline std::vector<ZetaShift> zeta_shift_invariances(const LaurentPoly& p, int Q, double tol = 1e-10) {
    const int d = p.d();
    if (p.terms().empty()) return {};
    auto fr = farey_fractions(Q);
    const long long total = ipow(static_cast<long long>(fr.size()), d);
    if (total > 2000000) throw Error(ErrorKind::BudgetExceeded, "too many zeta candidates");
    const auto& lead = *p.terms().begin();
    std::vector<ZetaShift> out;
    for (long long idx = 1; idx < total; ++idx) {
        ZetaShift z;
        long long rem = idx;
        std::vector<std::pair<long long, long long>> t(d);
        for (int a = d - 1; a >= 0; --a) {
            t[a] = fr[rem % static_cast<long long>(fr.size())];
            rem /= static_cast<long long>(fr.size());
        }
        z.t = t;
        LaurentPoly sc = p.zeta_scaled(z.phases());
        const cplx factor = lead.second / sc.coeff(lead.first.zexp, lead.first.lam);
        if ((sc * factor).max_coeff_diff(p) < tol) out.push_back(z);
    }
    return out;
}

}  // namespace walklab
