#pragma once
// Named walks and the one-dimensional regime classifier.

#include <map>

#include "spectra.hpp"

namespace walklab {

namespace detail {

inline LatticeVector axis(int d, int a, int len) {
    LatticeVector v(d, 0);
    v[a] = len;
    return v;
}

inline void require_unitary(const CMat& c, const std::string& what) {
    if (max_diff(c.adjoint() * c, CMat::identity(c.size())) > 1e-12)
        throw Error(ErrorKind::InvalidParams, what + " is not unitary");
}

inline void require_steps(int alpha, int beta) {
    if (alpha < 1 || beta < 1) throw Error(ErrorKind::InvalidParams, "step sizes must be positive integers");
}

}  // namespace detail

inline CMat coin2(cplx a, cplx b, cplx c, cplx d) {
    CMat m(2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = c;
    m(1, 1) = d;
    return m;
}

inline CMat grover_coin(int nu) {
    CMat m(nu);
    for (int i = 0; i < nu; ++i)
        for (int j = 0; j < nu; ++j) m(i, j) = 2.0 / nu - (i == j ? 1.0 : 0.0);
    return m;
}

inline CMat fourier_coin(int nu) {
    CMat m(nu);
    for (int p = 0; p < nu; ++p)
        for (int q = 0; q < nu; ++q) m(p, q) = std::polar(1.0 / std::sqrt(static_cast<double>(nu)), kTwoPi * p * q / nu);
    return m;
}

// Coined walk: row 1 moves by -alpha, row 2 by +beta.
inline WalkSpec coined(cplx a, cplx b, cplx c, cplx d, int alpha, int beta) {
    detail::require_steps(alpha, beta);
    detail::require_unitary(coin2(a, b, c, d), "coin");
    return build_walk(1, 2, {{0, 0, {-alpha}, a}, {0, 1, {-alpha}, b}, {1, 0, {beta}, c}, {1, 1, {beta}, d}});
}

inline WalkSpec hadamard() {
    const double s = 1.0 / std::sqrt(2.0);
    return coined(s, s, s, -s, 1, 1);
}

inline WalkSpec grover() {
    AmplitudeTable t;
    const CMat c = grover_coin(3);
    const int shift[3] = {-1, 0, 1};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) t.push_back({i, j, {shift[i]}, c(i, j)});
    return build_walk(1, 3, t);
}

inline WalkSpec diagonal(cplx a, cplx d, int alpha, int beta) {
    return coined(a, 0.0, 0.0, d, alpha, beta);
}

inline WalkSpec antidiagonal(cplx b, cplx c, int alpha, int beta) {
    return coined(0.0, b, c, 0.0, alpha, beta);
}

// Split-step walk with reflection r and transmission t (real, r^2 + t^2 = 1).
inline WalkSpec split_step(double r, double t, int alpha, int beta) {
    detail::require_steps(alpha, beta);
    if (std::abs(r * r + t * t - 1.0) > 1e-12) throw Error(ErrorKind::InvalidParams, "split-step needs r^2 + t^2 = 1");
    const double rr = r * r, tt = t * t, rt = r * t;
    return build_walk(1, 2,
                      {{0, 0, {alpha - beta}, rr}, {0, 0, {alpha}, tt},
                       {0, 1, {alpha - beta}, rt}, {0, 1, {alpha}, -rt},
                       {1, 0, {-beta}, rt}, {1, 0, {0}, -rt},
                       {1, 1, {0}, rr}, {1, 1, {-beta}, tt}});
}

// Arc reversal on Z: flip * diag(S_{-1}, S_1) * C.
inline WalkSpec arc_reversal(const CMat& c) {
    if (c.size() != 2) throw Error(ErrorKind::InvalidParams, "arc reversal is constructed for d=1 (2x2 coin) only");
    detail::require_unitary(c, "coin");
    return build_walk(1, 2, {{0, 0, {1}, c(1, 0)}, {0, 1, {1}, c(1, 1)}, {1, 0, {-1}, c(0, 0)}, {1, 1, {-1}, c(0, 1)}});
}

// diag(S_1, S_-2): two decoupled shifts; the second band repeats under theta -> theta + 1/2.
inline WalkSpec shift_pair() { return build_walk(1, 2, {{0, 0, {1}, 1.0}, {1, 1, {-2}, 1.0}}); }

// Standard PUTO walk, nu = 2d: odd rows (1-based) move along +e, even rows along -e.
inline WalkSpec puto_std(int d, const CMat& c) {
    if (d < 1 || c.size() != 2 * d) throw Error(ErrorKind::InvalidParams, "standard PUTO needs a 2d x 2d coin");
    detail::require_unitary(c, "coin");
    AmplitudeTable t;
    for (int i = 0; i < 2 * d; ++i) {
        const LatticeVector p = detail::axis(d, i / 2, i % 2 == 0 ? 1 : -1);
        for (int j = 0; j < 2 * d; ++j)
            if (c(i, j) != cplx{}) t.push_back({i, j, p, c(i, j)});
    }
    return build_walk(d, 2 * d, t);
}

// Lazy PUTO walk, nu = 2d + 1: rows 1..d move along +e_i, row d+1 stays, the rest along -e.
inline WalkSpec puto_lazy(int d, const CMat& c) {
    if (d < 1 || c.size() != 2 * d + 1) throw Error(ErrorKind::InvalidParams, "lazy PUTO needs a (2d+1)x(2d+1) coin");
    detail::require_unitary(c, "coin");
    AmplitudeTable t;
    for (int i = 0; i < 2 * d + 1; ++i) {
        LatticeVector p(d, 0);
        if (i < d) p = detail::axis(d, i, 1);
        else if (i > d) p = detail::axis(d, i - d - 1, -1);
        for (int j = 0; j < 2 * d + 1; ++j)
            if (c(i, j) != cplx{}) t.push_back({i, j, p, c(i, j)});
    }
    return build_walk(d, 2 * d + 1, t);
}

inline WalkSpec fourier2d() { return puto_std(2, fourier_coin(4)); }

// Separable walk on Z^{d1+d2}: spin (i1, i2) -> i1*nu2 + i2, jump (p1, p2).
inline WalkSpec tensor(const WalkSpec& u1, const WalkSpec& u2) {
    AmplitudeTable t;
    for (size_t a = 0; a < u1.jumps().size(); ++a)
        for (size_t b = 0; b < u2.jumps().size(); ++b) {
            LatticeVector p = u1.jumps()[a];
            p.insert(p.end(), u2.jumps()[b].begin(), u2.jumps()[b].end());
            const CMat k = CMat::kron(u1.coeffs()[a], u2.coeffs()[b]);
            for (int i = 0; i < k.size(); ++i)
                for (int j = 0; j < k.size(); ++j)
                    if (k(i, j) != cplx{}) t.push_back({i, j, p, k(i, j)});
        }
    return build_walk(u1.d() + u2.d(), u1.nu() * u2.nu(), t);
}

// Block-diagonal walk on Z^d from d one-dimensional walks, block i moving along e_i.
inline WalkSpec direct_sum(const std::vector<WalkSpec>& parts) {
    const int d = static_cast<int>(parts.size());
    if (d < 1) throw Error(ErrorKind::InvalidParams, "direct sum needs at least one constituent");
    AmplitudeTable t;
    int off = 0;
    for (int a = 0; a < d; ++a) {
        if (parts[a].d() != 1) throw Error(ErrorKind::InvalidParams, "direct sum constituents must be one-dimensional");
        for (const auto& e : parts[a].table()) t.push_back({e.i + off, e.j + off, detail::axis(d, a, e.p[0]), e.value});
        off += parts[a].nu();
    }
    return build_walk(d, off, t);
}

// S^(y) (C x I) S^(x) (C x I) with S^(x) = diag(S_{e1}, S_{-e1}), S^(y) = diag(S_{e2}, S_{-e2}).
inline WalkSpec dfmb(const CMat& c) {
    if (c.size() != 2) throw Error(ErrorKind::InvalidParams, "DFMB needs a 2x2 coin");
    detail::require_unitary(c, "coin");
    const int sigma[2] = {1, -1};
    AmplitudeTable t;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
            for (int k = 0; k < 2; ++k) {
                const cplx v = c(i, k) * c(k, j);
                if (v != cplx{}) t.push_back({i, j, {sigma[k], sigma[i]}, v});
            }
    return build_walk(2, 2, t);
}

// ---------------------------------------------------------------------------
// Parameterized construction

struct ModelParams {
    std::string model = "hadamard";
    cplx a = 0.0, b = 0.0, c = 0.0, d = 0.0;  // 2x2 coin entries
    int alpha = 1, beta = 1;
    double r = 0.0, t = 0.0;
    int dim = 1;
    std::vector<cplx> coin;  // row-major square coin for puto / arc reversal / dfmb
    std::vector<ModelParams> parts;  // tensor (two) and direct sum constituents
    int custom_d = 1, custom_nu = 1;
    AmplitudeTable custom;
};

inline CMat coin_from(const std::vector<cplx>& v) {
    const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(v.size()))));
    if (n * n != static_cast<int>(v.size()) || n == 0) throw Error(ErrorKind::InvalidParams, "coin must be a square table");
    CMat m(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = v[static_cast<size_t>(i) * n + j];
    return m;
}

inline const std::vector<std::string>& model_names() {
    static const std::vector<std::string> names = {"antidiagonal", "arcreversal", "coined", "custom", "dfmb", "diagonal", "directsum", "fourier2d",
                                                   "grover", "hadamard", "puto-lazy", "puto-std", "shiftpair", "splitstep", "tensor"};
    return names;
}

inline WalkSpec make_model(const ModelParams& p) {
    const std::string& m = p.model;
    if (m == "hadamard") return hadamard();
    if (m == "grover") return grover();
    if (m == "shiftpair") return shift_pair();
    if (m == "fourier2d") return fourier2d();
    if (m == "coined") return coined(p.a, p.b, p.c, p.d, p.alpha, p.beta);
    if (m == "diagonal") return diagonal(p.a, p.d, p.alpha, p.beta);
    if (m == "antidiagonal") return antidiagonal(p.b, p.c, p.alpha, p.beta);
    if (m == "splitstep") return split_step(p.r, p.t, p.alpha, p.beta);
    if (m == "arcreversal") return arc_reversal(p.coin.empty() ? coin2(p.a, p.b, p.c, p.d) : coin_from(p.coin));
    if (m == "dfmb") return dfmb(p.coin.empty() ? coin2(p.a, p.b, p.c, p.d) : coin_from(p.coin));
    if (m == "puto-std" || m == "puto-lazy") {
        const int nu = m == "puto-std" ? 2 * p.dim : 2 * p.dim + 1;
        const CMat c = p.coin.empty() ? grover_coin(nu) : coin_from(p.coin);
        return m == "puto-std" ? puto_std(p.dim, c) : puto_lazy(p.dim, c);
    }
    if (m == "tensor") {
        if (p.parts.size() != 2) throw Error(ErrorKind::InvalidParams, "tensor needs exactly two parts");
        return tensor(make_model(p.parts[0]), make_model(p.parts[1]));
    }
    if (m == "directsum") {
        std::vector<WalkSpec> ws;
        for (const auto& q : p.parts) ws.push_back(make_model(q));
        return direct_sum(ws);
    }
    if (m == "custom") return build_walk(p.custom_d, p.custom_nu, p.custom);
    throw Error(ErrorKind::InvalidParams, "unknown model '" + m + "'");
}

// ---------------------------------------------------------------------------
// Regime classification for walks on Z

enum class Regime { NRG, RelationsPresent, FlatBand };

inline const char* to_string(Regime r) {
    switch (r) {
    case Regime::NRG: return "NRG";
    case Regime::RelationsPresent: return "NoFlatBands+RelationsPresent";
    case Regime::FlatBand: return "FlatBand";
    }
    return "?";
}

struct Classification {
    Regime regime = Regime::NRG;
    long long M = 1;
    std::vector<cplx> flat_bands;
    std::vector<PhaseRelation> relations;  // all detected, NRG-breaking flagged
    std::vector<std::string> implications;
};

inline Classification classify(const WalkSpec& w, RelationOptions ro = {}, int flat_G = 0, double flat_tol = kEigTol) {
    if (w.d() != 1) throw Error(ErrorKind::InvalidParams, "classification is defined for walks on Z");
    Classification c;
    c.flat_bands = detect_flat_bands(w, flat_G, flat_tol);
    if (!c.flat_bands.empty()) {
        c.regime = Regime::FlatBand;
        c.implications = {"flat band: U has an eigenvalue",
                          "position ergodicity fails for some regular observable"};
        return c;
    }
    c.relations = detect_phase_relations(w, ro);
    c.M = compute_M(c.relations);
    if (c.M > 1) {
        c.regime = Regime::RelationsPresent;
        c.implications = {"no flat band: position ergodicity holds for regular observables",
                          "NRG and full ergodicity hold along N = nM + 1",
                          "bounded observables equidistribute on classes u mod M with weights c_u along N = nM + k"};
    } else {
        c.regime = Regime::NRG;
        c.implications = {"no flat band: position ergodicity holds for regular observables",
                          "full ergodicity holds for all bounded observables"};
    }
    return c;
}

}  // namespace walklab
