#pragma once
// Eigen-decomposition of small unitary matrices.
//
// M is normal, so H_R = (M + M^dagger)/2 and H_I = (M - M^dagger)/(2i) commute.
// H_R is diagonalized first, then H_I is
// diagonalized inside each (numerically) degenerate H_R eigenspace.

#include <Eigen/Dense>

#include "core.hpp"

namespace walklab {

struct HermitianEigen {
    std::vector<double> values;  // ascending
    CMat vectors;                // columns are eigenvectors
};

// Hermitian eigenproblem through Eigen's self-adjoint solver (ascending values).
inline HermitianEigen hermitian_eigen(const CMat& a) {
    const int n = a.size();
    Eigen::MatrixXcd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = a(i, j);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::ConvergenceFailure, "Hermitian eigensolver did not converge");
    HermitianEigen out;
    out.vectors = CMat(n);
    for (int c = 0; c < n; ++c) {
        out.values.push_back(es.eigenvalues()(c));
        for (int k = 0; k < n; ++k) out.vectors(k, c) = es.eigenvectors()(k, c);
    }
    return out;
}

struct UnitaryEigenpairs {
    std::vector<cplx> values;  // one per eigenvector, unnormalized Rayleigh quotients
    CMat vectors;              // orthonormal columns
};

// Cluster width for H_R eigenvalues. Merging distinct real parts is harmless
// (H_I then stays diagonal in the merged block); splitting a genuine cluster is not.
inline constexpr double kRealPartCluster = 1e-6;

inline UnitaryEigenpairs unitary_eigenpairs(const CMat& m) {
    const int n = m.size();
    const CMat madj = m.adjoint();
    const CMat hr = (m + madj) * cplx(0.5);
    const CMat hi = (m - madj) * cplx(0.0, -0.5);
    HermitianEigen er = hermitian_eigen(hr);
    CMat w = er.vectors;
    int start = 0;
    while (start < n) {
        int end = start + 1;
        while (end < n && er.values[end] - er.values[end - 1] < kRealPartCluster) ++end;
        const int k = end - start;
        if (k > 1) {
            CMat sub(k);
            for (int x = 0; x < k; ++x)
                for (int y = 0; y < k; ++y) {
                    cplx acc{};
                    for (int r = 0; r < n; ++r)
                        for (int c = 0; c < n; ++c)
                            acc += std::conj(w(r, start + x)) * hi(r, c) * w(c, start + y);
                    sub(x, y) = acc;
                }
            for (int x = 0; x < k; ++x) {
                sub(x, x) = sub(x, x).real();
                for (int y = x + 1; y < k; ++y) {
                    const cplx avg = 0.5 * (sub(x, y) + std::conj(sub(y, x)));
                    sub(x, y) = avg;
                    sub(y, x) = std::conj(avg);
                }
            }
            HermitianEigen ei = hermitian_eigen(sub);
            std::vector<cplx> col(static_cast<size_t>(n) * k);
            for (int r = 0; r < n; ++r)
                for (int y = 0; y < k; ++y) {
                    cplx acc{};
                    for (int x = 0; x < k; ++x) acc += w(r, start + x) * ei.vectors(x, y);
                    col[static_cast<size_t>(r) * k + y] = acc;
                }
            for (int r = 0; r < n; ++r)
                for (int y = 0; y < k; ++y) w(r, start + y) = col[static_cast<size_t>(r) * k + y];
        }
        start = end;
    }
    UnitaryEigenpairs out;
    out.vectors = w;
    for (int c = 0; c < n; ++c) {
        cplx acc{};
        for (int r = 0; r < n; ++r) {
            cplx mv{};
            for (int s = 0; s < n; ++s) mv += m(r, s) * w(s, c);
            acc += std::conj(w(r, c)) * mv;
        }
        out.values.push_back(acc);
    }
    return out;
}

inline double eig_angle(cplx z) { return std::arg(z); }

// Spectral data of a unitary at one quasimomentum, grouped by eigenvalue.
struct FloquetEigen {
    std::vector<double> theta;
    std::vector<cplx> values;       // distinct eigenvalues, sorted by angle in (-pi, pi]
    std::vector<CMat> projections;  // Hermitian idempotents, matched to values
    std::vector<int> multiplicities;
    std::vector<cplx> all_values;   // the nu eigenvalues with multiplicity, sorted by angle
};

inline constexpr double kGroupTol = 1e-9;

inline FloquetEigen eigensystem(const CMat& m, double group_tol = kGroupTol) {
    const int n = m.size();
    UnitaryEigenpairs ep = unitary_eigenpairs(m);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int x, int y) { return eig_angle(ep.values[x]) < eig_angle(ep.values[y]); });
    FloquetEigen fe;
    for (int x : order) fe.all_values.push_back(ep.values[x]);
    // Single-linkage grouping on the circle (handles the +-pi seam).
    std::vector<int> group(n, -1);
    int ng = 0;
    for (int a = 0; a < n; ++a) {
        if (group[order[a]] >= 0) continue;
        std::vector<int> stack{order[a]};
        group[order[a]] = ng;
        while (!stack.empty()) {
            int x = stack.back();
            stack.pop_back();
            for (int y = 0; y < n; ++y)
                if (group[y] < 0 && std::abs(ep.values[x] - ep.values[y]) < group_tol) {
                    group[y] = ng;
                    stack.push_back(y);
                }
        }
        ++ng;
    }
    fe.values.assign(ng, cplx{});
    fe.projections.assign(ng, CMat(n));
    fe.multiplicities.assign(ng, 0);
    for (int x = 0; x < n; ++x) {
        const int g = group[x];
        fe.values[g] += ep.values[x];
        fe.multiplicities[g] += 1;
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c)
                fe.projections[g](r, c) += ep.vectors(r, x) * std::conj(ep.vectors(c, x));
    }
    for (int g = 0; g < ng; ++g) fe.values[g] /= static_cast<double>(fe.multiplicities[g]);
    return fe;
}

inline FloquetEigen eigensystem_at(const CMat& m, const std::vector<double>& theta, double group_tol = kGroupTol) {
    FloquetEigen fe = eigensystem(m, group_tol);
    fe.theta = theta;
    return fe;
}

// U^k restricted to one node, via the spectral decomposition.
inline CMat matrix_power(const FloquetEigen& fe, long long k) {
    const int n = fe.projections.empty() ? 0 : fe.projections[0].size();
    CMat r(n);
    for (size_t g = 0; g < fe.values.size(); ++g) {
        // Unit modulus by unitarity; powering the angle avoids norm drift.
        const double ang = std::arg(fe.values[g]);
        const cplx pk = std::polar(1.0, std::fmod(ang * static_cast<double>(k), kTwoPi));
        r = r + fe.projections[g] * pk;
    }
    return r;
}

}  // namespace walklab
