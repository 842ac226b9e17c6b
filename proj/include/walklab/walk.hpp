#pragma once
// Homogeneous finite-range walks: U_{i,j} = sum_p U_{i,j}(p) S_p on Z^d (x) C^nu.

#include <map>
#include <sstream>
#include <tuple>

#include "core.hpp"

namespace walklab {

struct Amplitude {
    int i = 0;  // spin row, 0-based
    int j = 0;  // spin column, 0-based
    LatticeVector p;
    cplx value;
};

using AmplitudeTable = std::vector<Amplitude>;

inline std::string format_vector(const LatticeVector& v) {
    std::ostringstream os;
    os << "(";
    for (size_t a = 0; a < v.size(); ++a) os << (a ? "," : "") << v[a];
    os << ")";
    return os.str();
}

class WalkSpec {
public:
    int d() const { return d_; }
    int nu() const { return nu_; }
    int range() const { return range_; }
    // Distinct jumps in lexicographic order, with one nu x nu coefficient matrix each.
    const std::vector<LatticeVector>& jumps() const { return jumps_; }
    const std::vector<CMat>& coeffs() const { return coeffs_; }
    double unitarity_residual() const { return residual_; }

    AmplitudeTable table() const {
        AmplitudeTable t;
        for (size_t k = 0; k < jumps_.size(); ++k)
            for (int i = 0; i < nu_; ++i)
                for (int j = 0; j < nu_; ++j)
                    if (coeffs_[k](i, j) != cplx{}) t.push_back({i, j, jumps_[k], coeffs_[k](i, j)});
        return t;
    }

    const CMat* coeff_at(const LatticeVector& p) const {
        auto it = std::lower_bound(jumps_.begin(), jumps_.end(), p);
        if (it == jumps_.end() || *it != p) return nullptr;
        return &coeffs_[static_cast<size_t>(it - jumps_.begin())];
    }

private:
    friend WalkSpec build_walk(int d, int nu, const AmplitudeTable& table, double tol);
    int d_ = 0, nu_ = 0, range_ = 0;
    std::vector<LatticeVector> jumps_;
    std::vector<CMat> coeffs_;
    double residual_ = 0.0;
};

inline constexpr double kUnitarityTol = 1e-12;

// Checks sum_p U(p)^dagger U(p+q) = delta_{q,0} I for every difference q of two
// jumps; returns the largest entry error and the offending q.
inline std::pair<double, LatticeVector> unitarity_defect(const std::vector<LatticeVector>& jumps,
                                                         const std::vector<CMat>& coeffs, int nu) {
    std::map<LatticeVector, CMat> acc;
    for (size_t a = 0; a < jumps.size(); ++a)
        for (size_t b = 0; b < jumps.size(); ++b) {
            LatticeVector q(jumps[a].size());
            for (size_t x = 0; x < q.size(); ++x) q[x] = jumps[b][x] - jumps[a][x];
            auto it = acc.find(q);
            if (it == acc.end()) it = acc.emplace(q, CMat(nu)).first;
            it->second = it->second + coeffs[a].adjoint() * coeffs[b];
        }
    double worst = 0.0;
    LatticeVector worst_q;
    for (auto& [q, m] : acc) {
        bool zero = std::all_of(q.begin(), q.end(), [](int x) { return x == 0; });
        double e = zero ? max_diff(m, CMat::identity(nu)) : m.max_abs();
        if (e > worst || worst_q.empty()) {
            worst = e;
            worst_q = q;
        }
    }
    return {worst, worst_q};
}

inline WalkSpec build_walk(int d, int nu, const AmplitudeTable& table, double tol = kUnitarityTol) {
    if (d <= 0 || nu <= 0) throw Error(ErrorKind::InvalidParams, "d and nu must be positive");
    std::map<LatticeVector, CMat> by_jump;
    for (const auto& a : table) {
        if (static_cast<int>(a.p.size()) != d)
            throw Error(ErrorKind::DimensionMismatch,
                        "jump " + format_vector(a.p) + " has " + std::to_string(a.p.size()) +
                            " components, expected " + std::to_string(d));
        if (a.i < 0 || a.i >= nu || a.j < 0 || a.j >= nu)
            throw Error(ErrorKind::DimensionMismatch, "spin index out of range");
        auto it = by_jump.find(a.p);
        if (it == by_jump.end()) it = by_jump.emplace(a.p, CMat(nu)).first;
        it->second(a.i, a.j) += a.value;
    }
    WalkSpec w;
    w.d_ = d;
    w.nu_ = nu;
    for (auto& [p, m] : by_jump) {
        if (m.max_abs() == 0.0) continue;
        w.jumps_.push_back(p);
        w.coeffs_.push_back(m);
        for (int x : p) w.range_ = std::max(w.range_, std::abs(x));
    }
    if (w.jumps_.empty()) throw Error(ErrorKind::InvalidParams, "walk has no nonzero amplitude");
    auto [err, q] = unitarity_defect(w.jumps_, w.coeffs_, nu);
    w.residual_ = err;
    if (err > tol) {
        std::ostringstream os;
        os << "convolution identity fails at q=" << format_vector(q) << " with max entry error " << err;
        throw Error(ErrorKind::UnitarityViolation, os.str());
    }
    return w;
}

// Entry (i,j) = sum_p U_{i,j}(p) exp(-2 pi i theta.p).
inline CMat floquet_matrix(const WalkSpec& w, const std::vector<double>& theta) {
    CMat m(w.nu());
    for (size_t k = 0; k < w.jumps().size(); ++k) {
        double ph = 0.0;
        for (int a = 0; a < w.d(); ++a) ph += theta[a] * w.jumps()[k][a];
        const cplx e = std::polar(1.0, -kTwoPi * ph);
        m = m + w.coeffs()[k] * e;
    }
    return m;
}

inline CMat floquet_matrix(const WalkSpec& w, double theta) { return floquet_matrix(w, std::vector<double>{theta}); }

}  // namespace walklab
