#pragma once
// Shared scalar types, error kinds and a tiny dense complex matrix.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace walklab {

using cplx = std::complex<double>;
using LatticeVector = std::vector<int>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline const cplx kI{0.0, 1.0};

enum class ErrorKind {
    UnitarityViolation,
    DimensionMismatch,
    SizeLimit,
    ConvergenceFailure,
    RefineExhausted,
    BudgetExceeded,
    GroupingUnstable,
    ModulusMismatch,
    RelationMissing,
    InvalidParams,
    BoxMismatch,
    ConfigError,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
    case ErrorKind::UnitarityViolation: return "UnitarityViolation";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::SizeLimit: return "SizeLimit";
    case ErrorKind::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::RefineExhausted: return "RefineExhausted";
    case ErrorKind::BudgetExceeded: return "BudgetExceeded";
    case ErrorKind::GroupingUnstable: return "GroupingUnstable";
    case ErrorKind::ModulusMismatch: return "ModulusMismatch";
    case ErrorKind::RelationMissing: return "RelationMissing";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::BoxMismatch: return "BoxMismatch";
    case ErrorKind::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(std::string(to_string(kind)) + ": " + msg), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

// Row-major square complex matrix. Sizes here are tiny (nu <= 16), so no
// expression templates or BLAS.
class CMat {
public:
    CMat() = default;
    explicit CMat(int n) : n_(n), a_(static_cast<size_t>(n) * n) {}

    static CMat identity(int n) {
        CMat m(n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    int size() const { return n_; }
    cplx& operator()(int i, int j) { return a_[static_cast<size_t>(i) * n_ + j]; }
    const cplx& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * n_ + j]; }

    CMat adjoint() const {
        CMat r(n_);
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) r(j, i) = std::conj((*this)(i, j));
        return r;
    }

    CMat operator*(const CMat& b) const {
        CMat r(n_);
        for (int i = 0; i < n_; ++i)
            for (int k = 0; k < n_; ++k) {
                const cplx aik = (*this)(i, k);
                if (aik == cplx{}) continue;
                for (int j = 0; j < n_; ++j) r(i, j) += aik * b(k, j);
            }
        return r;
    }
    CMat operator+(const CMat& b) const {
        CMat r = *this;
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] += b.a_[i];
        return r;
    }
    CMat operator-(const CMat& b) const {
        CMat r = *this;
        for (size_t i = 0; i < a_.size(); ++i) r.a_[i] -= b.a_[i];
        return r;
    }
    CMat operator*(cplx s) const {
        CMat r = *this;
        for (auto& x : r.a_) x *= s;
        return r;
    }

    std::vector<cplx> apply(const std::vector<cplx>& v) const {
        std::vector<cplx> r(n_);
        for (int i = 0; i < n_; ++i) {
            cplx acc{};
            for (int j = 0; j < n_; ++j) acc += (*this)(i, j) * v[j];
            r[i] = acc;
        }
        return r;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& x : a_) m = std::max(m, std::abs(x));
        return m;
    }

    // Kronecker product, index (i1, i2) -> i1 * n2 + i2.
    static CMat kron(const CMat& a, const CMat& b) {
        const int na = a.size(), nb = b.size();
        CMat r(na * nb);
        for (int i1 = 0; i1 < na; ++i1)
            for (int j1 = 0; j1 < na; ++j1)
                for (int i2 = 0; i2 < nb; ++i2)
                    for (int j2 = 0; j2 < nb; ++j2)
                        r(i1 * nb + i2, j1 * nb + j2) = a(i1, j1) * b(i2, j2);
        return r;
    }

private:
    int n_ = 0;
    std::vector<cplx> a_;
};

inline double max_diff(const CMat& a, const CMat& b) { return (a - b).max_abs(); }

inline double wrap_unit(double x) {
    x -= std::floor(x);
    if (x >= 1.0) x = 0.0;
    return x;
}

inline long long gcd_ll(long long a, long long b) { return std::gcd(a < 0 ? -a : a, b < 0 ? -b : b); }
inline long long lcm_ll(long long a, long long b) { return a / gcd_ll(a, b) * b; }

inline long long ipow(long long b, int e) {
    long long r = 1;
    while (e-- > 0) r *= b;
    return r;
}

// Mixed-radix enumeration of the box L_N^d, first coordinate most significant
// so that linear order equals lexicographic order.
inline LatticeVector unflatten(long long idx, int N, int d) {
    LatticeVector k(d);
    for (int a = d - 1; a >= 0; --a) {
        k[a] = static_cast<int>(idx % N);
        idx /= N;
    }
    return k;
}

inline long long flatten(const LatticeVector& k, int N) {
    long long idx = 0;
    for (int x : k) {
        int m = x % N;
        if (m < 0) m += N;
        idx = idx * N + m;
    }
    return idx;
}

}  // namespace walklab
