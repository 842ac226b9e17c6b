#pragma once
// Laurent polynomials in z_1..z_d with polynomial dependence on lambda.

#include <map>

#include "walk.hpp"

namespace walklab {

struct Monomial {
    LatticeVector zexp;
    int lam = 0;
    bool operator<(const Monomial& o) const { return std::tie(zexp, lam) < std::tie(o.zexp, o.lam); }
    bool operator==(const Monomial& o) const { return zexp == o.zexp && lam == o.lam; }
};

class LaurentPoly {
public:
    static constexpr double kPrune = 1e-14;

    LaurentPoly() = default;
    explicit LaurentPoly(int d) : d_(d) {}

    static LaurentPoly constant(int d, cplx c) {
        LaurentPoly p(d);
        p.add_term(LatticeVector(d, 0), 0, c);
        return p;
    }
    static LaurentPoly lambda(int d) {
        LaurentPoly p(d);
        p.add_term(LatticeVector(d, 0), 1, 1.0);
        return p;
    }

    int d() const { return d_; }
    const std::map<Monomial, cplx>& terms() const { return terms_; }

    void add_term(const LatticeVector& zexp, int lam, cplx c) {
        terms_[Monomial{zexp, lam}] += c;
        prune();
    }

    cplx coeff(const LatticeVector& zexp, int lam) const {
        auto it = terms_.find(Monomial{zexp, lam});
        return it == terms_.end() ? cplx{} : it->second;
    }

    int lambda_degree() const {
        int deg = -1;
        for (auto& [m, c] : terms_) deg = std::max(deg, m.lam);
        return deg;
    }

    LaurentPoly operator+(const LaurentPoly& o) const {
        LaurentPoly r = *this;
        if (r.d_ == 0) r.d_ = o.d_;
        for (auto& [m, c] : o.terms_) r.terms_[m] += c;
        r.prune();
        return r;
    }
    LaurentPoly operator-(const LaurentPoly& o) const { return *this + o * cplx(-1.0); }
    LaurentPoly operator*(cplx s) const {
        LaurentPoly r = *this;
        for (auto& [m, c] : r.terms_) c *= s;
        r.prune();
        return r;
    }
    LaurentPoly operator*(const LaurentPoly& o) const {
        LaurentPoly r(std::max(d_, o.d_));
        for (auto& [ma, ca] : terms_)
            for (auto& [mb, cb] : o.terms_) {
                Monomial m{ma.zexp, ma.lam + mb.lam};
                for (size_t x = 0; x < m.zexp.size(); ++x) m.zexp[x] += mb.zexp[x];
                r.terms_[m] += ca * cb;
            }
        r.prune();
        return r;
    }

    // Multiply by z^shift (monomial normalization).
    LaurentPoly shifted(const LatticeVector& shift) const {
        LaurentPoly r(d_);
        for (auto& [m, c] : terms_) {
            Monomial mm = m;
            for (int x = 0; x < d_; ++x) mm.zexp[x] += shift[x];
            r.terms_[mm] = c;
        }
        return r;
    }

    // p(zeta z, lambda) for zeta given by phases zeta_a = exp(2 pi i t_a).
    LaurentPoly zeta_scaled(const std::vector<double>& t) const {
        LaurentPoly r(d_);
        for (auto& [m, c] : terms_) {
            double ph = 0.0;
            for (int x = 0; x < d_; ++x) ph += t[x] * m.zexp[x];
            r.terms_[m] = c * std::polar(1.0, kTwoPi * ph);
        }
        return r;
    }

    cplx evaluate(const std::vector<cplx>& z, cplx lam) const {
        cplx acc{};
        for (auto& [m, c] : terms_) {
            cplx t = c;
            for (int x = 0; x < d_; ++x) t *= std::pow(z[x], m.zexp[x]);
            for (int k = 0; k < m.lam; ++k) t *= lam;
            acc += t;
        }
        return acc;
    }

    double max_coeff_diff(const LaurentPoly& o) const {
        double worst = 0.0;
        for (auto& [m, c] : terms_) worst = std::max(worst, std::abs(c - o.coeff(m.zexp, m.lam)));
        for (auto& [m, c] : o.terms_) worst = std::max(worst, std::abs(c - coeff(m.zexp, m.lam)));
        return worst;
    }

    std::string to_string() const;

private:
    void prune() {
        for (auto it = terms_.begin(); it != terms_.end();)
            if (std::abs(it->second) < kPrune) it = terms_.erase(it);
            else ++it;
    }

    int d_ = 0;
    std::map<Monomial, cplx> terms_;
};

inline std::string LaurentPoly::to_string() const {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (auto& [m, c] : terms_) {
        if (!first) os << " + ";
        first = false;
        os << "(" << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
        for (int x = 0; x < d_; ++x)
            if (m.zexp[x] != 0) os << "*z" << (x + 1) << "^" << m.zexp[x];
        if (m.lam) os << "*L^" << m.lam;
    }
    if (first) os << "0";
    return os.str();
}

inline constexpr int kCharpolyMaxNu = 8;

// det(U^(z) - lambda I) with U^(z)_{ij} = sum_p U_{ij}(p) z^{-p}, by expansion over
// column subsets (2^nu * nu polynomial products).
inline LaurentPoly laurent_charpoly(const WalkSpec& w) {
    const int nu = w.nu(), d = w.d();
    if (nu > kCharpolyMaxNu)
        throw Error(ErrorKind::SizeLimit, "charpoly expansion supports nu <= 8, got " + std::to_string(nu));
    std::vector<LaurentPoly> entry(static_cast<size_t>(nu) * nu, LaurentPoly(d));
    for (size_t k = 0; k < w.jumps().size(); ++k) {
        LatticeVector e = w.jumps()[k];
        for (int& x : e) x = -x;
        for (int i = 0; i < nu; ++i)
            for (int j = 0; j < nu; ++j)
                if (w.coeffs()[k](i, j) != cplx{}) entry[i * nu + j].add_term(e, 0, w.coeffs()[k](i, j));
    }
    for (int i = 0; i < nu; ++i) entry[i * nu + i] = entry[i * nu + i] - LaurentPoly::lambda(d);

    // minor[mask] = determinant of the rows 0..popcount(mask)-1 restricted to columns in mask.
    std::vector<LaurentPoly> minor(size_t(1) << nu, LaurentPoly(d));
    minor[0] = LaurentPoly::constant(d, 1.0);
    for (unsigned mask = 1; mask < (1u << nu); ++mask) {
        const int row = __builtin_popcount(mask) - 1;
        LaurentPoly acc(d);
        int sign_pos = 0;
        for (int col = 0; col < nu; ++col) {
            if (!(mask & (1u << col))) continue;
            const unsigned rest = mask & ~(1u << col);
            // Laplace expansion along the last selected row.
            LaurentPoly term = entry[row * nu + col] * minor[rest];
            acc = ((row + sign_pos) % 2 == 0) ? acc + term : acc - term;
            ++sign_pos;
        }
        minor[mask] = acc;
    }
    return minor[(1u << nu) - 1];
}

}  // namespace walklab
