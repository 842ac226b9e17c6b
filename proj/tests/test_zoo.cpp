#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <random>

#include "walklab/walklab.hpp"

using namespace walklab;

namespace {

const double s2 = 1.0 / std::sqrt(2.0);

ModelParams named(const std::string& m) {
    ModelParams p;
    p.model = m;
    return p;
}

}  // namespace

TEST_CASE("every zoo constructor is unitary") {
    std::vector<ModelParams> ps;
    for (const auto& name : model_names()) {
        ModelParams p = named(name);
        p.a = s2, p.b = s2, p.c = s2, p.d = -s2;
        p.r = 0.6, p.t = 0.8;
        p.alpha = 1, p.beta = 2;
        if (name == "diagonal") p.b = p.c = 0.0, p.a = 1.0, p.d = kI;
        if (name == "antidiagonal") p.a = p.d = 0.0, p.b = 1.0, p.c = -kI;
        if (name == "tensor") p.parts = {named("hadamard"), named("grover")};
        if (name == "directsum") p.parts = {named("hadamard"), named("shiftpair")};
        if (name == "puto-std" || name == "puto-lazy") p.dim = 2;
        if (name == "custom") {
            p.custom_d = 1, p.custom_nu = 1;
            p.custom = {{0, 0, {3}, kI}};
        }
        ps.push_back(p);
    }
    for (const auto& p : ps) {
        const WalkSpec w = make_model(p);
        CHECK(w.unitarity_residual() < 1e-12);
    }
}

TEST_CASE("invalid parameters are rejected") {
    auto kind = [](const ModelParams& p) {
        try {
            make_model(p);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::ConfigError;
    };
    ModelParams p = named("coined");
    p.a = p.b = p.c = p.d = 1.0;
    CHECK(kind(p) == ErrorKind::InvalidParams);
    p = named("splitstep");
    p.r = p.t = 0.9;
    CHECK(kind(p) == ErrorKind::InvalidParams);
    CHECK(kind(named("nonsense")) == ErrorKind::InvalidParams);
    p = named("tensor");
    p.parts = {named("hadamard")};
    CHECK(kind(p) == ErrorKind::InvalidParams);
    p = named("coined");
    p.a = s2, p.b = s2, p.c = s2, p.d = -s2;
    p.alpha = 0;
    CHECK(kind(p) == ErrorKind::InvalidParams);
}

TEST_CASE("Hadamard eigenvalues") {
    const WalkSpec w = make_model(named("hadamard"));
    for (double th : {0.0, 0.1, 0.37, 0.8}) {
        const double s = std::sin(kTwoPi * th), c = std::cos(kTwoPi * th);
        const cplx ep = (cplx(0, s) + std::sqrt(c * c + 1)) * s2, em = (cplx(0, s) - std::sqrt(c * c + 1)) * s2;
        for (const cplx& v : eigensystem(floquet_matrix(w, th)).all_values)
            CHECK(std::min(std::abs(v - ep), std::abs(v - em)) < 1e-12);
    }
}

TEST_CASE("split-step eigenvalues for unit steps") {
    const double r = s2, t = s2;
    ModelParams p = named("splitstep");
    p.r = r, p.t = t, p.alpha = 1, p.beta = 1;
    const WalkSpec w = make_model(p);
    for (double th : {0.05, 0.3, 0.61, 0.9}) {
        const double c = std::cos(kTwoPi * th), s = std::sin(kTwoPi * th);
        const double re = r * r + t * t * c;
        const double im = t * std::sqrt(t * t * s * s + 2 * r * r * (1 - c));
        for (const cplx& v : eigensystem(floquet_matrix(w, th)).all_values)
            CHECK(std::min(std::abs(v - cplx(re, im)), std::abs(v - cplx(re, -im))) < 1e-12);
    }
}

TEST_CASE("Hadamard x Grover is a six-state walk in the plane with a flat band") {
    ModelParams p = named("tensor");
    p.parts = {named("hadamard"), named("grover")};
    const WalkSpec w = make_model(p);
    CHECK(w.d() == 2);
    CHECK(w.nu() == 6);
    CHECK(nrg_count_at(w, 10, {0, 1}) == 100);
}

TEST_CASE("classification of the named walks") {
    CHECK(classify(hadamard()).regime == Regime::NRG);
    const auto ex = classify(shift_pair());
    CHECK(ex.regime == Regime::RelationsPresent);
    CHECK(ex.M == 2);
    CHECK(std::string(to_string(ex.regime)) == "NoFlatBands+RelationsPresent");
    const auto g = classify(grover());
    CHECK(g.regime == Regime::FlatBand);
    REQUIRE(g.flat_bands.size() == 1);
    CHECK(std::abs(g.flat_bands[0] - 1.0) < 1e-9);
    CHECK_THROWS_AS(classify(fourier2d()), Error);
}

TEST_CASE("property: coined walks with abcd != 0 and coprime steps are NRG") {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.2, 1.3), ph(0.0, kTwoPi);
    for (int alpha = 1; alpha <= 3; ++alpha)
        for (int beta = 1; beta <= 3; ++beta) {
            if (std::gcd(alpha, beta) != 1) continue;
            const double x = u(rng), p1 = ph(rng), p2 = ph(rng);
            const cplx a = std::polar(std::cos(x), p1), b = std::polar(std::sin(x), p2);
            const cplx c = -std::conj(b), d = std::conj(a);
            const auto cl = classify(coined(a, b, c, d, alpha, beta));
            CHECK_MESSAGE(cl.regime == Regime::NRG, "alpha=" << alpha << " beta=" << beta);
        }
}

TEST_CASE("property: split-step walks with rt != 0 and coprime steps are NRG") {
    for (auto [r, t] : {std::pair{0.6, 0.8}, std::pair{s2, s2}, std::pair{0.28, 0.96}})
        for (auto [alpha, beta] : {std::pair{1, 1}, std::pair{1, 2}, std::pair{3, 2}, std::pair{1, 3}})
            CHECK_MESSAGE(classify(split_step(r, t, alpha, beta)).regime == Regime::NRG,
                          "r=" << r << " alpha=" << alpha << " beta=" << beta);
}

TEST_CASE("property: anti-diagonal regimes over steps up to 6") {
    for (int alpha = 1; alpha <= 6; ++alpha)
        for (int beta = 1; beta <= 6; ++beta) {
            const auto cl = classify(antidiagonal(1.0, kI, alpha, beta));
            const int gap = std::abs(alpha - beta);
            INFO("alpha=" << alpha << " beta=" << beta);
            if (gap == 0) CHECK(cl.regime == Regime::FlatBand);
            else if (gap == 1) CHECK(cl.regime == Regime::NRG);
            else {
                CHECK(cl.regime == Regime::RelationsPresent);
                CHECK(cl.M == gap);
            }
        }
}

TEST_CASE("property: tensors of unit-step walks are half-period invariant") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    // Every jump of H x H has an even coordinate sum.
    const WalkSpec hh = tensor(hadamard(), hadamard());
    for (int t = 0; t < 50; ++t) {
        const double a = u(rng), b = u(rng);
        CHECK(max_diff(floquet_matrix(hh, {a + 0.5, b + 0.5}), floquet_matrix(hh, {a, b})) < 1e-12);
    }
}
