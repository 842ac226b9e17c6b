#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "walklab/walklab.hpp"

using namespace walklab;

namespace {

std::vector<StateEntry> random_state(std::mt19937_64& rng, int nu, int radius, int count) {
    std::uniform_int_distribution<int> pos(-radius, radius), spin(0, nu - 1);
    std::normal_distribution<double> z;
    std::vector<StateEntry> e;
    while (static_cast<int>(e.size()) < count) {
        const int x = pos(rng), j = spin(rng);
        if (std::any_of(e.begin(), e.end(), [&](const StateEntry& o) { return o.pos[0] == x && o.spin == j; })) continue;
        e.push_back({{x}, j, cplx{z(rng), z(rng)}});
    }
    return normalized(e);
}

Observable random_bounded(std::mt19937_64& rng, int N) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> v(N);
    for (auto& x : v) x = u(rng);
    return Observable::bounded(N, v);
}

}  // namespace

TEST_CASE("uniform averages") {
    CHECK(std::abs(uniform_average(constant_observable(7, 1, 1.0), 7, 1) - 1.0) < 1e-15);
    CHECK(std::abs(uniform_average(Observable::summable({{{0, 0}, 1.0}}), 5, 2) - 1.0 / 25) < 1e-15);
    CHECK(std::abs(uniform_average(parity_indicator(10, 1, 1), 10, 1) - 0.5) < 1e-15);
    // Sites outside [0, N-1] are dropped from a summable restriction.
    CHECK(std::abs(uniform_average(Observable::summable({{{-1}, 1.0}, {{2}, 1.0}}), 4, 1) - 0.25) < 1e-15);
    // A sampled field with one Fourier mode averages to zero.
    CHECK(std::abs(uniform_average(Observable::sampled({{{1}, 1.0}}), 9, 1)) < 1e-14);
}

TEST_CASE("bounded observables are checked") {
    CHECK_THROWS_AS(Observable::bounded(2, {2.0, 0.0}), Error);
    try {
        parity_indicator(4, 1, 0).on_box(6, 1);
        FAIL("expected BoxMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BoxMismatch);
    }
}

TEST_CASE("target averages") {
    std::mt19937_64 rng(1);
    const int N = 14;
    const BoxState s = make_box_state(N, 1, 2, random_state(rng, 2, 3, 4));
    const Observable phi = random_bounded(rng, N);
    const cplx t = target_average(hadamard(), s, {phi, phi});
    CHECK(std::abs(t - uniform_average(phi, N, 1)) < 1e-12);
    const BoxState e = make_box_state(N, 1, 2, {{{0}, 0, 1.0}});
    const cplx odd_even = target_average(antidiagonal(1.0, 1.0, 1, 3), e, {parity_indicator(N, 1, 1), parity_indicator(N, 1, 0)});
    CHECK(std::abs(odd_even - 0.5) < 1e-12);
    CHECK(std::abs(target_average(hadamard(), s, {constant_observable(N, 1, 0.0), constant_observable(N, 1, 0.0)})) == 0.0);
}

TEST_CASE("gaps") {
    for (int N : {12, 25}) {
        std::vector<cplx> v(N);
        v[0] = v[2] = 1.0;
        const double gap = pqe_gap(antidiagonal(1.0, 1.0, 2, 2), make_box_state(N, 1, 2, {{{0}, 0, 1.0}}), Observable::bounded(N, v));
        CHECK(std::abs(gap - (1.0 - 2.0 / N)) < 1e-12);
    }
    double prev = 1.0;
    for (int N : {64, 128, 256}) {
        const double gap = pqe_gap(hadamard(), make_box_state(N, 1, 2, {{{0}, 0, 1.0}}), Observable::summable({{{0}, 1.0}}));
        CHECK(gap < prev);
        prev = gap;
    }
    const double gg = pqe_gap(grover(), make_box_state(120, 1, 3, {{{0}, 0, 1.0}}), Observable::summable({{{0}, 1.0}}));
    CHECK(std::abs(gg - 2.0 * (5.0 - 2.0 * std::sqrt(6.0))) < 0.01);

    std::mt19937_64 rng(2);
    const int N = 128;
    const BoxState s = make_box_state(N, 1, 2, {{{0}, 0, 1.0}});
    CHECK(fqe_gap(hadamard(), s, {random_bounded(rng, N), random_bounded(rng, N)}) < 0.05);
    CHECK(fqe_gap(hadamard(), s, {constant_observable(N, 1, 1.0), constant_observable(N, 1, 1.0)}) < 1e-12);
    for (int n : {5, 12}) {
        const int M = 2 * n;
        const BoxState e = make_box_state(M, 1, 2, {{{0}, 0, 1.0}});
        const double g = fqe_gap(antidiagonal(1.0, 1.0, 1, 3), e, {parity_indicator(M, 1, 1), parity_indicator(M, 1, 0)});
        CHECK(std::abs(g - 0.5) < 1e-10);
    }
}

TEST_CASE("total variation") {
    PositionMeasure a{3, 1, {0.5, 0.5, 0.0}}, b{3, 1, {0.0, 0.5, 0.5}};
    CHECK(tv_distance(a, b) == 0.5);
    CHECK_THROWS_AS(tv_distance(a, uniform_measure(4, 1)), Error);
    double prev = 1.0;
    for (int N : {64, 128, 256}) {
        const MeasurePair m = limit_measure(hadamard(), make_box_state(N, 1, 2, {{{0}, 0, 1.0}}));
        const double t = tv_distance(m.total, uniform_measure(N, 1));
        CHECK(t < prev);
        prev = t;
    }
}

TEST_CASE("property: bounded observables are controlled by twice the TV distance") {
    std::mt19937_64 rng(3);
    const int N = 40;
    const BoxState s = make_box_state(N, 1, 2, random_state(rng, 2, 2, 3));
    const MeasurePair m = limit_measure(split_step(0.6, 0.8, 1, 2), s);
    const PositionMeasure u = uniform_measure(N, 1);
    const double tv = tv_distance(m.total, u);
    auto pairing = [&](const std::vector<cplx>& phi) {
        cplx acc{};
        for (int x = 0; x < N; ++x) acc += phi[x] * (m.total.weights[x] - u.weights[x]);
        return std::abs(acc);
    };
    for (int t = 0; t < 50; ++t) CHECK(pairing(random_bounded(rng, N).values) <= 2.0 * tv + 1e-12);
    std::vector<cplx> sign(N);
    for (int x = 0; x < N; ++x) sign[x] = m.total.weights[x] >= u.weights[x] ? 1.0 : -1.0;
    CHECK(std::abs(pairing(sign) - 2.0 * tv) < 1e-12);
}

TEST_CASE("weak-limit constants") {
    // Diagonal walk: each spin is its own eigenvector, so c_{psi,j} is the spin weight.
    const std::vector<StateEntry> psi = normalized({{{0}, 0, 1.0}, {{2}, 1, cplx(0.0, 2.0)}});
    const WalkSpec dg = diagonal(1.0, 1.0, 1, 2);
    CHECK(std::abs(c_psi_j(dg, psi, 0).value - 0.2) < 1e-12);
    CHECK(std::abs(c_psi_j(dg, psi, 1).value - 0.8) < 1e-12);
    // Hadamard qubit: the quadrature converges and the two constants add up to 1.
    const std::vector<StateEntry> q = {{{0}, 0, 1.0}};
    const QuadratureValue c1 = c_psi_j(hadamard(), q, 0), c2 = c_psi_j(hadamard(), q, 1);
    const QuadratureValue fine = c_psi_j(hadamard(), q, 0, 4096);
    CHECK(std::abs(c1.value - fine.value) < 1e-6);
    CHECK(std::abs(c1.value + c2.value - 1.0) < 1e-8);
}

TEST_CASE("property: weak-limit constants sum to one") {
    std::mt19937_64 rng(4);
    for (const WalkSpec& w : {hadamard(), grover(), split_step(0.6, 0.8, 1, 2), shift_pair()}) {
        const auto psi = random_state(rng, w.nu(), 3, 4);
        double acc = 0.0;
        for (int j = 0; j < w.nu(); ++j) acc += c_psi_j(w, psi, j).value;
        CHECK(std::abs(acc - 1.0) < 1e-8);
    }
}

TEST_CASE("subset averages") {
    const auto one = subset_averages(constant_observable(9, 1, 1.0), 9, 3, 3);
    for (const cplx& v : one) CHECK(std::abs(v - 1.0) < 1e-15);
    const auto ev = subset_averages(parity_indicator(10, 1, 0), 10, 2, 2);
    CHECK(std::abs(ev[0] - 1.0) < 1e-15);
    CHECK(std::abs(ev[1]) < 1e-15);
    try {
        subset_averages(parity_indicator(10, 1, 0), 10, 3, 2);
        FAIL("expected ModulusMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ModulusMismatch);
    }
    // Riemann sums of a continuous profile converge to its integral on each class.
    const Observable f = Observable::sampled({{{0}, 0.5}, {{1}, 0.25}, {{-1}, 0.25}});  // (1 + cos 2 pi x) / 2
    double prev = 1.0;
    for (int n : {10, 40, 160}) {
        const int N = 2 * n + 1;
        const auto a = subset_averages(f, N, 2, 1);
        const double err = std::max(std::abs(a[0] - 0.5), std::abs(a[1] - 0.5));
        CHECK(err <= prev);
        prev = err;
    }
    CHECK(prev < 0.01);
}

TEST_CASE("subset coefficients of the diag(S_1, S_-2) walk") {
    const WalkSpec w = shift_pair();
    const auto rel = detect_phase_relations(w);
    const auto a = subset_coefficients(w, {{{0}, 1, 1.0}}, 2, 2, rel);
    CHECK(std::abs(a.c[0] - 1.0) < 1e-8);
    CHECK(std::abs(a.c[1]) < 1e-8);
    const auto b = subset_coefficients(w, {{{0}, 0, 1.0}}, 2, 2, rel);
    CHECK(std::abs(b.c[0] - 0.5) < 1e-8);
    CHECK(std::abs(b.c[1] - 0.5) < 1e-8);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 3; ++t) {
        const auto psi = random_state(rng, 2, 4, 5);
        const auto c = subset_coefficients(w, psi, 2, 2, rel).c;
        for (long long u = 0; u < 2; ++u) {
            cplx closed = 0.5;
            for (const auto& e : psi)
                if (e.spin == 1) closed += 0.5 * std::norm(e.amp) * std::polar(1.0, kPi * static_cast<double>(e.pos[0] - u));
            CHECK(std::abs(c[u] - closed) < 1e-8);
        }
    }
}

TEST_CASE("property: subset coefficients") {
    std::mt19937_64 rng(6);
    for (const WalkSpec& w : {shift_pair(), antidiagonal(1.0, 1.0, 1, 3), antidiagonal(1.0, 1.0, 2, 5), antidiagonal(1.0, kI, 1, 5)}) {
        const auto rel = detect_phase_relations(w);
        const long long M = compute_M(rel);
        REQUIRE(M > 1);
        const auto psi = random_state(rng, 2, 3, 4);
        for (long long k = 1; k <= M; ++k) {
            const auto c = subset_coefficients(w, psi, k, M, rel).c;
            cplx sum{};
            for (const cplx& v : c) {
                sum += v;
                CHECK(std::abs(v.imag()) < 1e-8);
                CHECK(v.real() >= -1e-8);
            }
            CHECK(std::abs(sum - 1.0) < 1e-8);
            const long long g = gcd_ll(M, k);
            for (long long u = 0; u + g < M; ++u) CHECK(std::abs(c[u] - c[u + g]) < 1e-8);
            if (g == 1)
                for (const cplx& v : c) CHECK(std::abs(v - 1.0 / static_cast<double>(M)) < 1e-8);
        }
    }
}

TEST_CASE("property: semiclassical consistency along N = nM + k") {
    std::mt19937_64 rng(7);
    const WalkSpec w = antidiagonal(1.0, 1.0, 1, 3);
    const auto rel = detect_phase_relations(w);
    const long long M = compute_M(rel);
    REQUIRE(M == 2);
    const auto psi = random_state(rng, 2, 2, 3);
    for (long long k = 1; k <= M; ++k) {
        const auto c = subset_coefficients(w, psi, k, M, rel).c;
        std::vector<double> err;
        for (long long n : {20, 40, 80}) {
            const int N = static_cast<int>(n * M + k);
            // phi is a fixed profile sampled on the box, so its class averages are Riemann sums.
            std::vector<cplx> v(N);
            for (int x = 0; x < N; ++x) v[x] = (x % 2 == 0 ? 0.7 : -0.4) * std::cos(kTwoPi * x / N);
            const Observable phi = Observable::bounded(N, v);
            const MeasurePair m = limit_measure(w, make_box_state(N, 1, 2, psi));
            const auto avg = subset_averages(phi, N, M, k);
            cplx pred{};
            for (long long u = 0; u < M; ++u) pred += c[u] * avg[u];
            err.push_back(std::abs(integrate(m.total, v) - pred));
        }
        CHECK(err[1] <= err[0] + 1e-12);
        CHECK(err[2] <= err[1] + 1e-12);
    }
}

TEST_CASE("reachable sites of the anti-diagonal walk") {
    const WalkSpec w = antidiagonal(1.0, 1.0, 2, 5);
    const auto P = reachable_sites(w, 30, {{{0}, 0, 1.0}});
    for (int x = 0; x < 30; ++x) CHECK(static_cast<bool>(P[x]) == (x % 3 != 1));
}
