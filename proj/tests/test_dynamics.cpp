#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "walklab/walklab.hpp"

using namespace walklab;

namespace {

const double s2 = 1.0 / std::sqrt(2.0);

std::vector<StateEntry> random_state(std::mt19937_64& rng, int d, int nu, int radius, int count) {
    std::uniform_int_distribution<int> pos(-radius, radius), spin(0, nu - 1);
    std::normal_distribution<double> z;
    std::vector<StateEntry> e;
    while (static_cast<int>(e.size()) < count) {
        LatticeVector p(d);
        for (int& x : p) x = pos(rng);
        const int j = spin(rng);
        // Repeated (site, spin) pairs would add up and change the norm.
        if (std::any_of(e.begin(), e.end(), [&](const StateEntry& o) { return o.pos == p && o.spin == j; })) continue;
        e.push_back({p, j, cplx{z(rng), z(rng)}});
    }
    return normalized(e);
}

double max_amp_diff(const BoxState& a, const BoxState& b) {
    double m = 0.0;
    for (size_t x = 0; x < a.amp.size(); ++x) m = std::max(m, std::abs(a.amp[x] - b.amp[x]));
    return m;
}

std::vector<WalkSpec> walks() {
    return {hadamard(), grover(), shift_pair(), split_step(0.6, 0.8, 1, 2), antidiagonal(1.0, kI, 1, 3),
            fourier2d(), tensor(hadamard(), hadamard()), dfmb(coin2(s2, s2, s2, -s2))};
}

}  // namespace

TEST_CASE("DFT of point masses and constants") {
    const int N = 6;
    BoxState s = make_box_state(N, 2, 2, {{{0, 0}, 1, 1.0}});
    const MomentumState m = dft_forward(s);
    for (long long r = 0; r < m.sites(); ++r) {
        CHECK(std::abs(m.at(r, 1) - 1.0 / N) < 1e-14);
        CHECK(std::abs(m.at(r, 0)) < 1e-14);
    }
    BoxState c(N, 1, 1);
    for (auto& z : c.amp) z = 1.0 / std::sqrt(static_cast<double>(N));
    const MomentumState mc = dft_forward(c);
    CHECK(std::abs(mc.at(0, 0) - 1.0) < 1e-14);
    for (long long r = 1; r < N; ++r) CHECK(std::abs(mc.at(r, 0)) < 1e-14);
}

TEST_CASE("property: DFT round trip and agreement with the direct transform") {
    std::mt19937_64 rng(3);
    for (int d = 1; d <= 3; ++d)
        for (int N : {1, 5, 8}) {
            const auto psi = random_state(rng, d, 3, 4, 6);
            const BoxState s = make_box_state(N, d, 3, psi);
            const MomentumState m = dft_forward(s);
            CHECK(max_amp_diff(dft_inverse(m), s) < 1e-10);
            const auto direct = dft_direct(N, d, 3, s.amp, -1);
            double e = 0.0;
            for (size_t x = 0; x < direct.size(); ++x) e = std::max(e, std::abs(direct[x] - m.amp[x]));
            CHECK(e < 1e-12);
        }
}

TEST_CASE("one Hadamard step with wraparound") {
    const int N = 5;
    const BoxState s = evolve(hadamard(), make_box_state(N, 1, 2, {{{0}, 0, 1.0}}), 1);
    BoxState want(N, 1, 2);
    want.at(N - 1, 0) = s2;
    want.at(1, 1) = s2;
    CHECK(max_amp_diff(s, want) < 1e-14);
}

TEST_CASE("diagonal walk returns after N steps") {
    std::mt19937_64 rng(4);
    const cplx a = std::polar(1.0, 0.7), d = std::polar(1.0, -0.2);
    const WalkSpec w = diagonal(a, d, 1, 1);
    for (int N : {4, 7}) {
        const BoxState s = make_box_state(N, 1, 2, random_state(rng, 1, 2, 3, 4));
        // Each spin travels once around the box and picks up its coin phase N times.
        BoxState want = s;
        for (long long x = 0; x < N; ++x) {
            want.at(x, 0) *= std::pow(a, N);
            want.at(x, 1) *= std::pow(d, N);
        }
        CHECK(max_amp_diff(evolve(w, s, N), want) < 1e-12);
        CHECK(max_amp_diff(evolve(diagonal(1.0, 1.0, 1, 1), s, N), s) < 1e-12);
    }
}

TEST_CASE("position-space steps") {
    const WalkSpec shift = build_walk(1, 1, {{0, 0, {1}, 1.0}});
    const BoxState s = evolve_direct(shift, make_box_state(8, 1, 1, {{{0}, 0, 1.0}}), 3);
    CHECK(std::abs(s.at(3, 0) - 1.0) < 1e-15);
    const cplx c = kI;
    const BoxState a = evolve_direct(antidiagonal(1.0, c, 2, 3), make_box_state(10, 1, 2, {{{0}, 0, 1.0}}), 1);
    CHECK(std::abs(a.at(3, 1) - c) < 1e-15);
    CHECK(std::abs(a.norm2() - 1.0) < 1e-15);
}

TEST_CASE("property: evolve agrees with evolve_direct and is a semigroup") {
    std::mt19937_64 rng(5);
    const auto ws = walks();
    std::uniform_int_distribution<size_t> pick(0, ws.size() - 1);
    for (int c = 0; c < 60; ++c) {
        const WalkSpec& w = ws[pick(rng)];
        const int N = std::uniform_int_distribution<int>(2, w.d() == 1 ? 64 : 9)(rng);
        const long long j = std::uniform_int_distribution<long long>(0, 50)(rng);
        const long long k = std::uniform_int_distribution<long long>(0, 50)(rng);
        const BoxState s = make_box_state(N, w.d(), w.nu(), random_state(rng, w.d(), w.nu(), 4, 3));
        CHECK(max_amp_diff(evolve(w, s, k), evolve_direct(w, s, k)) < 1e-10);
        CHECK(max_amp_diff(evolve(w, evolve(w, s, j), k), evolve(w, s, j + k)) < 1e-10);
    }
}

TEST_CASE("property: evolution preserves the norm up to 10^4 steps") {
    std::mt19937_64 rng(6);
    for (const WalkSpec& w : walks()) {
        const int N = w.d() == 1 ? 33 : 7;
        const BoxState s = make_box_state(N, w.d(), w.nu(), random_state(rng, w.d(), w.nu(), 3, 4));
        for (long long k : {1LL, 137LL, 10000LL}) CHECK(std::abs(evolve(w, s, k).norm2() - 1.0) < 1e-10);
    }
}

TEST_CASE("time averages") {
    std::mt19937_64 rng(7);
    const auto psi = random_state(rng, 1, 2, 3, 4);
    const BoxState s = make_box_state(12, 1, 2, psi);
    const MeasurePair one = time_avg_measure(hadamard(), s, 1);
    for (long long x = 0; x < 12; ++x)
        CHECK(std::abs(one.total.weights[x] - (std::norm(s.at(x, 0)) + std::norm(s.at(x, 1)))) < 1e-15);
    // Anti-diagonal with equal steps alternates between 0 and beta.
    const MeasurePair ad = time_avg_measure(antidiagonal(1.0, 1.0, 3, 3), make_box_state(16, 1, 2, {{{0}, 0, 1.0}}), 10);
    CHECK(std::abs(ad.total.weights[0] - 0.5) < 1e-14);
    CHECK(std::abs(ad.total.weights[3] - 0.5) < 1e-14);
}

TEST_CASE("property: per-spin measures add up to the total") {
    std::mt19937_64 rng(8);
    for (const WalkSpec& w : walks()) {
        const int N = w.d() == 1 ? 17 : 5;
        const BoxState s = make_box_state(N, w.d(), w.nu(), random_state(rng, w.d(), w.nu(), 2, 3));
        for (const MeasurePair& m : {time_avg_measure(w, s, 50), limit_measure(w, s)}) {
            for (size_t x = 0; x < m.total.weights.size(); ++x) {
                double acc = 0.0;
                for (const auto& ps : m.per_spin) acc += ps.weights[x];
                CHECK(acc == m.total.weights[x]);
            }
            CHECK(std::abs(m.total.mass() - 1.0) < 1e-10);
        }
    }
}

TEST_CASE("property: Cesaro averages approach the limit measure") {
    std::mt19937_64 rng(9);
    for (const WalkSpec& w : {hadamard(), split_step(0.6, 0.8, 1, 2), grover()}) {
        const BoxState s = make_box_state(9, 1, w.nu(), random_state(rng, 1, w.nu(), 2, 3));
        const MeasurePair lim = limit_measure(w, s);
        std::vector<double> tv;
        for (long long T : {100LL, 1000LL, 10000LL}) tv.push_back(tv_distance(time_avg_measure(w, s, T).total, lim.total));
        CHECK(tv[1] < tv[0]);
        CHECK(tv[2] < tv[1]);
    }
}

TEST_CASE("limit measures") {
    // Anti-diagonal with odd steps differing by 2 on even boxes is exactly uniform.
    for (int N : {8, 20}) {
        const MeasurePair m = limit_measure(antidiagonal(1.0, 1.0, 1, 3), make_box_state(N, 1, 2, {{{0}, 0, 1.0}}));
        CHECK(tv_distance(m.total, uniform_measure(N, 1)) < 1e-12);
    }
    // Grover site-0 excess approaches 2(5 - 2 sqrt 6) from below.
    const double target = 2.0 * (5.0 - 2.0 * std::sqrt(6.0));
    double prev = 0.0;
    for (int N : {30, 60, 120}) {
        const MeasurePair m = limit_measure(grover(), make_box_state(N, 1, 3, {{{0}, 0, 1.0}}));
        const double ex = m.total.weights[0] - 1.0 / N;
        CHECK(ex > prev);
        CHECK(ex < target);
        prev = ex;
    }
    CHECK(std::abs(prev - target) / target < 0.02);
    // The flat-band part at site 0 is N-independent.
    for (int N : {30, 61}) {
        const auto f = eigenvalue_component(grover(), make_box_state(N, 1, 3, {{{0}, 0, 1.0}}), 1.0);
        CHECK(std::abs(f.weights[0] - target) < 1e-12);
    }
}

TEST_CASE("property: flat-band eigenstates are stationary") {
    // Build a flat-band eigenstate by projecting a compact state onto eigenvalue 1 of Grover.
    const int N = 12;
    const WalkSpec w = grover();
    const BoxState s = make_box_state(N, 1, 3, {{{0}, 0, 1.0}, {{1}, 2, 0.5}});
    MomentumState m = dft_forward(s);
    MomentumState p(N, 1, 3);
    for (long long r = 0; r < N; ++r) {
        const FloquetEigen fe = eigensystem(floquet_matrix(w, node_theta(r, N, 1)));
        for (size_t g = 0; g < fe.values.size(); ++g)
            if (std::abs(fe.values[g] - 1.0) < 1e-9) {
                const auto v = fe.projections[g].apply({m.at(r, 0), m.at(r, 1), m.at(r, 2)});
                for (int a = 0; a < 3; ++a) p.at(r, a) = v[a];
            }
    }
    BoxState e = dft_inverse(p);
    const double n = std::sqrt(e.norm2());
    for (auto& z : e.amp) z /= n;
    CHECK(max_amp_diff(evolve(w, e, 1), e) < 1e-12);
    const MeasurePair t10 = time_avg_measure(w, e, 10), t100 = time_avg_measure(w, e, 100);
    for (long long x = 0; x < N; ++x) CHECK(std::abs(t10.total.weights[x] - t100.total.weights[x]) < 1e-12);
}

TEST_CASE("fqe limit") {
    const int N = 10;
    const BoxState s = make_box_state(N, 1, 2, {{{0}, 0, 1.0}});
    const SpinObservable ones(2, std::vector<cplx>(N, 1.0));
    CHECK(std::abs(fqe_limit(hadamard(), s, ones) - 1.0) < 1e-12);
    // a = (1_odd, 1_even) vanishes along the anti-diagonal orbit.
    SpinObservable a(2, std::vector<cplx>(N));
    for (int x = 0; x < N; ++x) {
        a[0][x] = x % 2 == 1 ? 1.0 : 0.0;
        a[1][x] = x % 2 == 0 ? 1.0 : 0.0;
    }
    const cplx v = fqe_limit(antidiagonal(1.0, 1.0, 1, 3), s, a);
    CHECK(std::abs(v) < 1e-12);
}

TEST_CASE("escape norms") {
    // Flat-band eigenvector of the anti-diagonal walk with alpha = beta = 1: (delta_0 e1 + delta_1 e2)/sqrt 2.
    const std::vector<StateEntry> psi = {{{0}, 0, s2}, {{1}, 1, s2}};
    const auto n = rage_escape(antidiagonal(1.0, 1.0, 1, 1), psi, {{0}, {1}}, 50);
    for (double x : n) CHECK(std::abs(x - 1.0) < 1e-14);
    std::vector<LatticeVector> win;
    for (int x = -5; x <= 5; ++x) win.push_back({x});
    const auto h = rage_escape(hadamard(), {{{0}, 0, 1.0}}, win, 300);
    CHECK(h[0] == doctest::Approx(1.0));
    CHECK(h[300] < h[100]);
    CHECK(h[100] < h[20]);
    try {
        rage_escape(fourier2d(), {{{0, 0}, 0, 1.0}}, {{0, 0}}, 5000);
        FAIL("expected BudgetExceeded");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::BudgetExceeded);
    }
}
