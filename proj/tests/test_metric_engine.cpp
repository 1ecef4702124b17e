#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "polar/codec.hpp"
#include "polar/log_domain.hpp"
#include "polar/metric_engine.hpp"
#include "polar/rng.hpp"

using namespace polar;

namespace {

std::vector<double> random_llr(RngStream& s, size_t N, double spread = 4.0) {
    std::vector<double> llr(N);
    for (auto& v : llr) v = spread * s.next_gaussian();
    return llr;
}

}  // namespace

TEST_CASE("single-channel base case") {
    MetricEngine eng(0);
    const double L = 1.7;
    size_t root = eng.begin_decode({L});
    auto [m0, m1] = eng.extend(root, 0);
    CHECK(m0 == doctest::Approx(log_sigmoid(L)).epsilon(1e-14));
    CHECK(m1 == doctest::Approx(log_sigmoid(-L)).epsilon(1e-14));
    CHECK(eng.metric_recursions() == 0);  // no recursion stages below N=1
    eng.decide(root, 0, 0, m0);
    CHECK(eng.metric(root) == m0);
    CHECK(eng.stage0_bits(root) == BitVec{0});
}

TEST_CASE("noiseless N=2 keeps the true path at probability one") {
    MetricEngine eng(1);
    size_t p = eng.begin_decode({20.0, 20.0});  // x = (0,0) seen nearly clean
    auto [a0, a1] = eng.extend(p, 0);
    CHECK(a0 == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(a1 < -10.0);
    eng.decide(p, 0, 0, a0);
    auto [b0, b1] = eng.extend(p, 1);
    CHECK(b0 == doctest::Approx(0.0).epsilon(1e-8));
    CHECK(b1 < -10.0);
}

TEST_CASE("every path metric equals the brute-force posterior (n <= 3)") {
    RngStream s(101, 0);
    for (int n : {1, 2, 3}) {
        const size_t N = size_t{1} << n;
        MetricEngine eng(n);
        int vecs = n == 3 ? 100 : 40;
        for (int t = 0; t < vecs; ++t) {
            auto llr = random_llr(s, N);
            for (uint64_t w = 0; w < (uint64_t{1} << N); ++w) {
                size_t p = eng.begin_decode(llr);
                BitVec prefix;
                for (size_t i = 0; i < N; ++i) {
                    auto [m0, m1] = eng.extend(p, i);
                    BitVec p0 = prefix, p1 = prefix;
                    p0.push_back(0);
                    p1.push_back(1);
                    double r0 = oracle::prefix_metric(llr, p0);
                    double r1 = oracle::prefix_metric(llr, p1);
                    REQUIRE(m0 == doctest::Approx(r0).epsilon(1e-10));
                    REQUIRE(m1 == doctest::Approx(r1).epsilon(1e-10));
                    uint8_t bit = (w >> i) & 1;
                    prefix.push_back(bit);
                    eng.decide(p, i, bit, bit ? m1 : m0);
                }
                REQUIRE(eng.metric(p) ==
                        doctest::Approx(oracle::prefix_metric(llr, prefix)).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("children conserve the parent mass at every level") {
    RngStream s(102, 0);
    const int n = 10;
    const size_t N = size_t{1} << n;
    MetricEngine eng(n);
    auto llr = random_llr(s, N);
    size_t p = eng.begin_decode(llr);
    double parent = 0.0;  // log 1: the root covers everything
    for (size_t i = 0; i < N; ++i) {
        auto [m0, m1] = eng.extend(p, i);
        double both = log_sum_exp(m0, m1);
        REQUIRE(both ==
                doctest::Approx(parent).epsilon(1e-10).scale(std::max(1.0, std::abs(parent))));
        uint8_t bit = s.next_bit();
        parent = bit ? m1 : m0;
        eng.decide(p, i, bit, parent);
    }
    CHECK(parent < 0.0);  // a genuine log-probability
}

TEST_CASE("recursion count is exactly N log2 N and data-independent") {
    RngStream s(103, 0);
    for (int n : {3, 10}) {
        const size_t N = size_t{1} << n;
        uint64_t counts[2];
        for (int rep = 0; rep < 2; ++rep) {
            MetricEngine eng(n);
            auto llr = random_llr(s, N);
            size_t p = eng.begin_decode(llr);
            for (size_t i = 0; i < N; ++i) {
                auto [m0, m1] = eng.extend(p, i);
                eng.decide(p, i, m0 >= m1 ? 0 : 1, std::max(m0, m1));
            }
            counts[rep] = eng.metric_recursions();
        }
        CHECK(counts[0] == N * uint64_t(n));
        CHECK(counts[1] == counts[0]);
    }
}

TEST_CASE("fork shares planes yet matches a from-scratch walk exactly") {
    RngStream s(104, 0);
    const int n = 4;
    const size_t N = size_t{1} << n;
    auto llr = random_llr(s, N);

    // engine A: fork at bit 0 and walk both branches interleaved
    MetricEngine a(n);
    size_t pa = a.begin_decode(llr);
    auto [m0, m1] = a.extend(pa, 0);
    size_t pb = a.fork(pa);
    CHECK(a.path_copies() == 1);
    CHECK(a.path_id(pb) != a.path_id(pa));
    a.decide(pa, 0, 0, m0);
    a.decide(pb, 0, 1, m1);
    BitVec ua{0}, ub{1};
    std::vector<std::pair<double, double>> pairs_a, pairs_b;
    for (size_t i = 1; i < N; ++i) {
        auto ea = a.extend(pa, i);
        auto eb = a.extend(pb, i);
        pairs_a.push_back(ea);
        pairs_b.push_back(eb);
        uint8_t bit = s.next_bit();
        ua.push_back(bit);
        ub.push_back(1 - bit);
        a.decide(pa, i, bit, bit ? ea.second : ea.first);
        a.decide(pb, i, 1 - bit, (1 - bit) ? eb.second : eb.first);
    }

    // engine B: two independent full walks, no sharing anywhere
    for (int which = 0; which < 2; ++which) {
        const BitVec& u = which ? ub : ua;
        const auto& pairs = which ? pairs_b : pairs_a;
        MetricEngine b(n);
        size_t p = b.begin_decode(llr);
        auto e0 = b.extend(p, 0);
        CHECK(e0.first == m0);
        CHECK(e0.second == m1);
        b.decide(p, 0, u[0], u[0] ? e0.second : e0.first);
        for (size_t i = 1; i < N; ++i) {
            auto e = b.extend(p, i);
            CHECK(e.first == pairs[i - 1].first);    // bit-identical, not approx
            CHECK(e.second == pairs[i - 1].second);
            b.decide(p, i, u[i], u[i] ? e.second : e.first);
        }
        CHECK(b.path_copies() == 0);
    }

    // both forked paths re-encode their own prefixes
    CHECK(a.stage0_bits(pa) == polar_encode(ua));
    CHECK(a.stage0_bits(pb) == polar_encode(ub));
}

TEST_CASE("partial sums re-encode the decided word") {
    RngStream s(105, 0);
    const int n = 4;
    const size_t N = size_t{1} << n;
    MetricEngine eng(n);
    for (int t = 0; t < 20; ++t) {
        auto llr = random_llr(s, N);
        size_t p = eng.begin_decode(llr);
        BitVec u;
        for (size_t i = 0; i < N; ++i) {
            auto [m0, m1] = eng.extend(p, i);
            uint8_t bit = s.next_bit();
            u.push_back(bit);
            eng.decide(p, i, bit, bit ? m1 : m0);
        }
        CHECK(eng.stage0_bits(p) == polar_encode(u));
    }
}

TEST_CASE("released slots recycle without disturbing survivors") {
    RngStream s(106, 0);
    const int n = 3;
    const size_t N = size_t{1} << n;
    MetricEngine eng(n);
    auto llr = random_llr(s, N);
    size_t p = eng.begin_decode(llr);
    auto [m0, m1] = eng.extend(p, 0);
    size_t q = eng.fork(p);
    eng.decide(p, 0, 0, m0);
    eng.decide(q, 0, 1, m1);
    CHECK(eng.live_paths() == 2);
    auto next_q = eng.extend(q, 1);
    eng.release(q);
    CHECK(eng.live_paths() == 1);
    // survivor is untouched by the release and keeps decoding correctly
    auto next_p = eng.extend(p, 1);
    CHECK(log_sum_exp(next_p.first, next_p.second) == doctest::Approx(m0).epsilon(1e-12));
    size_t r = eng.fork(p);  // recycles the freed slot
    CHECK(eng.live_paths() == 2);
    eng.decide(p, 1, 0, next_p.first);
    eng.decide(r, 1, 1, next_p.second);
    (void)next_q;
}
