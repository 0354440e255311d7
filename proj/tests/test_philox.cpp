#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "lce/philox.hpp"

using lce::GaussianStream;

TEST(Philox4x32, KnownAnswerVectors) {
    EXPECT_EQ(lce::philox4x32_10({0, 0, 0, 0}, {0, 0}),
              (lce::Philox4x32Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(lce::philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
              (lce::Philox4x32Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(lce::philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
              (lce::Philox4x32Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(GaussianStream, SameSeedAndStreamReproduce) {
    GaussianStream a(42, 7), b(42, 7);
    for (int i = 0; i < 1000; ++i) EXPECT_EQ(a.next_normal(), b.next_normal());
}

TEST(GaussianStream, DistinctStreamsAndSeedsDiffer) {
    GaussianStream a(42, 7), b(42, 8), c(43, 7);
    int same_ab = 0, same_ac = 0;
    for (int i = 0; i < 100; ++i) {
        const double x = a.next_normal(), y = b.next_normal(), z = c.next_normal();
        same_ab += x == y;
        same_ac += x == z;
    }
    EXPECT_EQ(same_ab, 0);
    EXPECT_EQ(same_ac, 0);
}

TEST(GaussianStream, HighStreamBitsAreUsed) {
    GaussianStream a(1, 5), b(1, 5 + (std::uint64_t{1} << 32));
    EXPECT_NE(a.next_u64(), b.next_u64());
}

TEST(GaussianStream, OpenUnitInterval) {
    GaussianStream g(3, 0);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = g.next_open_unit();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    EXPECT_GT(lo, 0.0);
    EXPECT_LT(hi, 1.0);
    EXPECT_NEAR(sum / n, 0.5, 0.005);
}

TEST(GaussianStream, MomentsOfNormals) {
    GaussianStream g(2024, 1);
    const int n = 1000000;
    double m1 = 0, m2 = 0, m3 = 0, m4 = 0;
    for (int i = 0; i < n; ++i) {
        const double x = g.next_normal();
        m1 += x;
        m2 += x * x;
        m3 += x * x * x;
        m4 += x * x * x * x;
    }
    m1 /= n;
    m2 /= n;
    m3 /= n;
    m4 /= n;
    // Standard errors: 1e-3, 1.4e-3, 2.4e-3, 9.8e-3; limits are about 5 sigma.
    EXPECT_NEAR(m1, 0.0, 5e-3);
    EXPECT_NEAR(m2, 1.0, 7e-3);
    EXPECT_NEAR(m3, 0.0, 1.2e-2);
    EXPECT_NEAR(m4, 3.0, 5e-2);
}

TEST(GaussianStream, KolmogorovSmirnovAgainstNormalCdf) {
    GaussianStream g(99, 3);
    const int n = 100000;
    std::vector<double> x(n);
    for (auto& v : x) v = g.next_normal();
    std::sort(x.begin(), x.end());
    double d = 0.0;
    for (int i = 0; i < n; ++i) {
        const double cdf = 0.5 * std::erfc(-x[i] / std::sqrt(2.0));
        d = std::max({d, std::abs(cdf - static_cast<double>(i) / n), std::abs(cdf - static_cast<double>(i + 1) / n)});
    }
    // 0.1% critical value 1.95 / sqrt(n).
    EXPECT_LT(d, 1.95 / std::sqrt(static_cast<double>(n)));
}

TEST(GaussianStream, TailsArePopulated) {
    GaussianStream g(5, 5);
    const int n = 2000000;
    int beyond = 0;
    double max_abs = 0.0;
    for (int i = 0; i < n; ++i) {
        const double x = g.next_normal();
        beyond += std::abs(x) > 3.442619855899;
        max_abs = std::max(max_abs, std::abs(x));
    }
    // P(|X| > r) = 5.76e-4 for the base-strip cut r.
    EXPECT_NEAR(static_cast<double>(beyond) / n, 5.76e-4, 1.2e-4);
    EXPECT_GT(max_abs, 4.5);
}

TEST(GaussianStream, PairComponentsUncorrelated) {
    GaussianStream g(11, 0);
    const int n = 500000;
    double sxy = 0.0;
    for (int i = 0; i < n; ++i) {
        const auto [x, y] = g.next_pair();
        sxy += x * y;
    }
    EXPECT_NEAR(sxy / n, 0.0, 7e-3);
}
