#include <cstring>
#include <random>
#include <vector>

#include "doctest.h"
#include "segwave/simd/kernels.hpp"

using namespace segwave::simd;

namespace {

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
    return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n, double lo, double hi) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(gen);
    return v;
}

}  // namespace

TEST_CASE("dispatch: scalar table is always available") {
    CHECK(isa_available(Isa::Scalar));
    CHECK(kernels_for(Isa::Scalar).isa == Isa::Scalar);
    CHECK(kernels_for(Isa::Avx2).isa == (isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar));
    MESSAGE("active kernels: " << to_string(kernels().isa));
}

TEST_CASE("wave_residual: vector variant matches scalar bit for bit") {
    const KernelTable& vec = kernels_for(Isa::Avx2);
    std::mt19937_64 gen(11);
    for (std::size_t n : {3u, 4u, 5u, 6u, 7u, 9u, 10u, 17u, 64u, 1001u}) {
        const auto u = random_vector(gen, n, 0.0, 1.0);
        const auto v = random_vector(gen, n, 0.0, 1.0);
        const auto p = random_vector(gen, n - 2, 1.0, 1e4);
        const auto q = random_vector(gen, n - 2, 1.0, 100.0);
        const auto w = random_vector(gen, n - 2, -10.0, 10.0);
        const WaveCoefficients cf{-0.37, 1234.5, 1.3, 0.8, 4.0};
        std::vector<double> ru_s(n - 2), rv_s(n - 2), ru_v(n - 2), rv_v(n - 2);
        scalar::wave_residual(u.data(), v.data(), n, {p.data(), q.data(), w.data()}, cf, ru_s.data(),
                              rv_s.data());
        vec.wave_residual(u.data(), v.data(), n, {p.data(), q.data(), w.data()}, cf, ru_v.data(),
                          rv_v.data());
        CAPTURE(n);
        CHECK(same_bits(ru_s, ru_v));
        CHECK(same_bits(rv_s, rv_v));
    }
}

TEST_CASE("reaction: vector variant matches scalar bit for bit") {
    const KernelTable& vec = kernels_for(Isa::Avx2);
    std::mt19937_64 gen(12);
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 8u, 13u, 4001u}) {
        auto us = random_vector(gen, n, 0.0, 1.0);
        auto vs = random_vector(gen, n, 0.0, 1.0);
        auto uv = us;
        auto vv = vs;
        scalar::reaction(us.data(), vs.data(), n, 0.02, 3, 50.0, 1.7, 0.6);
        vec.reaction(uv.data(), vv.data(), n, 0.02, 3, 50.0, 1.7, 0.6);
        CAPTURE(n);
        CHECK(same_bits(us, uv));
        CHECK(same_bits(vs, vv));
    }
}

TEST_CASE("max_product: vector variant matches scalar") {
    const KernelTable& vec = kernels_for(Isa::Avx2);
    std::mt19937_64 gen(13);
    for (std::size_t n : {0u, 1u, 2u, 3u, 4u, 5u, 7u, 8u, 9u, 100u, 9383u}) {
        const auto u = random_vector(gen, n, 0.0, 1.0);
        const auto v = random_vector(gen, n, 0.0, 1.0);
        const double a = scalar::max_product(u.data(), v.data(), n);
        const double b = vec.max_product(u.data(), v.data(), n);
        CAPTURE(n);
        CHECK(std::memcmp(&a, &b, sizeof a) == 0);
    }
    const std::vector<double> u{0.1, 0.9, 0.5, 0.5, 0.2};
    const std::vector<double> v{0.9, 0.5, 0.5, 0.1, 0.2};
    CHECK(scalar::max_product(u.data(), v.data(), 5) == 0.45);
    CHECK(vec.max_product(u.data(), v.data(), 5) == 0.45);
}
