#pragma once

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "qrbm/rbm_core.hpp"

namespace testing {

using namespace qrbm;

inline BinaryVector bits(std::uint64_t m, std::size_t n)
{
    BinaryVector v(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i)
        v[static_cast<Eigen::Index>(i)] = static_cast<std::uint8_t>((m >> i) & 1U);
    return v;
}

inline RbmParams random_params(std::size_t J, std::size_t K, Rng& rng, double scale = 1.0)
{
    std::uniform_real_distribution<double> d(-scale, scale);
    RbmParams p(J, K);
    for (Eigen::Index i = 0; i < p.W.size(); ++i)
        p.W.data()[i] = d(rng);
    for (Eigen::Index i = 0; i < p.b.size(); ++i)
        p.b[i] = d(rng);
    for (Eigen::Index i = 0; i < p.c.size(); ++i)
        p.c[i] = d(rng);
    return p;
}

inline BinaryMatrix random_binary(Eigen::Index rows, Eigen::Index cols, Rng& rng, double p1 = 0.5)
{
    BinaryMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m.data()[i] = uniform01(rng) < p1 ? 1 : 0;
    return m;
}

// Second, independent enumeration: exp(b'r + c'a + r'Wa) summed over both layers.
inline double brute_log_z(const RbmParams& p)
{
    double z = 0.0;
    for (std::uint64_t i = 0; i < (1ULL << p.J()); ++i)
        for (std::uint64_t j = 0; j < (1ULL << p.K()); ++j) {
            const Vector r = bits(i, p.J()).cast<double>();
            const Vector a = bits(j, p.K()).cast<double>();
            z += std::exp(p.b.dot(r) + p.c.dot(a) + r.dot(p.W * a));
        }
    return std::log(z);
}

// Fresh scratch directory under the system temp dir, removed on scope exit.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag)
    {
        path = std::filesystem::temp_directory_path() /
               ("qrbm_" + tag + "_" + std::to_string(std::random_device{}()));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace testing
