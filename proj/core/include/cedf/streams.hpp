#pragma once

#include <cstdint>

namespace cedf::streams {

// Registry of stream ids for derive_seed(root, stream, counter). Every
// consumer of randomness owns one id here, so no two modules can collide on
// the same derived stream for the same root seed.
inline constexpr std::uint64_t kBatch = 1;
inline constexpr std::uint64_t kLocalConditions = 2;
inline constexpr std::uint64_t kCompoundPoisson = 3;
inline constexpr std::uint64_t kCoupling = 4;
inline constexpr std::uint64_t kOscillation = 5;
inline constexpr std::uint64_t kLdp = 6;
inline constexpr std::uint64_t kClusteringOuter = 7;
inline constexpr std::uint64_t kClusteringInner = 8;
inline constexpr std::uint64_t kNwContrast = 9;
inline constexpr std::uint64_t kDistanceProbe = 10;
inline constexpr std::uint64_t kAcceptance = 11;
inline constexpr std::uint64_t kWindowed = 12;
inline constexpr std::uint64_t kBlockDiscrepancy = 13;

}  // namespace cedf::streams
