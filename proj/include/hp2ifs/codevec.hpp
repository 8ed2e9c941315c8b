#pragma once

#include <cstdint>
#include <vector>

#include "hp2ifs/pifs.hpp"

namespace hp2ifs {

/// Flattened fractal code: four symbols per range tile in row-major tile order,
/// (domain_index, isometry id, s_q, o_q).
struct CodeVector {
    std::vector<std::uint32_t> symbols;
    std::uint64_t config_fingerprint = 0;

    std::size_t size() const { return symbols.size(); }
    bool operator==(const CodeVector&) const = default;
};

inline constexpr std::size_t kSymbolsPerBlock = 4;

CodeVector vectorize(const FractalCode& code);

enum class HammingMode {
    Symbol,  ///< count of unequal symbols
    Bit,     ///< count of unequal bits over the 32-bit symbol encoding
};

/// Throws IncomparableCodes on length or fingerprint mismatch.
void require_comparable(const CodeVector& a, const CodeVector& b);

std::size_t hamming(const CodeVector& a, const CodeVector& b, HammingMode mode = HammingMode::Symbol);

}  // namespace hp2ifs
