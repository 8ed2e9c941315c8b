#include "hp2ifs/codevec.hpp"

#include <bit>

namespace hp2ifs {

CodeVector vectorize(const FractalCode& code) {
    CodeVector v;
    v.config_fingerprint = config_fingerprint(code.config);
    v.symbols.reserve(code.entries.size() * kSymbolsPerBlock);
    for (const auto& e : code.entries) {
        v.symbols.push_back(e.domain_index);
        v.symbols.push_back(static_cast<std::uint32_t>(e.isometry));
        v.symbols.push_back(e.s_q);
        v.symbols.push_back(e.o_q);
    }
    return v;
}

void require_comparable(const CodeVector& a, const CodeVector& b) {
    if (a.size() != b.size())
        throw IncomparableCodes("code vectors differ in length (" + std::to_string(a.size()) + " vs " +
                                std::to_string(b.size()) + ")");
    if (a.config_fingerprint != b.config_fingerprint)
        throw IncomparableCodes("code vectors were produced with different encoder settings");
}

std::size_t hamming(const CodeVector& a, const CodeVector& b, HammingMode mode) {
    require_comparable(a, b);
    std::size_t d = 0;
    if (mode == HammingMode::Symbol) {
        for (std::size_t i = 0; i < a.size(); ++i) d += a.symbols[i] != b.symbols[i];
    } else {
        for (std::size_t i = 0; i < a.size(); ++i)
            d += static_cast<std::size_t>(std::popcount(a.symbols[i] ^ b.symbols[i]));
    }
    return d;
}

}  // namespace hp2ifs
