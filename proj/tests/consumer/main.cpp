#include <cstdio>

#include "pairdeg/spectra.hpp"

int main() {
    const pairdeg::PairingHamiltonian h(pairdeg::ModelSpec::three_level(-0.5));
    const auto s = pairdeg::spectrum_at(h, {0.0, 0.1});
    std::printf("%zu states\n", static_cast<std::size_t>(s.size()));
    return s.size() == 4 ? 0 : 1;
}
