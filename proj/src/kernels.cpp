#include "gridcomm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstring>

#include "gridcomm/error.hpp"

namespace gridcomm::kernels {

std::string_view to_string(Isa isa) { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

bool isa_available(Isa isa) {
    switch (isa) {
        case Isa::kScalar: return true;
        case Isa::kAvx2:
#if defined(GRIDCOMM_HAVE_AVX2) && (defined(__x86_64__) || defined(__i386__))
            return __builtin_cpu_supports("avx2");
#else
            return false;
#endif
    }
    return false;
}

Isa active_isa() {
    static const Isa isa = [] {
        const char* forced = std::getenv("GRIDCOMM_SIMD");
        if (forced != nullptr && std::strcmp(forced, "scalar") == 0) return Isa::kScalar;
        return isa_available(Isa::kAvx2) ? Isa::kAvx2 : Isa::kScalar;
    }();
    return isa;
}

namespace scalar {

void scale_clamp(std::span<double> data, double factor) {
    for (double& v : data) v = std::min(std::max(v * factor, 0.0), 1.0);
}

void quantize_u8(std::span<const double> in, std::span<std::uint8_t> out) {
    if (out.size() < in.size()) throw ContractError("quantize_u8: output too small");
    for (std::size_t i = 0; i < in.size(); ++i) {
        // NaN maps to 0, matching maxpd with the value as first operand.
        const double v = std::isnan(in[i]) ? 0.0 : std::min(std::max(in[i], 0.0), 1.0);
        out[i] = static_cast<std::uint8_t>(std::nearbyint(v * 255.0));
    }
}

}  // namespace scalar

void scale_clamp(std::span<double> data, double factor) {
#ifdef GRIDCOMM_HAVE_AVX2
    if (active_isa() == Isa::kAvx2) return avx2::scale_clamp(data, factor);
#endif
    scalar::scale_clamp(data, factor);
}

void quantize_u8(std::span<const double> in, std::span<std::uint8_t> out) {
#ifdef GRIDCOMM_HAVE_AVX2
    if (active_isa() == Isa::kAvx2) return avx2::quantize_u8(in, out);
#endif
    scalar::quantize_u8(in, out);
}

}  // namespace gridcomm::kernels
