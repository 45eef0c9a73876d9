#pragma once

#include <cstdint>
#include <span>
#include <string_view>

// Pixel kernels behind the renderer. Each kernel has a scalar reference and
// an AVX2 variant; the public entry points pick one at runtime. Both
// variants must produce bit-identical output.

namespace gridcomm::kernels {

enum class Isa : std::uint8_t { kScalar, kAvx2 };

std::string_view to_string(Isa isa);

/// True when the variant is compiled in and the CPU supports it.
bool isa_available(Isa isa);

/// The variant used by the dispatched entry points. Setting the
/// environment variable GRIDCOMM_SIMD=scalar forces the reference path.
Isa active_isa();

namespace scalar {
/// data[i] = clamp(data[i] * factor, 0, 1)
void scale_clamp(std::span<double> data, double factor);
/// out[i] = round_half_even(clamp(in[i], 0, 1) * 255)
void quantize_u8(std::span<const double> in, std::span<std::uint8_t> out);
}  // namespace scalar

namespace avx2 {
void scale_clamp(std::span<double> data, double factor);
void quantize_u8(std::span<const double> in, std::span<std::uint8_t> out);
}  // namespace avx2

void scale_clamp(std::span<double> data, double factor);
void quantize_u8(std::span<const double> in, std::span<std::uint8_t> out);

}  // namespace gridcomm::kernels
