#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gridcomm/random.hpp"
#include "gridcomm/world.hpp"

namespace gridcomm {

/// Row-major RGB image, three channels per pixel, each in [0,1].
struct Frame {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    Frame() = default;
    Frame(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h * 3, 0.0) {}

    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                static_cast<std::size_t>(x)) * 3;
    }
    friend bool operator==(const Frame&, const Frame&) = default;
};

inline constexpr int kMinCellPx = 8;

/// Deterministic raster of the grid; every cell is drawn strictly inside its
/// own cell_px x cell_px rectangle. Throws ContractError for cell_px < 8.
Frame render_grid(const GridState& state, int cell_px);

inline constexpr double kLightsOutMin = 0.05;
inline constexpr double kLightsOutMax = 0.35;

/// 1.0 when inactive, otherwise uniform in [0.05, 0.35].
double sample_illumination(bool lights_out_active, Rng& rng);

/// Multiplies every channel by factor and clamps to [0,1]. Throws
/// ContractError for factors outside [0,1].
Frame apply_lights_out(const Frame& frame, double factor);

/// Binary PPM: "P6 <w> <h> 255\n" followed by 8-bit RGB, row-major.
std::string encode_ppm(const Frame& frame);
void write_ppm(const Frame& frame, const std::string& path);

struct Rgb8Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bytes;
};

/// Parses the subset of P6 produced by encode_ppm.
Rgb8Image decode_ppm(const std::string& data);

/// Quantised RGB bytes as lowercase base-16 text.
std::string frame_hex(const Frame& frame);

}  // namespace gridcomm
