#include "gridcomm/render.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

#include "gridcomm/error.hpp"
#include "gridcomm/kernels.hpp"

namespace gridcomm {

namespace {

using Rgb = std::array<double, 3>;

constexpr Rgb kBackground{0.94, 0.94, 0.94};
constexpr Rgb kGridLine{0.72, 0.72, 0.72};
constexpr Rgb kBlocked{0.16, 0.16, 0.18};
constexpr Rgb kAgent{0.30, 0.08, 0.42};

constexpr Rgb color_rgb(Color c) {
    switch (c) {
        case Color::kRed: return {0.86, 0.16, 0.16};
        case Color::kBlue: return {0.16, 0.36, 0.86};
        case Color::kYellow: return {0.95, 0.82, 0.12};
        case Color::kGreen: return {0.18, 0.70, 0.26};
    }
    return {0.0, 0.0, 0.0};
}

// (u, v) are pixel-centre coordinates relative to the cell centre, scaled so
// the object's bounding square is [-1, 1]^2.
bool inside_shape(Shape s, double u, double v) {
    switch (s) {
        case Shape::kSquare: return std::abs(u) <= 1.0 && std::abs(v) <= 1.0;
        case Shape::kCircle: return u * u + v * v <= 1.0;
        case Shape::kDiamond: return std::abs(u) + std::abs(v) <= 1.0;
        case Shape::kCylinder: {
            auto cap = [u](double v0, double vv) {
                const double a = u / 0.6;
                const double b = (vv - v0) / 0.2;
                return a * a + b * b <= 1.0;
            };
            return (std::abs(u) <= 0.6 && std::abs(v) <= 0.8) || cap(-0.8, v) || cap(0.8, v);
        }
    }
    return false;
}

// Triangle pointing along the heading.
bool inside_agent(Heading h, double u, double v) {
    const Offset d = heading_offset(h);
    const double along = u * d.dcol + v * d.drow;
    const double across = -u * d.drow + v * d.dcol;
    if (along < -0.6 || along > 0.8) return false;
    return std::abs(across) <= 0.6 * (0.8 - along) / 1.4;
}

void put(Frame& f, int x, int y, const Rgb& c) {
    const std::size_t o = f.offset(x, y);
    f.pixels[o] = c[0];
    f.pixels[o + 1] = c[1];
    f.pixels[o + 2] = c[2];
}

void draw_cell(Frame& f, const GridState& state, Position cell, int px) {
    const CellContent& content = state.at(cell);
    const ObjectSpec* obj = std::get_if<ObjectSpec>(&content);
    const bool blocked = is_impassable(content);
    const bool has_agent = state.agent.position == cell;
    const double half = (px - 2) / 2.0;
    const double centre = px / 2.0;
    const double obj_half = obj ? half * obj->size / 4.0 : 1.0;

    for (int ly = 0; ly < px; ++ly) {
        for (int lx = 0; lx < px; ++lx) {
            const int x = cell.col * px + lx;
            const int y = cell.row * px + ly;
            if (blocked) {
                put(f, x, y, kBlocked);
                continue;
            }
            Rgb c = (lx == 0 || ly == 0) ? kGridLine : kBackground;
            const double dx = lx + 0.5 - centre;
            const double dy = ly + 0.5 - centre;
            if (obj && inside_shape(obj->shape, dx / obj_half, dy / obj_half)) {
                c = color_rgb(obj->color);
            }
            if (has_agent && inside_agent(state.agent.heading, dx / half, dy / half)) c = kAgent;
            put(f, x, y, c);
        }
    }
}

}  // namespace

Frame render_grid(const GridState& state, int cell_px) {
    if (cell_px < kMinCellPx) throw ContractError("cell_px must be at least 8");
    Frame f(state.width * cell_px, state.height * cell_px);
    for (int r = 0; r < state.height; ++r) {
        for (int c = 0; c < state.width; ++c) draw_cell(f, state, {c, r}, cell_px);
    }
    return f;
}

double sample_illumination(bool lights_out_active, Rng& rng) {
    if (!lights_out_active) return 1.0;
    return uniform_real(rng, kLightsOutMin, kLightsOutMax);
}

Frame apply_lights_out(const Frame& frame, double factor) {
    if (!(factor >= 0.0 && factor <= 1.0)) {
        throw ContractError("illumination factor must lie in [0,1]");
    }
    Frame out = frame;
    kernels::scale_clamp(out.pixels, factor);
    return out;
}

std::string encode_ppm(const Frame& frame) {
    std::string header = "P6 " + std::to_string(frame.width) + " " +
                         std::to_string(frame.height) + " 255\n";
    std::vector<std::uint8_t> bytes(frame.pixels.size());
    kernels::quantize_u8(frame.pixels, bytes);
    header.append(bytes.begin(), bytes.end());
    return header;
}

void write_ppm(const Frame& frame, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    const std::string data = encode_ppm(frame);
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error("failed writing '" + path + "'");
}

Rgb8Image decode_ppm(const std::string& data) {
    std::istringstream in(data);
    std::string magic;
    int maxval = 0;
    Rgb8Image img;
    in >> magic >> img.width >> img.height >> maxval;
    if (!in || magic != "P6" || maxval != 255 || img.width <= 0 || img.height <= 0) {
        throw Error("not a P6 image with maxval 255");
    }
    in.get();  // single whitespace after the header
    const auto n = static_cast<std::size_t>(img.width) * img.height * 3;
    const auto start = static_cast<std::size_t>(in.tellg());
    if (data.size() - start != n) throw Error("PPM payload size mismatch");
    img.bytes.assign(data.begin() + static_cast<std::ptrdiff_t>(start), data.end());
    return img;
}

std::string frame_hex(const Frame& frame) {
    static constexpr char kDigits[] = "0123456789abcdef";
    std::vector<std::uint8_t> bytes(frame.pixels.size());
    kernels::quantize_u8(frame.pixels, bytes);
    std::string out;
    out.reserve(bytes.size() * 2);
    for (std::uint8_t b : bytes) {
        out.push_back(kDigits[b >> 4]);
        out.push_back(kDigits[b & 0xF]);
    }
    return out;
}

}  // namespace gridcomm
