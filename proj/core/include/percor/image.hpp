// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace percor {

// 8-bit RGB raster, exactly width*height*3 bytes, row-major from the top.
struct Image {
    int width = 0, height = 0;
    std::vector<std::uint8_t> rgb;

    Image() = default;
    Image(int w, int h) : width(w), height(h), rgb(static_cast<std::size_t>(w) * h * 3, 0) {}

    std::uint8_t* at(int x, int y) {
        return rgb.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
    const std::uint8_t* at(int x, int y) const {
        return rgb.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }

    // Clamped lookup; out-of-range coordinates stick to the border.
    std::array<std::uint8_t, 3> texel_clamped(int x, int y) const;

    bool operator==(const Image&) const = default;
};

// Binary P6, maxval 255, bit-exact round trip with write_ppm.
Image read_ppm(const std::string& path);
void write_ppm(const Image& img, const std::string& path);

}  // namespace percor
