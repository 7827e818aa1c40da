// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#include "percor/image.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include "percor/error.hpp"

namespace percor {

std::array<std::uint8_t, 3> Image::texel_clamped(int x, int y) const {
    const int cx = std::clamp(x, 0, width - 1);
    const int cy = std::clamp(y, 0, height - 1);
    const std::uint8_t* p = at(cx, cy);
    return {p[0], p[1], p[2]};
}

namespace {

// Reads one whitespace-delimited header token, skipping '#' comment lines.
std::string header_token(std::istream& in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (std::isspace(c)) {
            c = in.get();
        } else {
            break;
        }
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok;
}

int header_int(std::istream& in, const char* what) {
    const std::string tok = header_token(in);
    if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
        fail(Err::TruncatedData, std::string("bad or missing ") + what);
    return std::stoi(tok);
}

}  // namespace

Image read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) fail(Err::TruncatedData, "cannot open " + path);
    const std::string magic = header_token(in);
    if (magic != "P6") fail(Err::BadMagic, "expected binary P6, got '" + magic + "' in " + path);
    const int w = header_int(in, "width");
    const int h = header_int(in, "height");
    const int maxval = header_int(in, "maxval");
    if (maxval != 255) fail(Err::BadMagic, "only maxval 255 is supported");
    // The header ends with exactly one whitespace byte, already consumed by
    // header_int's delimiter read.
    Image img(w, h);
    in.read(reinterpret_cast<char*>(img.rgb.data()),
            static_cast<std::streamsize>(img.rgb.size()));
    if (in.gcount() != static_cast<std::streamsize>(img.rgb.size()))
        fail(Err::TruncatedData, "pixel payload shorter than width*height*3 in " + path);
    return img;
}

void write_ppm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail(Err::TruncatedData, "cannot open " + path + " for writing");
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.rgb.data()),
              static_cast<std::streamsize>(img.rgb.size()));
    if (!out) fail(Err::TruncatedData, "short write to " + path);
}

}  // namespace percor
