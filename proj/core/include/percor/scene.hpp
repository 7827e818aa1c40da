// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "percor/analysis.hpp"
#include "percor/geometry.hpp"
#include "percor/image.hpp"
#include "percor/raster.hpp"
#include "percor/texmap.hpp"
#include "percor/vec.hpp"

namespace percor::scene {

struct VertexSpec {
    geom::WorldPoint pos;
    tex::Uv uv;
    Vec3 color{1, 1, 1};
    Vec3 normal{0, 0, 1};
};

// A textured world primitive; quads carry four vertices, triangles three.
struct PrimSpec {
    bool quad = false;
    std::vector<VertexSpec> verts;
};

enum class XIntMode { Center, Auto, Fixed };
enum class Filter { Nearest, Aniso };

struct MethodSpec {
    double du = tex::kDefaultDu;
    XIntMode x_int_mode = XIntMode::Center;
    double x_int = 0.5;  // used when x_int_mode == Fixed
    double eps = 1e-3;
    double dt0 = 0;
    int aniso_n = 4;
};

// Plain-text scene description; the grammar is documented in
// docs/config-format.md. Serialization is lossless: parsing the serialized
// form reproduces the configuration exactly.
struct SceneConfig {
    int width = 256, height = 256;
    geom::Frustum frustum;
    geom::Viewport viewport = geom::Viewport::window(0, 256, 0, 256);
    std::string texture;
    Filter filter = Filter::Nearest;
    MethodSpec method;
    std::vector<PrimSpec> prims;
};

// Reads and validates a configuration file. The texture path is resolved
// relative to the file's directory and must exist. Parse failures carry
// file and line diagnostics.
SceneConfig parse_config(const std::string& path);

// Parses configuration text; no file-system checks. origin names the source
// in diagnostics.
SceneConfig parse_config_text(const std::string& text, const std::string& origin);

std::string serialize_config(const SceneConfig& c);

// A projected primitive: screen coverage, the texture map, and the color
// numerators sharing the map's denominator.
struct MappedPrim {
    std::string id;
    tex::ProjectiveTexMap map;
    Vec3 shade_x, shade_y, shade_0;
    std::vector<raster::Span> spans;  // clipped to the image rectangle
};

std::vector<MappedPrim> project_scene(const SceneConfig& c);

// Per-primitive comparison scenes for the analysis harness.
std::vector<analysis::UvScene> uv_scenes(const SceneConfig& c);

analysis::MethodParams method_params(const MethodSpec& m);

// Texture pairs a method produces across one span, in pixel order. Exposed
// for rendering and image-level tests; uninstrumented.
std::vector<tex::Uv> span_uv(const MappedPrim& prim, analysis::UvMethod method,
                             const MethodSpec& spec, const raster::Span& span);

// Rasterizes every primitive with the chosen texture-coordinate method,
// modulates nearest-texel (or footprint-averaged) color by the
// perspective-correct vertex color, later primitives painting over earlier.
Image render_with_texture(const SceneConfig& c, analysis::UvMethod method,
                          const Image& texture);

// Loads the configured texture, then renders. Throws MissingTexture when the
// configuration names no texture or the file cannot be read.
Image render(const SceneConfig& c, analysis::UvMethod method);

}  // namespace percor::scene
