// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#include "percor/scene.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <string>

#include "percor/analysis.hpp"
#include "percor/error.hpp"
#include "percor/geometry.hpp"
#include "percor/image.hpp"
#include "percor/texmap.hpp"

namespace percor {
namespace {

namespace fs = std::filesystem;

// Quad tilted in both screen axes so the derived map is fully general:
// no coefficient vanishes and the denominator varies along every row.
scene::SceneConfig tilted_quad_config() {
    scene::SceneConfig c;
    c.width = 256;
    c.height = 256;
    c.viewport = geom::Viewport::window(0, 256, 0, 256);
    scene::PrimSpec p;
    p.quad = true;
    p.verts = {
        {{-1.0, -1.0, 2.0}, {0, 0}},
        {{1.0, -0.9, 2.8}, {1, 0}},
        {{0.9, 1.0, 4.2}, {1, 1}},
        {{-1.1, 0.95, 3.6}, {0, 1}},
    };
    c.prims.push_back(p);
    return c;
}

// Quad at constant world depth: projection is affine, so the derived map
// carries a (numerically) constant denominator.
scene::SceneConfig parallel_quad_config() {
    scene::SceneConfig c;
    c.width = 96;
    c.height = 96;
    c.viewport = geom::Viewport::window(0, 96, 0, 96);
    scene::PrimSpec p;
    p.quad = true;
    p.verts = {
        {{-1.2, -0.9, 3.0}, {0, 0}},
        {{0.9, -0.9, 3.0}, {1, 0}},
        {{0.9, 1.1, 3.0}, {1, 1}},
        {{-1.2, 1.1, 3.0}, {0, 1}},
    };
    c.prims.push_back(p);
    return c;
}

Image checker8() {
    Image t(8, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const bool on = ((x ^ y) & 1) != 0;
            std::uint8_t* p = t.at(x, y);
            p[0] = on ? 220 : 30;
            p[1] = on ? 40 : 180;
            p[2] = on ? 90 : 200;
        }
    return t;
}

std::string parse_error(const std::string& text) {
    try {
        scene::parse_config_text(text, "cfg");
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Err::ConfigParse) << e.what();
        return e.what();
    }
    ADD_FAILURE() << "expected a parse failure for:\n" << text;
    return {};
}

TEST(Config, SerializationRoundTripsThroughTheParser) {
    const std::string text =
        "# full-line comment\n"
        "width = 200\n"
        "height = 150   # trailing comment\n"
        "frustum = -2 2 -1.5 1.5 1 50\n"
        "viewport = 0 200 0 150 0 1 0 0 0\n"
        "texture = checker.ppm\n"
        "filter = aniso\n"
        "aniso_n = 3\n"
        "du = 0.0078125\n"
        "x_int = 0.4\n"
        "eps = 0.0005\n"
        "dt0 = 0.001\n"
        "\n"
        "[quad]\n"
        "vertex = -1 -1 2  0 0  1 0.5 0.25  0 0 1\n"
        "vertex = 1 -1 2  1 0  0.5 1 0.25  0 0 1\n"
        "vertex = 1 1 4  1 1  0.25 0.5 1  0 0 1\n"
        "vertex = -1 1 4  0 1  1 1 1  0 0 1\n"
        "\n"
        "[triangle]\n"
        "vertex = -0.5 -0.5 2  0 0\n"
        "vertex = 0.8 -0.3 3  1 0\n"
        "vertex = 0 0.7 5  0 1\n";
    const scene::SceneConfig c = scene::parse_config_text(text, "inline");
    EXPECT_EQ(c.width, 200);
    EXPECT_EQ(c.height, 150);
    EXPECT_EQ(c.texture, "checker.ppm");
    EXPECT_EQ(c.filter, scene::Filter::Aniso);
    EXPECT_EQ(c.method.aniso_n, 3);
    EXPECT_DOUBLE_EQ(c.method.du, 0.0078125);
    EXPECT_EQ(c.method.x_int_mode, scene::XIntMode::Fixed);
    EXPECT_DOUBLE_EQ(c.method.x_int, 0.4);
    ASSERT_EQ(c.prims.size(), 2u);
    EXPECT_TRUE(c.prims[0].quad);
    EXPECT_FALSE(c.prims[1].quad);
    ASSERT_EQ(c.prims[0].verts.size(), 4u);
    ASSERT_EQ(c.prims[1].verts.size(), 3u);
    EXPECT_DOUBLE_EQ(c.prims[0].verts[0].color.y, 0.5);
    EXPECT_DOUBLE_EQ(c.prims[0].verts[2].normal.z, 1.0);
    // Five-number vertices keep the defaults.
    EXPECT_DOUBLE_EQ(c.prims[1].verts[0].color.x, 1.0);
    EXPECT_DOUBLE_EQ(c.prims[1].verts[0].normal.z, 1.0);

    const std::string s1 = scene::serialize_config(c);
    const scene::SceneConfig c2 = scene::parse_config_text(s1, "round");
    EXPECT_EQ(scene::serialize_config(c2), s1);

    // The symbolic anchor modes survive the trip too.
    scene::SceneConfig cc = c;
    cc.method.x_int_mode = scene::XIntMode::Center;
    EXPECT_NE(scene::serialize_config(cc).find("x_int = center\n"), std::string::npos);
    cc.method.x_int_mode = scene::XIntMode::Auto;
    const std::string sa = scene::serialize_config(cc);
    EXPECT_NE(sa.find("x_int = auto\n"), std::string::npos);
    EXPECT_EQ(scene::parse_config_text(sa, "auto").method.x_int_mode, scene::XIntMode::Auto);
}

TEST(Config, DefaultsFillInWhenKeysAreAbsent) {
    const scene::SceneConfig c = scene::parse_config_text("width = 64\nheight = 48\n", "cfg");
    EXPECT_EQ(c.width, 64);
    EXPECT_EQ(c.height, 48);
    EXPECT_TRUE(c.texture.empty());
    EXPECT_EQ(c.filter, scene::Filter::Nearest);
    EXPECT_TRUE(c.prims.empty());
    EXPECT_DOUBLE_EQ(c.method.du, tex::kDefaultDu);
    EXPECT_EQ(c.method.x_int_mode, scene::XIntMode::Center);
    EXPECT_DOUBLE_EQ(c.method.eps, 1e-3);
    EXPECT_DOUBLE_EQ(c.method.dt0, 0.0);
    EXPECT_EQ(c.method.aniso_n, 4);
    // Unset viewport defaults to the full image window.
    EXPECT_DOUBLE_EQ(c.viewport.x_vn, 0.0);
    EXPECT_DOUBLE_EQ(c.viewport.x_vm, 64.0);
    EXPECT_DOUBLE_EQ(c.viewport.y_vn, 0.0);
    EXPECT_DOUBLE_EQ(c.viewport.y_vm, 48.0);
    EXPECT_DOUBLE_EQ(c.viewport.z_vn, 0.0);
    EXPECT_DOUBLE_EQ(c.viewport.z_vm, 1.0);
    EXPECT_DOUBLE_EQ(c.viewport.sm_vx, 0.0);
    EXPECT_DOUBLE_EQ(c.viewport.sm_vy, 0.0);
    // Frustum defaults.
    EXPECT_DOUBLE_EQ(c.frustum.x_n, -1.0);
    EXPECT_DOUBLE_EQ(c.frustum.z_n, 1.0);
    EXPECT_DOUBLE_EQ(c.frustum.z_m, 10.0);
}

TEST(Config, DiagnosticsNameTheSourceAndLine) {
    const auto expect = [&](const std::string& text, const std::string& where,
                            const std::string& what) {
        const std::string msg = parse_error(text);
        EXPECT_NE(msg.find(where), std::string::npos) << msg;
        EXPECT_NE(msg.find(what), std::string::npos) << msg;
    };
    expect("width 64\n", "cfg:1:", "expected 'key = value'");
    expect("width = 64\nblurb = 1\n", "cfg:2:", "unknown key 'blurb'");
    expect("[blob]\n", "cfg:1:", "unknown section '[blob]'");
    expect("width = abc\n", "cfg:1:", "expected a number, got 'abc'");
    expect("width = 0\n", "cfg:1:", "expected an integer in [1,4096]");
    expect("width = 64.5\n", "cfg:1:", "expected an integer in [1,4096]");
    expect("filter = trilinear\n", "cfg:1:", "filter must be 'nearest' or 'aniso'");
    expect("x_int = 1.5\n", "cfg:1:", "fixed x_int must lie strictly inside (0,1)");
    expect("du = 0\n", "cfg:1:", "du must be positive");
    expect("eps = -1\n", "cfg:1:", "eps must be positive");
    expect("dt0 = -0.5\n", "cfg:1:", "dt0 must be non-negative");
    expect("frustum = -1 1 -1 1 5 2\n", "cfg:1:", "frustum extents must be ordered");
    expect("frustum = -1 1 -1 1\n", "cfg:1:", "expected 6 numbers, got 4");
    expect("viewport = 0 10 0 10 0 1 0\n", "cfg:1:", "viewport takes 6 or 9 numbers");
    expect("viewport = 0 0 0 10 0 1\n", "cfg:1:", "viewport extents must be non-zero");
    // Short vertex blocks are reported at the section header's line.
    expect("width = 64\n\n[quad]\nvertex = 0 0 1  0 0\n", "cfg:3:",
           "[quad] needs 4 vertex lines, got 1");
    expect("[triangle]\nvertex = 0 0 1  0 0\ncolor = 1 1 1\n", "cfg:3:",
           "unknown vertex-block key 'color'");
    expect("[triangle]\nvertex = 0 0 1  0 0 0\n", "cfg:2:",
           "vertex takes 5, 8 or 11 numbers");
}

TEST(Config, TexturePathsResolveAgainstTheConfigDirectory) {
    const fs::path dir = fs::path(testing::TempDir()) / "percor_scene_cfg";
    fs::create_directories(dir);
    write_ppm(checker8(), (dir / "t.ppm").string());
    {
        std::ofstream f(dir / "ok.cfg");
        f << "width = 32\nheight = 32\ntexture = t.ppm\n";
    }
    const scene::SceneConfig c = scene::parse_config((dir / "ok.cfg").string());
    EXPECT_EQ(c.texture, (dir / "t.ppm").string());
    EXPECT_TRUE(fs::exists(c.texture));
    // No primitives: rendering yields an all-black frame of the right size.
    EXPECT_EQ(scene::render(c, analysis::UvMethod::Exact), Image(32, 32));

    {
        std::ofstream f(dir / "bad.cfg");
        f << "width = 32\nheight = 32\n\ntexture = nope.ppm\n";
    }
    try {
        scene::parse_config((dir / "bad.cfg").string());
        FAIL() << "expected MissingTexture";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Err::MissingTexture);
        EXPECT_NE(std::string(e.what()).find(":4:"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("not found"), std::string::npos) << e.what();
    }
    try {
        scene::parse_config((dir / "absent.cfg").string());
        FAIL() << "expected ConfigParse";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Err::ConfigParse);
        EXPECT_NE(std::string(e.what()).find("cannot open"), std::string::npos) << e.what();
    }
}

TEST(Project, VertexValuesReappearAtTheProjectedCorners) {
    scene::SceneConfig c = tilted_quad_config();
    scene::PrimSpec t;
    t.quad = false;
    t.verts = {
        {{-0.5, -0.5, 2.0}, {0, 0}, {1.0, 0.2, 0.1}},
        {{0.8, -0.3, 3.0}, {1, 0}, {0.2, 1.0, 0.3}},
        {{0.0, 0.7, 5.0}, {0, 1}, {0.4, 0.5, 1.0}},
    };
    c.prims.push_back(t);

    const auto prims = scene::project_scene(c);
    ASSERT_EQ(prims.size(), 2u);
    EXPECT_EQ(prims[0].id, "quad0");
    EXPECT_EQ(prims[1].id, "tri0");

    for (std::size_t pi = 0; pi < prims.size(); ++pi) {
        const auto& mp = prims[pi];
        const auto& verts = c.prims[pi].verts;
        for (std::size_t k = 0; k < verts.size(); ++k) {
            const geom::ScreenPoint sp = geom::project(verts[k].pos, c.frustum, c.viewport);
            const double den = mp.map.g * sp.x + mp.map.h * sp.y + mp.map.i;
            EXPECT_GT(den, 0.0);
            const tex::Uv uv = tex::exact_uv(mp.map, sp.x, sp.y);
            EXPECT_NEAR(uv.u, verts[k].uv.u, 1e-9);
            EXPECT_NEAR(uv.v, verts[k].uv.v, 1e-9);
        }
        // Spans are clipped to the image and their denominators stay positive.
        EXPECT_FALSE(mp.spans.empty());
        for (const auto& s : mp.spans) {
            EXPECT_GE(s.y, 0);
            EXPECT_LT(s.y, c.height);
            EXPECT_GE(s.x_first, 0);
            EXPECT_LE(s.x_first, s.x_last);
            EXPECT_LT(s.x_last, c.width);
            EXPECT_GT(mp.map.g * s.x_first + mp.map.h * s.y + mp.map.i, 0.0);
            EXPECT_GT(mp.map.g * s.x_last + mp.map.h * s.y + mp.map.i, 0.0);
        }
    }

    // Triangle color numerators reproduce the vertex colors exactly.
    const auto& tri = prims[1];
    for (std::size_t k = 0; k < 3; ++k) {
        const geom::ScreenPoint sp = geom::project(c.prims[1].verts[k].pos, c.frustum, c.viewport);
        const double den = tri.map.g * sp.x + tri.map.h * sp.y + tri.map.i;
        const Vec3 col = c.prims[1].verts[k].color;
        EXPECT_NEAR((tri.shade_x.x * sp.x + tri.shade_y.x * sp.y + tri.shade_0.x) / den, col.x,
                    1e-9);
        EXPECT_NEAR((tri.shade_x.y * sp.x + tri.shade_y.y * sp.y + tri.shade_0.y) / den, col.y,
                    1e-9);
        EXPECT_NEAR((tri.shade_x.z * sp.x + tri.shade_y.z * sp.y + tri.shade_0.z) / den, col.z,
                    1e-9);
    }
}

TEST(Project, ConstantDepthQuadDerivesAnAffineMap) {
    const auto prims = scene::project_scene(parallel_quad_config());
    ASSERT_EQ(prims.size(), 1u);
    EXPECT_EQ(tex::classify_map(prims[0].map), tex::MapClass::Affine);

    // A depth-tilted quad does not collapse.
    const auto tilted = scene::project_scene(tilted_quad_config());
    EXPECT_EQ(tex::classify_map(tilted[0].map), tex::MapClass::General);
}

TEST(Project, FullFrameQuadClipsToTheImage) {
    scene::SceneConfig c;
    c.width = 256;
    c.height = 256;
    c.viewport = geom::Viewport::window(0, 256, 0, 256);
    scene::PrimSpec p;
    p.quad = true;
    p.verts = {
        {{-2.0, -2.0, 1.3}, {0, 0}},
        {{2.0, -2.0, 1.25}, {1, 0}},
        {{2.0, 2.0, 1.35}, {1, 1}},
        {{-2.0, 2.0, 1.3}, {0, 1}},
    };
    c.prims.push_back(p);
    const auto prims = scene::project_scene(c);
    ASSERT_EQ(prims.size(), 1u);
    ASSERT_EQ(prims[0].spans.size(), 256u);
    for (int y = 0; y < 256; ++y) {
        const raster::Span& s = prims[0].spans[static_cast<std::size_t>(y)];
        EXPECT_EQ(s.y, y);
        EXPECT_EQ(s.x_first, 0);
        EXPECT_EQ(s.x_last, 255);
    }
}

TEST(Project, VertexBehindTheCameraIsRejected) {
    scene::SceneConfig c = tilted_quad_config();
    c.prims[0].verts[0].pos = {-1.0, -1.0, -0.5};
    try {
        scene::project_scene(c);
        FAIL() << "expected PointBehindCamera";
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), Err::PointBehindCamera);
    }
}

TEST(SpanMethods, EveryMethodFillsEverySpan) {
    const scene::SceneConfig c = tilted_quad_config();
    const auto prims = scene::project_scene(c);
    ASSERT_EQ(prims.size(), 1u);
    const scene::MappedPrim& mp = prims[0];

    for (const analysis::UvMethod m : analysis::all_methods()) {
        if (m == analysis::UvMethod::RowConst) continue;  // needs structure, below
        // Sanity envelopes only; the tight per-method error claims live in
        // the analysis suites. The corner-anchored screen-linear plane can
        // miss by a third of the uv range on this depth ratio.
        const double bound = m == analysis::UvMethod::Affine ? 0.5
                             : m == analysis::UvMethod::Biquadratic ||
                                     m == analysis::UvMethod::Bicubic
                                 ? 0.35
                                 : 0.05;
        for (const auto& s : mp.spans) {
            const auto uvs = scene::span_uv(mp, m, c.method, s);
            ASSERT_EQ(uvs.size(), static_cast<std::size_t>(s.x_last - s.x_first + 1))
                << analysis::method_name(m);
            for (int x = s.x_first; x <= s.x_last; ++x) {
                const tex::Uv got = uvs[static_cast<std::size_t>(x - s.x_first)];
                const tex::Uv want = tex::exact_uv(mp.map, x, s.y);
                if (m == analysis::UvMethod::Exact) {
                    EXPECT_EQ(got.u, want.u);
                    EXPECT_EQ(got.v, want.v);
                } else {
                    EXPECT_NEAR(got.u, want.u, bound) << analysis::method_name(m);
                    EXPECT_NEAR(got.v, want.v, bound) << analysis::method_name(m);
                }
            }
        }
    }
    // The structured-scan method rejects a fully general map.
    EXPECT_THROW(scene::span_uv(mp, analysis::UvMethod::RowConst, c.method, mp.spans.front()),
                 Error);
}

TEST(SpanMethods, StructuredScanWorksOnTheAffineQuad) {
    const scene::SceneConfig c = parallel_quad_config();
    const auto prims = scene::project_scene(c);
    const scene::MappedPrim& mp = prims[0];
    for (const auto& s : mp.spans) {
        const auto uvs = scene::span_uv(mp, analysis::UvMethod::RowConst, c.method, s);
        ASSERT_EQ(uvs.size(), static_cast<std::size_t>(s.x_last - s.x_first + 1));
        for (int x = s.x_first; x <= s.x_last; ++x) {
            const tex::Uv want = tex::exact_uv(mp.map, x, s.y);
            EXPECT_NEAR(uvs[static_cast<std::size_t>(x - s.x_first)].u, want.u, 1e-9);
            EXPECT_NEAR(uvs[static_cast<std::size_t>(x - s.x_first)].v, want.v, 1e-9);
        }
    }
}

TEST(SpanMethods, MethodParamsFollowTheAnchorMode) {
    scene::MethodSpec spec;
    spec.du = 1.0 / 128;
    spec.eps = 5e-4;
    spec.dt0 = 0.01;
    spec.x_int_mode = scene::XIntMode::Center;
    analysis::MethodParams p = scene::method_params(spec);
    EXPECT_DOUBLE_EQ(p.du, 1.0 / 128);
    EXPECT_DOUBLE_EQ(p.eps, 5e-4);
    EXPECT_DOUBLE_EQ(p.dt0, 0.01);
    ASSERT_TRUE(p.x_int.has_value());
    EXPECT_DOUBLE_EQ(*p.x_int, 0.5);

    spec.x_int_mode = scene::XIntMode::Fixed;
    spec.x_int = 0.3;
    p = scene::method_params(spec);
    ASSERT_TRUE(p.x_int.has_value());
    EXPECT_DOUBLE_EQ(*p.x_int, 0.3);

    spec.x_int_mode = scene::XIntMode::Auto;
    p = scene::method_params(spec);
    EXPECT_FALSE(p.x_int.has_value());
}

TEST(Integration, UvScenesFeedTheComparisonHarness) {
    scene::SceneConfig c = tilted_quad_config();
    scene::PrimSpec t;
    t.quad = false;
    t.verts = {
        {{-0.5, -0.5, 2.0}, {0, 0}},
        {{0.8, -0.3, 3.0}, {1, 0}},
        {{0.0, 0.7, 5.0}, {0, 1}},
    };
    c.prims.push_back(t);
    const auto scenes = scene::uv_scenes(c);
    ASSERT_EQ(scenes.size(), 2u);
    EXPECT_EQ(scenes[0].id, "quad0");
    EXPECT_EQ(scenes[1].id, "tri0");
    for (const auto& sc : scenes) {
        ASSERT_FALSE(sc.spans.empty());
        std::size_t pixels = 0;
        for (const auto& s : sc.spans)
            pixels += static_cast<std::size_t>(s.x_last - s.x_first + 1);
        const analysis::ErrorReport r =
            analysis::compare_uv_method(sc, analysis::UvMethod::Midpoint, {});
        EXPECT_EQ(r.pixels, pixels);
        EXPECT_LT(r.max_abs, 0.5 * tex::kDefaultDu + 1e-9);
    }
}

TEST(Render, RepeatRendersAreByteIdentical) {
    const scene::SceneConfig c = tilted_quad_config();
    const Image t = checker8();
    const Image a = scene::render_with_texture(c, analysis::UvMethod::Exact, t);
    const Image b = scene::render_with_texture(c, analysis::UvMethod::Exact, t);
    EXPECT_TRUE(a == b);
    EXPECT_EQ(a.width, 256);
    EXPECT_EQ(a.height, 256);
    // The quad actually painted something.
    EXPECT_NE(a, Image(256, 256));
}

TEST(Render, AffineMatchesExactOnlyWithoutDepthVariation) {
    const Image t = checker8();
    const scene::SceneConfig flat = parallel_quad_config();
    const Image fe = scene::render_with_texture(flat, analysis::UvMethod::Exact, t);
    const Image fa = scene::render_with_texture(flat, analysis::UvMethod::Affine, t);
    EXPECT_TRUE(fe == fa);

    const scene::SceneConfig tilted = tilted_quad_config();
    const Image te = scene::render_with_texture(tilted, analysis::UvMethod::Exact, t);
    const Image ta = scene::render_with_texture(tilted, analysis::UvMethod::Affine, t);
    EXPECT_FALSE(te == ta);
}

TEST(Render, FootprintFilterRunsAndStaysDeterministic) {
    scene::SceneConfig c = tilted_quad_config();
    c.width = 96;
    c.height = 96;
    c.viewport = geom::Viewport::window(0, 96, 0, 96);
    c.filter = scene::Filter::Aniso;
    c.method.aniso_n = 2;
    const Image t = checker8();
    const Image a = scene::render_with_texture(c, analysis::UvMethod::Exact, t);
    const Image b = scene::render_with_texture(c, analysis::UvMethod::Exact, t);
    EXPECT_TRUE(a == b);
    EXPECT_NE(a, Image(96, 96));
}

TEST(Render, TextureLoadingMatchesTheInMemoryPath) {
    const fs::path dir = fs::path(testing::TempDir()) / "percor_scene_render";
    fs::create_directories(dir);
    const std::string tp = (dir / "checker.ppm").string();
    write_ppm(checker8(), tp);

    scene::SceneConfig c = parallel_quad_config();
    c.texture = tp;
    const Image from_file = scene::render(c, analysis::UvMethod::Exact);
    const Image in_memory = scene::render_with_texture(c, analysis::UvMethod::Exact, checker8());
    EXPECT_TRUE(from_file == in_memory);

    c.texture.clear();
    EXPECT_THROW(scene::render(c, analysis::UvMethod::Exact), Error);
    c.texture = (dir / "absent.ppm").string();
    EXPECT_THROW(scene::render(c, analysis::UvMethod::Exact), Error);
}

}  // namespace
}  // namespace percor
