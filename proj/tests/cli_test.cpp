// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

// Drives the installed command-line binary end to end through a shell;
// PERCOR_CLI_BIN is injected by the build.

#include <gtest/gtest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "percor/image.hpp"

#ifndef _WIN32
#include <sys/wait.h>
#endif

namespace percor {
namespace {

namespace fs = std::filesystem;

struct CliResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream o;
    o << f.rdbuf();
    return o.str();
}

int decode_status(int status) {
    if (status == -1) return -1;
#ifndef _WIN32
    return WIFEXITED(status) ? WEXITSTATUS(status) : -2;
#else
    return status;
#endif
}

CliResult run_cli(const std::string& args) {
    static int seq = 0;
    const fs::path dir = fs::path(testing::TempDir()) / "percor_cli_io";
    fs::create_directories(dir);
    const fs::path so = dir / ("out" + std::to_string(seq) + ".txt");
    const fs::path se = dir / ("err" + std::to_string(seq) + ".txt");
    ++seq;
    const std::string cmd = std::string("\"") + PERCOR_CLI_BIN + "\" " + args + " > \"" +
                            so.string() + "\" 2> \"" + se.string() + "\"";
    CliResult r;
    r.code = decode_status(std::system(cmd.c_str()));
    r.out = slurp(so);
    r.err = slurp(se);
    return r;
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

// tilted: depth varies across the quad, so no method family collapses.
fs::path write_scene(bool tilted) {
    const fs::path dir =
        fs::path(testing::TempDir()) / (tilted ? "percor_cli_tilted" : "percor_cli_flat");
    fs::create_directories(dir);
    write_ppm(checker8(), (dir / "checker.ppm").string());
    std::ofstream f(dir / "scene.cfg");
    f << "width = 96\nheight = 96\ntexture = checker.ppm\n\n[quad]\n";
    if (tilted)
        f << "vertex = -1 -1 2  0 0\n"
             "vertex = 1 -0.9 2.8  1 0\n"
             "vertex = 0.9 1 4.2  1 1\n"
             "vertex = -1.1 0.95 3.6  0 1\n";
    else
        f << "vertex = -1.2 -0.9 3  0 0\n"
             "vertex = 0.9 -0.9 3  1 0\n"
             "vertex = 0.9 1.1 3  1 1\n"
             "vertex = -1.2 1.1 3  0 1\n";
    return dir / "scene.cfg";
}

fs::path out_dir() {
    const fs::path dir = fs::path(testing::TempDir()) / "percor_cli_out";
    fs::create_directories(dir);
    return dir;
}

TEST(Cli, RenderIsByteIdenticalAcrossRuns) {
    const fs::path cfg = write_scene(true);
    const fs::path a = out_dir() / "repeat_a.ppm";
    const fs::path b = out_dir() / "repeat_b.ppm";
    const CliResult r1 = run_cli("render \"" + cfg.string() + "\" --out \"" + a.string() + "\"");
    ASSERT_EQ(r1.code, 0) << r1.err;
    EXPECT_NE(r1.out.find("wrote "), std::string::npos);
    const CliResult r2 = run_cli("render \"" + cfg.string() + "\" --out \"" + b.string() + "\"");
    ASSERT_EQ(r2.code, 0) << r2.err;
    const std::string ba = slurp(a), bb = slurp(b);
    ASSERT_FALSE(ba.empty());
    EXPECT_TRUE(ba == bb);
}

TEST(Cli, AffineAgreesWithExactOnlyWithoutDepthVariation) {
    const fs::path flat = write_scene(false);
    const fs::path tilted = write_scene(true);
    const auto render = [&](const fs::path& cfg, const std::string& method,
                            const std::string& name) {
        const fs::path out = out_dir() / name;
        const CliResult r = run_cli("render \"" + cfg.string() + "\" --method " + method +
                              " --out \"" + out.string() + "\"");
        EXPECT_EQ(r.code, 0) << r.err;
        return slurp(out);
    };
    EXPECT_TRUE(render(flat, "exact", "flat_e.ppm") == render(flat, "affine", "flat_a.ppm"));
    EXPECT_FALSE(render(tilted, "exact", "tilt_e.ppm") == render(tilted, "affine", "tilt_a.ppm"));
}

TEST(Cli, UnknownMethodExitsOneAndListsTheMenu) {
    const fs::path cfg = write_scene(false);
    const fs::path out = out_dir() / "unused.ppm";
    const CliResult r = run_cli("render \"" + cfg.string() + "\" --method warp --out \"" +
                          out.string() + "\"");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("unknown method 'warp'"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("valid methods:"), std::string::npos) << r.err;
    EXPECT_NE(r.err.find("midpoint"), std::string::npos) << r.err;
}

TEST(Cli, MissingInputsExitTwo) {
    const fs::path dir = fs::path(testing::TempDir()) / "percor_cli_missing";
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "orphan.cfg");
        f << "width = 32\nheight = 32\ntexture = nothere.ppm\n";
    }
    const fs::path out = out_dir() / "unused2.ppm";
    const CliResult no_tex = run_cli("render \"" + (dir / "orphan.cfg").string() + "\" --out \"" +
                               out.string() + "\"");
    EXPECT_EQ(no_tex.code, 2);
    EXPECT_NE(no_tex.err.find("error:"), std::string::npos) << no_tex.err;

    const CliResult no_cfg = run_cli("render \"" + (dir / "absent.cfg").string() + "\" --out \"" +
                               out.string() + "\"");
    EXPECT_EQ(no_cfg.code, 2);
}

TEST(Cli, BenchEmitsThePinnedCsvSchema) {
    const fs::path cfg = write_scene(false);
    const fs::path csv = out_dir() / "bench.csv";
    const CliResult r = run_cli("bench \"" + cfg.string() + "\" --csv \"" + csv.string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string body = slurp(csv);
    EXPECT_EQ(body.rfind("method,scene,claim,paper_bound,measured,pass,divs,muls,adds\n", 0),
              0u);
    // One row per method on the single flat scene: every family applies.
    EXPECT_EQ(std::count(body.begin(), body.end(), '\n'), 13);

    // On a perspective scene the structured scan is skipped with a note.
    const CliResult tilted = run_cli("bench \"" + write_scene(true).string() + "\"");
    ASSERT_EQ(tilted.code, 0) << tilted.err;
    EXPECT_EQ(tilted.out.rfind("method,scene,claim", 0), 0u);
    EXPECT_NE(tilted.err.find("skipping rowconst"), std::string::npos) << tilted.err;
    EXPECT_EQ(std::count(tilted.out.begin(), tilted.out.end(), '\n'), 12);
}

TEST(Cli, BenchWritesDifferenceImages) {
    const fs::path cfg = write_scene(true);
    const fs::path dir = out_dir() / "diffs";
    const CliResult r = run_cli("bench \"" + cfg.string() + "\" --methods midpoint,affine --csv \"" +
                          (out_dir() / "bench2.csv").string() + "\" --diff-images \"" +
                          dir.string() + "\"");
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(dir / "diff_midpoint.ppm"));
    EXPECT_TRUE(fs::exists(dir / "diff_affine.ppm"));
    // Affine deviates visibly on a tilted quad; midpoint stays sub-texel.
    const Image da = read_ppm((dir / "diff_affine.ppm").string());
    int nonzero = 0;
    for (const auto b : da.rgb) nonzero += b != 0;
    EXPECT_GT(nonzero, 0);
}

TEST(Cli, ClaimsPassAndTheInjectedErrorTrips) {
    const fs::path csv = out_dir() / "claims.csv";
    const CliResult ok = run_cli("claims --csv \"" + csv.string() + "\"");
    EXPECT_EQ(ok.code, 0) << ok.out + ok.err;
    EXPECT_NE(ok.out.find("[PASS]"), std::string::npos);
    EXPECT_NE(ok.out.find(" 0 fatal failures"), std::string::npos) << ok.out;
    EXPECT_EQ(slurp(csv).rfind("method,scene,claim,paper_bound,measured,pass,divs,muls,adds\n",
                               0),
              0u);

    const CliResult bad = run_cli("claims --inject-error");
    EXPECT_EQ(bad.code, 3);
    EXPECT_NE(bad.out.find("[FAIL]"), std::string::npos) << bad.out;
}

TEST(Cli, UsageErrorsExitOneAndHelpExitsZero) {
    const CliResult bare = run_cli("");
    EXPECT_EQ(bare.code, 1);
    const CliResult help = run_cli("--help");
    EXPECT_EQ(help.code, 0);
    EXPECT_NE(help.out.find("render"), std::string::npos);
    EXPECT_NE(help.out.find("claims"), std::string::npos);
}

}  // namespace
}  // namespace percor
