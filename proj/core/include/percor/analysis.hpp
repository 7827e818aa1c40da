// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "percor/opcount.hpp"
#include "percor/raster.hpp"
#include "percor/texmap.hpp"

namespace percor::analysis {

// Every texture-coordinate evaluation scheme the harness can race against
// the division-per-pixel oracle.
enum class UvMethod {
    Exact,
    Affine,
    Midpoint,
    Quad,
    QuadShifted,
    QuadUnnormalized,
    BezierIter,
    BezierQuad,
    Biquadratic,
    Bicubic,
    Nrl,
    RowConst,
};

const char* method_name(UvMethod m);
std::optional<UvMethod> parse_method(std::string_view name);
std::vector<UvMethod> all_methods();

struct MethodParams {
    double du = tex::kDefaultDu;      // texture lattice step
    std::optional<double> x_int;      // quad anchor override; default 1/2 or recommended
    double eps = 1e-3;                // iterative-parameter abscissa tolerance, pixels
    double dt0 = 0;                   // iterative whole step; 0 = 1/(4 * row length)
};

// A mapped pixel region: the map plus the covered spans it is evaluated on.
struct UvScene {
    std::string id;
    tex::ProjectiveTexMap map;
    std::vector<raster::Span> spans;
};

struct ErrorReport {
    std::string method;
    std::string scene;
    double max_abs = 0;   // unfloored absolute texture-coordinate error
    double max_rel = 0;   // floored relative error, |delta| / max(|exact|, du)
    double mean_rel = 0;
    num::OpCounter ops;        // whole method, setup included
    num::OpCounter pixel_ops;  // per-pixel evaluation only
    std::uint64_t pixels = 0;
    std::uint64_t rows = 0;  // rasterization lines consumed
};

// Races one method against the exact oracle over the scene. The oracle runs
// uninstrumented; the method's arithmetic lands in the report's tallies.
ErrorReport compare_uv_method(const UvScene& scene, UvMethod method,
                              const MethodParams& params = {});

// One quantitative claim, reproduced and judged.
struct ClaimRow {
    std::string method;
    std::string scene;
    std::string claim;
    double paper_bound = 0;
    double measured = 0;
    bool pass = true;
    bool fatal = true;  // informational rows never gate the suite
    num::OpCounter ops;
};

struct ClaimsOptions {
    std::uint64_t seed = 42;
    int threads = 1;
    bool inject_error = false;  // mutation hook: perturb one model, suite must fail
};

// Deterministic reproduction of every quantitative claim; same seed, same
// rows, same verdicts.
std::vector<ClaimRow> claims_suite(const ClaimsOptions& opts = {});

bool claims_pass(const std::vector<ClaimRow>& rows);

// Pinned schema: method,scene,claim,paper_bound,measured,pass,divs,muls,adds
void write_claims_csv(const std::vector<ClaimRow>& rows, const std::string& path);
std::string claims_csv(const std::vector<ClaimRow>& rows);

// Environment knobs: PERCOR_THREADS worker count, PERCOR_SEED suite seed.
int env_threads();
std::uint64_t env_seed();

}  // namespace percor::analysis
