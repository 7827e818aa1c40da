// Copyright 2026 the percor authors.
// SPDX-License-Identifier: Apache-2.0

#include <CLI11.hpp>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "percor/analysis.hpp"
#include "percor/error.hpp"
#include "percor/image.hpp"
#include "percor/scene.hpp"

namespace {

using namespace percor;

std::string valid_methods() {
    std::string out;
    for (const auto m : analysis::all_methods()) {
        if (!out.empty()) out += ", ";
        out += analysis::method_name(m);
    }
    return out;
}

analysis::UvMethod method_or_die(const std::string& name) {
    const auto m = analysis::parse_method(name);
    if (!m) {
        std::cerr << "unknown method '" << name << "'; valid methods: " << valid_methods()
                  << "\n";
        std::exit(1);
    }
    return *m;
}

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : csv) {
        if (c == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else
            cur += c;
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

int cmd_render(const std::string& cfg_path, const std::string& method_name,
               const std::string& out_path) {
    const analysis::UvMethod method = method_or_die(method_name);
    const scene::SceneConfig cfg = scene::parse_config(cfg_path);
    const Image img = scene::render(cfg, method);
    write_ppm(img, out_path);
    std::cout << "wrote " << out_path << " (" << img.width << "x" << img.height << ", method "
              << analysis::method_name(method) << ")\n";
    return 0;
}

Image diff_image(const Image& a, const Image& b) {
    Image d(a.width, a.height);
    for (std::size_t i = 0; i < d.rgb.size(); ++i) {
        const int delta = int(a.rgb[i]) - int(b.rgb[i]);
        d.rgb[i] = static_cast<std::uint8_t>(delta < 0 ? -delta : delta);
    }
    return d;
}

int cmd_bench(const std::string& cfg_path, const std::string& methods_csv,
              const std::string& csv_path, const std::string& diff_dir) {
    std::vector<analysis::UvMethod> methods;
    if (methods_csv.empty())
        methods = analysis::all_methods();
    else
        for (const auto& name : split_list(methods_csv)) methods.push_back(method_or_die(name));

    const scene::SceneConfig cfg = scene::parse_config(cfg_path);
    const auto scenes = scene::uv_scenes(cfg);
    const analysis::MethodParams params = scene::method_params(cfg.method);

    std::vector<analysis::ClaimRow> rows;
    for (const auto& sc : scenes) {
        for (const auto m : methods) {
            analysis::ErrorReport rep;
            try {
                rep = analysis::compare_uv_method(sc, m, params);
            } catch (const Error& e) {
                if (e.code() != Err::ClassMismatch) throw;
                // Structured scans only apply to maps with a constant channel.
                std::cerr << "skipping " << analysis::method_name(m) << " on " << sc.id << ": "
                          << e.what() << "\n";
                continue;
            }
            analysis::ClaimRow r;
            r.method = rep.method;
            r.scene = rep.scene;
            r.claim = "max floored relative texture-coordinate error";
            r.paper_bound = 0.0;
            r.measured = rep.max_rel;
            r.pass = true;
            r.fatal = false;
            r.ops = rep.ops;
            rows.push_back(r);
        }
    }
    if (csv_path.empty())
        std::cout << analysis::claims_csv(rows);
    else {
        analysis::write_claims_csv(rows, csv_path);
        std::cout << "wrote " << csv_path << " (" << rows.size() << " rows)\n";
    }

    if (!diff_dir.empty()) {
        std::filesystem::create_directories(diff_dir);
        const Image texture = [&] {
            if (cfg.texture.empty()) fail(Err::MissingTexture, "difference images need a texture");
            return read_ppm(cfg.texture);
        }();
        const Image exact = scene::render_with_texture(cfg, analysis::UvMethod::Exact, texture);
        for (const auto m : methods) {
            Image img;
            try {
                img = scene::render_with_texture(cfg, m, texture);
            } catch (const Error& e) {
                if (e.code() != Err::ClassMismatch) throw;
                continue;
            }
            const std::string path =
                (std::filesystem::path(diff_dir) /
                 (std::string("diff_") + analysis::method_name(m) + ".ppm"))
                    .string();
            write_ppm(diff_image(img, exact), path);
        }
        std::cout << "wrote difference images to " << diff_dir << "\n";
    }
    return 0;
}

int cmd_claims(const std::string& csv_path, bool inject_error) {
    analysis::ClaimsOptions opts;
    opts.seed = analysis::env_seed();
    opts.threads = analysis::env_threads();
    opts.inject_error = inject_error;
    const auto rows = analysis::claims_suite(opts);
    int fatal_failures = 0, info_misses = 0;
    for (const auto& r : rows) {
        const char* tag = r.pass ? "[PASS]" : (r.fatal ? "[FAIL]" : "[info]");
        if (!r.pass && r.fatal) ++fatal_failures;
        if (!r.pass && !r.fatal) ++info_misses;
        std::printf("%s %-12s %-16s %s (bound %.6g, measured %.6g)\n", tag, r.method.c_str(),
                    r.scene.c_str(), r.claim.c_str(), r.paper_bound, r.measured);
    }
    if (!csv_path.empty()) {
        analysis::write_claims_csv(rows, csv_path);
        std::printf("wrote %s (%zu rows)\n", csv_path.c_str(), rows.size());
    }
    std::printf("%zu claims, %d fatal failures, %d informational misses\n", rows.size(),
                fatal_failures, info_misses);
    return fatal_failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"percor: perspective-correct texture mapping laboratory"};
    app.require_subcommand(1);

    std::string cfg_path, method = "exact", out_path, methods_csv, csv_path, diff_dir;
    bool inject_error = false;

    CLI::App* render = app.add_subcommand("render", "rasterize a scene to a PPM image");
    render->add_option("config", cfg_path, "scene configuration file")->required();
    render->add_option("--method", method, "texture-coordinate method (default exact)");
    render->add_option("--out", out_path, "output PPM path")->required();

    CLI::App* bench = app.add_subcommand("bench", "compare methods against the exact oracle");
    bench->add_option("config", cfg_path, "scene configuration file")->required();
    bench->add_option("--methods", methods_csv, "comma-separated method list (default all)");
    bench->add_option("--csv", csv_path, "write the report CSV here (default stdout)");
    bench->add_option("--diff-images", diff_dir, "write per-method difference images here");

    CLI::App* claims = app.add_subcommand("claims", "reproduce the quantitative claims");
    claims->add_option("--csv", csv_path, "write the claims CSV here");
    claims->add_flag("--inject-error", inject_error, "perturb one model; the suite must fail")
        ->group("");  // test hook, hidden from help

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (render->parsed()) return cmd_render(cfg_path, method, out_path);
        if (bench->parsed()) return cmd_bench(cfg_path, methods_csv, csv_path, diff_dir);
        return cmd_claims(csv_path, inject_error);
    } catch (const percor::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.code() == percor::Err::UnknownMethod ? 1 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
