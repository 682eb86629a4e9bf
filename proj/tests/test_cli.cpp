#include "commands.hpp"

#include "rgbspeckle/hash.hpp"
#include "rgbspeckle/io.hpp"
#include "rgbspeckle/serialize.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <algorithm>
#include <map>
#include <sstream>

using rgbspeckle::cli::run_cli;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result cli(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

// Path -> SHA-256 of every regular file below `dir`.
std::map<std::string, std::string> tree_hashes(const fs::path& dir) {
    std::map<std::string, std::string> h;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) h[fs::relative(e.path(), dir).generic_string()] = rgbspeckle::sha256_file(e.path());
    return h;
}

void write_small_rig(const fs::path& path) {
    rgbspeckle::write_json_file(path, {{"width", 160}, {"height", 96}});
}

} // namespace

TEST_CASE("cli: usage and errors") {
    CHECK(cli({}).code == 2);
    const auto help = cli({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("gen-pattern") != std::string::npos);
    CHECK(cli({"nonsense"}).code == 2);

    const auto missing = cli({"gen-pattern", "--config", "/nonexistent/p.json", "--out",
                              testutil::scratch_dir("cli_missing").string()});
    CHECK(missing.code == 1);
    CHECK(missing.err.rfind("error[config]: ", 0) == 0);
    CHECK(missing.err.find("/nonexistent/p.json") != std::string::npos);
    CHECK(std::count(missing.err.begin(), missing.err.end(), '\n') == 1);

    const auto bad = cli({"gen-pattern", "--period", "2", "--out", testutil::scratch_dir("cli_bad").string()});
    CHECK(bad.code == 1);
    CHECK(bad.err.rfind("error[pattern]: ", 0) == 0);

    const auto unknown_preset = cli({"simulate", "--preset", "moon", "--out", "x"});
    CHECK(unknown_preset.code == 2);
}

TEST_CASE("cli: gen-pattern is byte-reproducible") {
    const auto dir = testutil::scratch_dir("cli_pattern");
    rgbspeckle::write_json_file(dir / "p.json", {{"lo_width", 64}, {"lo_height", 32}, {"upsample", 2}, {"seed", 9}});
    REQUIRE(cli({"gen-pattern", "--config", (dir / "p.json").string(), "--out", (dir / "a").string()}).code == 0);
    REQUIRE(cli({"gen-pattern", "--config", (dir / "p.json").string(), "--out", (dir / "b").string()}).code == 0);
    const auto a = tree_hashes(dir / "a");
    CHECK(a == tree_hashes(dir / "b"));
    CHECK(a.count("pattern.png") == 1);
    CHECK(a.count("manifest.json") == 1);
    const auto img = rgbspeckle::io::read_png(dir / "a" / "pattern.png");
    CHECK(img.width() == 128);
    const auto manifest = rgbspeckle::read_json_file(dir / "a" / "manifest.json");
    CHECK(manifest["seed"] == 9);
    CHECK(manifest["outputs"]["pattern.png"] == a.at("pattern.png"));

    REQUIRE(cli({"gen-pattern", "--config", (dir / "p.json").string(), "--seed", "10", "--out",
                 (dir / "c").string()})
                .code == 0);
    CHECK(tree_hashes(dir / "c").at("pattern.png") != a.at("pattern.png"));
}

TEST_CASE("cli: simulate -> ppn -> match -> evaluate -> reconstruct on flat") {
    const auto dir = testutil::scratch_dir("cli_pipeline");
    const std::string rig = (dir / "rig.json").string();
    write_small_rig(rig);
    const std::string ds = (dir / "ds").string();
    REQUIRE(cli({"simulate", "--preset", "flat", "--preset", "steps", "--rig", rig, "--out", ds}).code == 0);
    for (const char* f : {"left.png", "right.png", "disp_gt.pfm", "occlusion.png", "manifest.json"})
        CHECK(fs::exists(fs::path(ds) / "scene_0000" / f));
    CHECK(fs::exists(fs::path(ds) / "scene_0001" / "left.png"));
    const fs::path s0 = fs::path(ds) / "scene_0000";

    REQUIRE(cli({"ppn", "--in", (s0 / "left.png").string(), "--out", (dir / "ppn_l").string()}).code == 0);
    REQUIRE(cli({"ppn", "--in", (s0 / "right.png").string(), "--out", (dir / "ppn_r").string()}).code == 0);
    CHECK(fs::exists(dir / "ppn_l" / "phase.pfm"));
    CHECK(fs::exists(dir / "ppn_l" / "mask.png"));
    CHECK(fs::exists(dir / "ppn_l" / "phase.png"));

    SUBCASE("from PNG captures") {
        REQUIRE(cli({"match", "--left", (s0 / "left.png").string(), "--right", (s0 / "right.png").string(),
                     "--mode", "phase", "--d-max", "32", "--out", (dir / "m").string()})
                    .code == 0);
        const auto r = cli({"evaluate", "--pred", (dir / "m" / "disparity.pfm").string(), "--gt",
                            (s0 / "disp_gt.pfm").string(), "--mask", (s0 / "occlusion.png").string(), "--out",
                            (dir / "e").string()});
        REQUIRE(r.code == 0);
        const auto report = rgbspeckle::read_json_file(dir / "e" / "report.json");
        CHECK(report["epe"].get<double>() < 0.5);
        CHECK(fs::exists(dir / "e" / "error.png"));

        const auto rc = cli({"reconstruct", "--disp", (dir / "m" / "disparity.pfm").string(), "--color",
                             (s0 / "left.png").string(), "--rig", rig, "--out", (dir / "r").string()});
        REQUIRE(rc.code == 0);
        CHECK(fs::exists(dir / "r" / "cloud.ply"));
    }
    SUBCASE("from phase PFMs") {
        REQUIRE(cli({"match", "--left", (dir / "ppn_l" / "phase.pfm").string(), "--left-mask",
                     (dir / "ppn_l" / "mask.png").string(), "--right", (dir / "ppn_r" / "phase.pfm").string(),
                     "--right-mask", (dir / "ppn_r" / "mask.png").string(), "--mode", "phase", "--d-max", "32",
                     "--out", (dir / "mp").string()})
                    .code == 0);
        REQUIRE(cli({"evaluate", "--pred", (dir / "mp" / "disparity.pfm").string(), "--gt",
                     (s0 / "disp_gt.pfm").string(), "--mask", (s0 / "occlusion.png").string(), "--out",
                     (dir / "ep").string()})
                    .code == 0);
        CHECK(rgbspeckle::read_json_file(dir / "ep" / "report.json")["epe"].get<double>() < 0.5);
        CHECK(cli({"match", "--left", (dir / "ppn_l" / "phase.pfm").string(), "--right",
                   (dir / "ppn_r" / "phase.pfm").string(), "--mode", "rgb", "--out", (dir / "bad").string()})
                  .code == 1);
    }
}

TEST_CASE("cli: every command re-run reproduces identical artifacts") {
    const auto dir = testutil::scratch_dir("cli_repro");
    const std::string rig = (dir / "rig.json").string();
    write_small_rig(rig);
    auto run_all = [&](const fs::path& out) {
        const std::string o = out.string();
        REQUIRE(cli({"gen-pattern", "--lo-width", "60", "--lo-height", "30", "--out", o + "/pat"}).code == 0);
        REQUIRE(cli({"simulate", "--preset", "boxes", "--rig", rig, "--pattern", o + "/pat/pattern.png",
                     "--noise-sigma", "0.01", "--seed", "5", "--out", o + "/ds"})
                    .code == 0);
        const std::string s0 = o + "/ds/scene_0000";
        REQUIRE(cli({"ppn", "--in", s0 + "/left.png", "--out", o + "/ppn"}).code == 0);
        REQUIRE(cli({"match", "--left", s0 + "/left.png", "--right", s0 + "/right.png", "--d-max", "40", "--out",
                     o + "/match"})
                    .code == 0);
        REQUIRE(cli({"evaluate", "--pred", o + "/match/disparity.pfm", "--gt", s0 + "/disp_gt.pfm", "--out",
                     o + "/eval"})
                    .code == 0);
        REQUIRE(cli({"compare", "--report", "run=" + o + "/eval/report.json", "--out", o + "/cmp"}).code == 0);
        REQUIRE(cli({"reconstruct", "--disp", o + "/match/disparity.pfm", "--color", s0 + "/left.png", "--rig", rig,
                     "--out", o + "/rec"})
                    .code == 0);
        REQUIRE(cli({"graycode", "gen", "--width", "240", "--height", "96", "--out", o + "/gc"}).code == 0);
        REQUIRE(cli({"graycode", "capture", "--stack", o + "/gc", "--preset", "boxes", "--rig", rig, "--out",
                     o + "/cap"})
                    .code == 0);
        REQUIRE(cli({"graycode", "decode", "--in", o + "/cap/left", "--out", o + "/dl"}).code == 0);
        REQUIRE(cli({"graycode", "decode", "--in", o + "/cap/right", "--out", o + "/dr"}).code == 0);
        REQUIRE(cli({"graycode", "gt", "--left", o + "/dl/coord.pfm", "--right", o + "/dr/coord.pfm", "--out",
                     o + "/gt"})
                    .code == 0);
    };
    run_all(dir / "a");
    const auto first = tree_hashes(dir / "a");
    run_all(dir / "a");
    const auto second = tree_hashes(dir / "a");
    CHECK(first.size() > 40);
    CHECK(first == second);
    // A fresh directory reproduces every non-manifest artifact too.
    run_all(dir / "b");
    const auto other = tree_hashes(dir / "b");
    for (const auto& [k, v] : first) {
        if (k.find("manifest.json") != std::string::npos) continue;
        CHECK_MESSAGE(other.count(k) == 1, k);
        if (other.count(k)) CHECK_MESSAGE(other.at(k) == v, k);
    }
}

TEST_CASE("cli: graycode ground truth agrees with the simulator") {
    const auto dir = testutil::scratch_dir("cli_graycode");
    const std::string rig = (dir / "rig.json").string();
    write_small_rig(rig);
    const std::string o = dir.string();
    REQUIRE(cli({"simulate", "--preset", "ramp", "--rig", rig, "--out", o + "/ds"}).code == 0);
    REQUIRE(cli({"graycode", "gen", "--width", "200", "--height", "96", "--out", o + "/gc"}).code == 0);
    REQUIRE(cli({"graycode", "capture", "--stack", o + "/gc", "--preset", "ramp", "--rig", rig, "--out", o + "/cap"})
                .code == 0);
    REQUIRE(cli({"graycode", "decode", "--in", o + "/cap/left", "--out", o + "/dl"}).code == 0);
    REQUIRE(cli({"graycode", "decode", "--in", o + "/cap/right", "--out", o + "/dr"}).code == 0);
    REQUIRE(cli({"graycode", "gt", "--left", o + "/dl/coord.pfm", "--right", o + "/dr/coord.pfm", "--out", o + "/gt"})
                .code == 0);
    const auto r = cli({"evaluate", "--pred", o + "/gt/disp_gt.pfm", "--gt", o + "/ds/scene_0000/disp_gt.pfm",
                        "--mask", o + "/ds/scene_0000/occlusion.png", "--threshold", "0.25", "--no-penalize", "--out",
                        o + "/e"});
    REQUIRE(r.code == 0);
    const auto report = rgbspeckle::read_json_file(dir / "e" / "report.json");
    CHECK(report["d1"].get<double>() <= 0.01);
}

TEST_CASE("cli: ablate writes a table with one row per cell") {
    const auto dir = testutil::scratch_dir("cli_ablate");
    rgbspeckle::write_json_file(
        dir / "exp.json",
        {{"rig", {{"width", 160}, {"height", 96}}},
         {"scene", {{"preset", "flat"}}},
         {"perturbations", {{{"gains", {1.3, 0.8, 1.0}}, {"offsets", {0.1, 0.1, 0.1}}}, {{"noise_sigma", 0.01}}}},
         {"rgb_match", {{"d_max", 32}}},
         {"phase_match", {{"d_max", 32}}}});
    const auto r = cli({"ablate", "--config", (dir / "exp.json").string(), "--out", (dir / "out").string()});
    REQUIRE(r.code == 0);
    const auto csv = rgbspeckle::io::read_file_bytes(dir / "out" / "ablation.csv");
    const std::string text(csv.begin(), csv.end());
    CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 6);
    const auto manifest = rgbspeckle::read_json_file(dir / "out" / "manifest.json");
    REQUIRE(manifest["cells"].size() == 6);
    for (const auto& c : manifest["cells"]) {
        CHECK(fs::exists(dir / "out" / c["heatmap"].get<std::string>()));
        if (c["label"].get<std::string>().find("/clean") != std::string::npos)
            CHECK(c["report"]["epe"].get<double>() < 0.5);
    }
    CHECK(manifest["seed"] == 1);
}
