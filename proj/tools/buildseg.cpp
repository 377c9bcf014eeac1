// Command-line entry point: batch subcommands over the buildseg library.
// Exit codes: 0 success, 2 usage error, 3 input parse/validation error,
// 4 I/O error. Diagnostics go to stderr; data goes to files.

#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include <buildseg/buildseg.hpp>

namespace fs = std::filesystem;
using namespace buildseg;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitInvalid = 3;
constexpr int kExitIo = 4;

// ---------------------------------------------------------------------------
// Small shared helpers

unsigned thread_budget(std::size_t jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("BUILDSEG_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v < static_cast<long>(hw))
            hw = static_cast<unsigned>(v);
    }
    if (jobs < hw) hw = static_cast<unsigned>(jobs);
    return hw == 0 ? 1 : hw;
}

/// Run f(0..n-1) on up to BUILDSEG_THREADS workers. f must not throw;
/// workers pull indices from a shared counter, results are stored by index
/// by the callers, so output order never depends on the schedule.
template <typename F>
void parallel_for(std::size_t n, F&& f) {
    const unsigned workers = thread_budget(n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) f(i);
        });
    }
    for (std::thread& t : pool) t.join();
}

std::vector<fs::path> list_pngs(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec))
        throw IoError("not a readable directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir, ec)) {
        if (e.is_regular_file() && e.path().extension() == ".png")
            files.push_back(e.path());
    }
    if (ec)
        throw IoError("cannot list directory: " + dir.string());
    std::sort(files.begin(), files.end());
    return files;
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw IoError("cannot open file for writing: " + path.string());
    out << content;
    if (!out)
        throw IoError("write failed: " + path.string());
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open file: " + path.string());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return content;
}

nlohmann::json parse_json_file(const fs::path& path) {
    try {
        return nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir))
        throw IoError("cannot create directory: " + dir.string());
}

/// Report collected per-file failures; returns the exit code to use.
int report_failures(const std::vector<std::string>& failures) {
    for (const std::string& f : failures)
        std::cerr << "error: " << f << "\n";
    return failures.empty() ? 0 : kExitInvalid;
}

// ---------------------------------------------------------------------------
// evaluate

struct EvaluateOptions {
    std::string pred_dir;
    std::string gt_dir;
    std::string out_file;
    std::string csv_file;
    std::string pairs_file;
    double biou_ratio = 0.02;
    std::string agg = "macro";
};

struct EvalPair {
    std::string id;
    fs::path pred;
    fs::path gt;
};

std::vector<EvalPair> pair_by_name(const fs::path& pred_dir, const fs::path& gt_dir) {
    const std::vector<fs::path> preds = list_pngs(pred_dir);
    const std::vector<fs::path> gts = list_pngs(gt_dir);
    std::vector<std::string> pred_names, gt_names;
    for (const auto& p : preds) pred_names.push_back(p.filename().string());
    for (const auto& p : gts) gt_names.push_back(p.filename().string());

    std::vector<std::string> only_pred, only_gt;
    std::set_difference(pred_names.begin(), pred_names.end(), gt_names.begin(), gt_names.end(),
                        std::back_inserter(only_pred));
    std::set_difference(gt_names.begin(), gt_names.end(), pred_names.begin(), pred_names.end(),
                        std::back_inserter(only_gt));
    if (!only_pred.empty() || !only_gt.empty()) {
        std::string msg = "prediction/ground-truth file sets differ;";
        for (const std::string& n : only_pred) msg += " missing ground truth for " + n + ";";
        for (const std::string& n : only_gt) msg += " missing prediction for " + n + ";";
        throw ConfigError(msg);
    }
    if (preds.empty())
        throw ConfigError("no PNG files to evaluate in " + pred_dir.string());

    std::vector<EvalPair> pairs;
    for (const fs::path& p : preds)
        pairs.push_back({p.stem().string(), p, gt_dir / p.filename()});
    return pairs;
}

/// CSV escape hatch for mismatched naming: one "id,pred_path,gt_path" per line.
std::vector<EvalPair> pairs_from_csv(const fs::path& csv) {
    std::vector<EvalPair> pairs;
    std::istringstream in(read_text_file(csv));
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t c1 = line.find(',');
        const std::size_t c2 = c1 == std::string::npos ? std::string::npos : line.find(',', c1 + 1);
        if (c1 == std::string::npos || c2 == std::string::npos ||
            line.find(',', c2 + 1) != std::string::npos)
            throw ParseError(csv.string() + ":" + std::to_string(line_no) +
                             ": expected 'id,pred_path,gt_path'");
        pairs.push_back({line.substr(0, c1), line.substr(c1 + 1, c2 - c1 - 1),
                         line.substr(c2 + 1)});
    }
    if (pairs.empty())
        throw ParseError(csv.string() + ": no pairs listed");
    std::sort(pairs.begin(), pairs.end(),
              [](const EvalPair& a, const EvalPair& b) { return a.id < b.id; });
    return pairs;
}

int run_evaluate(const EvaluateOptions& opt) {
    EvalConfig cfg;
    cfg.biou_ratio = opt.biou_ratio;
    cfg.aggregation = opt.agg == "micro" ? Aggregation::micro : Aggregation::macro;

    const std::vector<EvalPair> pairs = opt.pairs_file.empty()
                                            ? pair_by_name(opt.pred_dir, opt.gt_dir)
                                            : pairs_from_csv(opt.pairs_file);

    std::vector<std::optional<EvalReport>> reports(pairs.size());
    std::vector<PixelTally> tallies(pairs.size());
    std::vector<std::string> failures_by_index(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
        try {
            const BinaryMask pred = load_mask(pairs[i].pred);
            const BinaryMask gt = load_mask(pairs[i].gt);
            reports[i] = evaluate_pair(pred, gt, cfg, pairs[i].id, &tallies[i]);
        } catch (const Error& e) {
            failures_by_index[i] = pairs[i].id + ": " + e.what();
        }
    });

    std::vector<std::string> failures;
    for (const std::string& f : failures_by_index)
        if (!f.empty()) failures.push_back(f);
    if (!failures.empty())
        return report_failures(failures);

    std::vector<EvalReport> all;
    PixelTally total;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        all.push_back(*reports[i]);
        total += tallies[i];
    }
    const DatasetReport dataset = aggregate(std::move(all), cfg.aggregation, &total);
    write_text_file(opt.out_file, report_to_json(dataset, cfg).dump(2) + "\n");
    if (!opt.csv_file.empty())
        write_text_file(opt.csv_file, report_to_csv(dataset));
    return 0;
}

// ---------------------------------------------------------------------------
// postprocess

struct PostprocessOptions {
    std::string in_dir;
    std::string out_dir;
    std::string trace_file;
    RectifyConfig cfg;
};

int run_postprocess(const PostprocessOptions& opt) {
    const std::vector<fs::path> files = list_pngs(opt.in_dir);
    if (files.empty())
        throw ConfigError("no PNG files to postprocess in " + opt.in_dir);
    ensure_directory(opt.out_dir);

    std::vector<RectifyTrace> traces(files.size());
    std::vector<std::string> failures_by_index(files.size());
    parallel_for(files.size(), [&](std::size_t i) {
        try {
            const BinaryMask mask = load_mask(files[i]);
            RectifyResult res = rectify_mask(mask, opt.cfg);
            save_mask(res.mask, fs::path(opt.out_dir) / files[i].filename());
            traces[i] = std::move(res.trace);
        } catch (const Error& e) {
            failures_by_index[i] = files[i].string() + ": " + e.what();
        }
    });

    std::vector<std::string> failures;
    for (const std::string& f : failures_by_index)
        if (!f.empty()) failures.push_back(f);
    if (!failures.empty())
        return report_failures(failures);

    if (!opt.trace_file.empty()) {
        std::string jsonl;
        for (std::size_t i = 0; i < files.size(); ++i) {
            for (const RectifyRecord& rec : traces[i].records) {
                nlohmann::ordered_json j;
                j["image"] = files[i].stem().string();
                const nlohmann::ordered_json fields = trace_record_json(rec);
                for (const auto& [k, v] : fields.items())
                    j[k] = v;
                jsonl += j.dump();
                jsonl += '\n';
            }
        }
        write_text_file(opt.trace_file, jsonl);
    }
    return 0;
}

// ---------------------------------------------------------------------------
// tile / merge

struct TileOptions {
    std::string image_file;
    std::string out_dir;
    int size = 500;
    int overlap = 0;
};

std::string tile_name(std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "tile_%06zu.png", index);
    return buf;
}

int run_tile(const TileOptions& opt) {
    const Raster image = load_image(opt.image_file);
    const TileGrid grid = plan_tiles(image.width(), image.height(), opt.size, opt.overlap);
    ensure_directory(opt.out_dir);
    const std::vector<Raster> tiles = extract_tiles(image, grid);
    for (std::size_t i = 0; i < tiles.size(); ++i)
        save_image(tiles[i], fs::path(opt.out_dir) / tile_name(i));
    write_text_file(fs::path(opt.out_dir) / "grid.json", grid_to_json(grid).dump(2) + "\n");
    return 0;
}

struct MergeOptions {
    std::string tiles_dir;
    std::string grid_file;
    std::string out_file;
};

int run_merge(const MergeOptions& opt) {
    const TileGrid grid = grid_from_json(parse_json_file(opt.grid_file));
    const std::vector<fs::path> files = list_pngs(opt.tiles_dir);
    if (files.size() != grid.tiles.size())
        throw ConfigError("found " + std::to_string(files.size()) + " tiles but the grid lists " +
                          std::to_string(grid.tiles.size()));
    std::vector<ProbGrid> tiles;
    tiles.reserve(files.size());
    for (const fs::path& f : files)
        tiles.push_back(prob_from_gray(load_image(f)));
    save_mask(merge_tiles(tiles, grid), opt.out_file);
    return 0;
}

// ---------------------------------------------------------------------------
// fuse

struct FuseOptions {
    std::string image_file;
    std::string lidar_file;
    std::string out_file;
    std::string norm = "0,30";
};

NormSpec parse_norm(const std::string& s) {
    const std::size_t comma = s.find(',');
    if (comma == std::string::npos)
        throw ParseError("--norm expects LO,HI (got '" + s + "')");
    try {
        NormSpec norm{std::stod(s.substr(0, comma)), std::stod(s.substr(comma + 1))};
        return norm;
    } catch (const std::exception&) {
        throw ParseError("--norm expects numeric LO,HI (got '" + s + "')");
    }
}

int run_fuse(const FuseOptions& opt) {
    const NormSpec norm = parse_norm(opt.norm);
    const Raster image = load_image(opt.image_file);
    const HeightGrid grid = load_height_grid(opt.lidar_file);
    save_image(fuse_channels(image, grid, norm), opt.out_file);
    return 0;
}

// ---------------------------------------------------------------------------
// augment

struct AugmentOptions {
    std::string image_file;
    std::string mask_file;
    std::string out_dir;
    std::string config_file;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
};

int run_augment(const AugmentOptions& opt) {
    AugmentationConfig cfg;
    if (!opt.config_file.empty())
        cfg = augment_config_from_json(parse_json_file(opt.config_file));
    cfg.seed = opt.seed;

    Sample sample{load_image(opt.image_file), load_mask(opt.mask_file),
                  fs::path(opt.image_file).stem().string()};
    const Sample out = augment(sample, cfg, opt.index);

    ensure_directory(opt.out_dir);
    save_image(out.image, fs::path(opt.out_dir) / (sample.source_id + "_image.png"));
    save_mask(out.mask, fs::path(opt.out_dir) / (sample.source_id + "_mask.png"));
    return 0;
}

// ---------------------------------------------------------------------------
// manifest

struct ManifestOptions {
    std::vector<std::string> sources;
    std::string out_file;
    bool validate = false;
};

int run_manifest(const ManifestOptions& opt) {
    std::vector<SourceSpec> specs;
    for (const std::string& s : opt.sources) {
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == s.size())
            throw ConfigError("--source expects NAME=DIR (got '" + s + "')");
        specs.push_back({s.substr(0, eq), s.substr(eq + 1)});
    }
    const Manifest m = build_manifest(specs);
    write_text_file(opt.out_file, manifest_to_json(m).dump(2) + "\n");
    if (opt.validate)
        return report_failures(validate_manifest(m));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Building-segmentation toolkit: mask evaluation, rectangular "
                 "post-processing, raster tiling, LiDAR fusion, augmentation."};
    app.require_subcommand(1);

    EvaluateOptions eval_opt;
    CLI::App* eval = app.add_subcommand(
        "evaluate", "Score predicted masks against ground truth (IOU, boundary IOU, average)");
    eval->add_option("--pred", eval_opt.pred_dir, "Directory of predicted mask PNGs");
    eval->add_option("--gt", eval_opt.gt_dir, "Directory of ground-truth mask PNGs");
    eval->add_option("--out", eval_opt.out_file, "Output JSON report path")->required();
    eval->add_option("--biou-ratio", eval_opt.biou_ratio,
                     "Boundary band ratio of the image diagonal (default 0.02)");
    eval->add_option("--agg", eval_opt.agg, "Aggregation mode (default macro)")
        ->check(CLI::IsMember({"macro", "micro"}));
    eval->add_option("--csv", eval_opt.csv_file, "Also write a CSV view of per-image scores");
    eval->add_option("--pairs", eval_opt.pairs_file,
                     "CSV of 'id,pred_path,gt_path' lines (replaces --pred/--gt pairing)");

    PostprocessOptions post_opt;
    CLI::App* post = app.add_subcommand(
        "postprocess", "Regularize predicted masks toward rectangular building shapes");
    post->add_option("--in", post_opt.in_dir, "Directory of mask PNGs")->required();
    post->add_option("--out", post_opt.out_dir, "Output directory")->required();
    post->add_option("--rect-threshold", post_opt.cfg.rect_threshold,
                     "Rectangularity needed to snap a component (default 0.85)");
    post->add_option("--se-size", post_opt.cfg.denoise_se_size,
                     "Square denoise kernel side, odd (default 3)");
    post->add_option("--line-length", post_opt.cfg.line_se_length,
                     "Line kernel length, odd (default 5)");
    post->add_option("--min-area", post_opt.cfg.min_component_area,
                     "Minimum component pixel area (default 4)");
    post->add_option("--trace", post_opt.trace_file, "Write per-component JSONL trace here");

    TileOptions tile_opt;
    CLI::App* tile = app.add_subcommand("tile", "Split a raster into fixed-size tiles");
    tile->add_option("--image", tile_opt.image_file, "Input PNG")->required();
    tile->add_option("--out", tile_opt.out_dir, "Output directory for tiles + grid.json")
        ->required();
    tile->add_option("--size", tile_opt.size, "Tile size in pixels (default 500)");
    tile->add_option("--overlap", tile_opt.overlap, "Tile overlap in pixels (default 0)");

    MergeOptions merge_opt;
    CLI::App* merge = app.add_subcommand(
        "merge", "Merge probability tiles (grayscale PNGs) back into a full mask");
    merge->add_option("--tiles", merge_opt.tiles_dir, "Directory of tile PNGs")->required();
    merge->add_option("--grid", merge_opt.grid_file, "Tile grid JSON sidecar")->required();
    merge->add_option("--out", merge_opt.out_file, "Output mask PNG")->required();

    FuseOptions fuse_opt;
    CLI::App* fuse = app.add_subcommand(
        "fuse", "Append a normalized LiDAR height channel to an RGB image");
    fuse->add_option("--image", fuse_opt.image_file, "Input RGB PNG")->required();
    fuse->add_option("--lidar", fuse_opt.lidar_file, "ESRI ASCII height grid")->required();
    fuse->add_option("--out", fuse_opt.out_file, "Output 4-channel PNG")->required();
    fuse->add_option("--norm", fuse_opt.norm, "Height normalization LO,HI meters (default 0,30)");

    AugmentOptions aug_opt;
    CLI::App* aug = app.add_subcommand(
        "augment", "Apply the deterministic crop/flip/photometric augmentation recipe");
    aug->add_option("--image", aug_opt.image_file, "Input image PNG")->required();
    aug->add_option("--mask", aug_opt.mask_file, "Input mask PNG")->required();
    aug->add_option("--out", aug_opt.out_dir, "Output directory")->required();
    aug->add_option("--seed", aug_opt.seed, "Random seed")->required();
    aug->add_option("--config", aug_opt.config_file, "JSON augmentation config");
    aug->add_option("--index", aug_opt.index, "Sample index for the draw counter (default 0)");

    ManifestOptions man_opt;
    CLI::App* man = app.add_subcommand(
        "manifest", "Enumerate dataset sources (images/, masks/, optional lidar/) into JSON");
    man->add_option("--source", man_opt.sources, "NAME=DIR source specs")->required();
    man->add_option("--out", man_opt.out_file, "Output manifest JSON")->required();
    man->add_flag("--validate", man_opt.validate, "Check that every entry exists and parses");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }

    try {
        if (eval->parsed()) {
            if (eval_opt.pairs_file.empty() && (eval_opt.pred_dir.empty() || eval_opt.gt_dir.empty())) {
                std::cerr << "error: evaluate requires --pred and --gt (or --pairs)\n";
                return kExitUsage;
            }
            return run_evaluate(eval_opt);
        }
        if (post->parsed()) return run_postprocess(post_opt);
        if (tile->parsed()) return run_tile(tile_opt);
        if (merge->parsed()) return run_merge(merge_opt);
        if (fuse->parsed()) return run_fuse(fuse_opt);
        if (aug->parsed()) return run_augment(aug_opt);
        if (man->parsed()) return run_manifest(man_opt);
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return 0;
}
