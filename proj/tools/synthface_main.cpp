// synthface: deterministic synthetic face dataset renderer.
// Exit codes: 0 success, 1 partial failures, 2 invalid input.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "synthface/dataset.hpp"

namespace {

bool parse_frame_range(const std::string& s, int& begin, int& end) {
    size_t dots = s.find("..");
    if (dots == std::string::npos) return false;
    try {
        size_t pos = 0;
        begin = std::stoi(s.substr(0, dots), &pos);
        if (pos != dots) return false;
        std::string tail = s.substr(dots + 2);
        end = std::stoi(tail, &pos);
        if (pos != tail.size()) return false;
    } catch (...) {
        return false;
    }
    return begin >= 0 && end > begin;
}

bool parse_passes(const std::string& s, synthface::RenderConfig& render) {
    render.pass_rgb = render.pass_depth = render.pass_id = false;
    size_t start = 0;
    while (start <= s.size()) {
        size_t comma = s.find(',', start);
        std::string item = s.substr(start, comma == std::string::npos ? comma : comma - start);
        if (item == "rgb")
            render.pass_rgb = true;
        else if (item == "depth")
            render.pass_depth = true;
        else if (item == "id")
            render.pass_id = true;
        else
            return false;
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return render.pass_rgb || render.pass_depth || render.pass_id;
}

void print_summary(const synthface::DatasetSummary& s) {
    std::printf("rendered %d frame(s) in %.1f s, %d failure(s)\n", s.frames_rendered,
                s.wall_seconds, s.failures);
    for (const std::string& msg : s.failure_messages) std::fprintf(stderr, "failed: %s\n", msg.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"synthface: deterministic synthetic face dataset renderer"};
    app.require_subcommand(1);

    std::string scene_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_given = false;
    int workers = 1;
    std::string frames;
    std::string passes;

    CLI::App* generate = app.add_subcommand("generate", "render the full dataset");
    generate->add_option("--scene", scene_path, "scene config (json)")->required();
    generate->add_option("--out", out_dir, "output root directory")->required();
    generate->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) {
        seed_given = true;
    });
    generate->add_option("--workers", workers, "worker thread count")->check(CLI::PositiveNumber);
    generate->add_option("--frames", frames, "frame range A..B (half-open)");
    generate->add_option("--passes", passes, "comma list of passes: rgb,depth,id");

    CLI::App* validate = app.add_subcommand("validate", "check a scene config without rendering");
    validate->add_option("--scene", scene_path, "scene config (json)")->required();

    std::string identity;
    int frame_index = 0;
    bool fast = false;
    CLI::App* preview = app.add_subcommand("preview", "render a single frame");
    preview->add_option("--scene", scene_path, "scene config (json)")->required();
    preview->add_option("--identity", identity, "identity name or index")->required();
    preview->add_option("--frame", frame_index, "schedule frame index")->required();
    preview->add_option("--out", out_dir, "output root directory");
    preview->add_flag("--fast", fast, "reduce samples per pixel for a quick look");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (validate->parsed()) {
            synthface::ValidationReport report = synthface::validate_config(scene_path);
            if (report.ok()) {
                std::printf("OK\n");
                return 0;
            }
            for (const std::string& v : report.violations)
                std::fprintf(stderr, "violation: %s\n", v.c_str());
            return 2;
        }

        synthface::DatasetJob job;
        job.config = synthface::load_scene_config_file(scene_path);
        job.output_root = out_dir;
        job.seed = seed_given ? seed : job.config.seed;
        job.workers = workers;

        if (generate->parsed()) {
            if (!frames.empty() && !parse_frame_range(frames, job.frame_begin, job.frame_end)) {
                std::fprintf(stderr, "--frames expects A..B with 0 <= A < B\n");
                return 2;
            }
            if (!passes.empty() && !parse_passes(passes, job.config.render)) {
                std::fprintf(stderr, "--passes expects a comma list drawn from rgb,depth,id\n");
                return 2;
            }
            synthface::DatasetSummary s = synthface::run_job(job);
            print_summary(s);
            return s.failures == 0 ? 0 : 1;
        }

        synthface::DatasetSummary s = synthface::preview_frame(job, identity, frame_index, fast);
        print_summary(s);
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
