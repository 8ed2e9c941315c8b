// hp2ifs: fractal-code head pose estimation from the command line.
//
//   hp2ifs encode face.pgm face.hpif
//   hp2ifs decode face.hpif out.pgm --iterations 10
//   hp2ifs build-gallery train.csv model.hpgl
//   hp2ifs estimate model.hpgl probe1.pgm probe2.pgm
//   hp2ifs evaluate all.csv --protocol loo --format text
//   hp2ifs synth out_dir --count 100 --subjects 2
//
// Exit status: 0 success, 1 evaluation finished with warnings, 2 input or usage error.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hp2ifs/binary_io.hpp"
#include "hp2ifs/eval.hpp"
#include "hp2ifs/gallery.hpp"
#include "hp2ifs/pgm.hpp"
#include "hp2ifs/pifs.hpp"
#include "hp2ifs/synth.hpp"

namespace fs = std::filesystem;
using namespace hp2ifs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitWarnings = 1;
constexpr int kExitInput = 2;

struct CliConfig {
    EncoderConfig encoder;
    unsigned threads = 0;
    std::string protocol = "random";
    std::optional<double> fraction;
    std::uint64_t seed = 7;
    std::string subject;
    std::string format = "text";
    std::string hamming = "symbol";

    std::string input;
    std::string output;
    std::vector<std::string> images;
    std::string out_dir;
    std::string reference;

    std::size_t synth_count = 100;
    std::size_t synth_subjects = 1;
};

void add_encoder_flags(CLI::App* cmd, CliConfig& c) {
    cmd->add_option("--range-size", c.encoder.range_size, "range block side N")->capture_default_str();
    cmd->add_option("--stride", c.encoder.domain_stride, "domain block stride")->capture_default_str();
    cmd->add_option("--s-bits", c.encoder.s_bits, "contrast quantizer bits")->capture_default_str();
    cmd->add_option("--o-bits", c.encoder.o_bits, "offset quantizer bits")->capture_default_str();
    cmd->add_option("--s-max", c.encoder.s_max, "contrast bound, < 1")->capture_default_str();
}

void add_threads_flag(CLI::App* cmd, CliConfig& c) {
    cmd->add_option("--threads", c.threads, "worker threads, 0 = all cores")->capture_default_str();
}

HammingMode hamming_mode(const std::string& s) { return s == "bit" ? HammingMode::Bit : HammingMode::Symbol; }

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int cmd_encode(const CliConfig& c) {
    c.encoder.validate();
    const auto img = read_pgm(c.input);
    const auto start = std::chrono::steady_clock::now();
    const auto res = encode_detailed(img, c.encoder, c.threads);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    save_code(c.output, res.code);
    std::printf("N=%d domains=%zu ranges=%zu mean_distortion=%.4f time=%.3fs\n", c.encoder.range_size,
                res.code.domain_count(), res.code.entries.size(), res.mean_distortion(), secs);
    return kExitOk;
}

int cmd_decode(const CliConfig& c) {
    if (c.encoder.decode_iterations < 0) throw InvalidArgument("--iterations must be >= 0");
    const auto code = load_code(c.input);
    std::optional<GrayImage> reference;
    if (!c.reference.empty()) reference = read_pgm(c.reference);
    const auto img = decode(code, c.encoder.decode_iterations);
    write_pgm(c.output, img);
    if (reference) {
        if (reference->rows() != img.rows() || reference->cols() != img.cols())
            throw InvalidArgument("reference image size differs from the code");
        std::printf("psnr=%.4f\n", psnr(*reference, img));
    }
    return kExitOk;
}

int cmd_build_gallery(const CliConfig& c) {
    c.encoder.validate();
    const auto manifest = read_manifest(c.input);
    const auto g = build_gallery(manifest, c.encoder, c.threads);
    save_gallery(c.output, g);
    std::printf("entries=%zu\n", g.entries.size());
    return kExitOk;
}

int cmd_estimate(const CliConfig& c) {
    const auto g = load_gallery(c.input);
    std::vector<GrayImage> probes;
    for (const auto& p : c.images) probes.push_back(read_pgm(p));
    for (std::size_t i = 0; i < probes.size(); ++i) {
        const auto hit = query(g, probes[i], hamming_mode(c.hamming), c.threads);
        std::cout << c.images[i] << ' ' << fmt(hit.pose.pitch) << ' ' << fmt(hit.pose.yaw) << ' '
                  << fmt(hit.pose.roll) << ' ' << hit.distance << '\n';
    }
    return kExitOk;
}

int cmd_evaluate(const CliConfig& c) {
    c.encoder.validate();
    Protocol protocol;
    if (c.protocol == "loo") {
        if (c.fraction) throw InvalidArgument("--fraction applies to --protocol random only");
        protocol = LeaveOneSubjectOut{c.subject};
    } else {
        if (!c.subject.empty()) throw InvalidArgument("--subject applies to --protocol loo only");
        protocol = RandomSplit{c.fraction.value_or(0.8), c.seed};
    }
    const auto manifest = read_manifest(c.input);
    ProtocolOptions opts;
    opts.hamming = hamming_mode(c.hamming);
    opts.threads = c.threads;
    const auto r = run_protocol(manifest, c.encoder, protocol, opts);

    if (!c.out_dir.empty()) {
        fs::create_directories(c.out_dir);
        const fs::path dir = c.out_dir;
        io::write_file(dir / "report.json", report_to_json(r));
        io::write_file(dir / "report.txt", report_to_text(r));
        io::write_file(dir / "curves.csv", curves_to_csv(r.pooled));
        io::write_file(dir / "error_by_angle.csv", histogram_to_csv(r.pooled));
        io::write_file(dir / "predictions.csv", predictions_to_csv(r.predictions));
    }
    if (c.format == "json")
        std::cout << report_to_json(r);
    else if (c.format == "csv")
        std::cout << predictions_to_csv(r.predictions);
    else
        std::cout << report_to_text(r);
    for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
    return r.warnings.empty() ? kExitOk : kExitWarnings;
}

// Synthetic plate dataset: PGM files plus manifest.csv, one texture per subject.
int cmd_synth(const CliConfig& c) {
    if (c.synth_count == 0 || c.synth_subjects == 0) throw InvalidArgument("--count and --subjects must be positive");
    const auto grid = synth::pose_grid(30, 30, 20, 5);
    if (c.synth_count > grid.size()) throw InvalidArgument("--count exceeds the " + std::to_string(grid.size()) + " grid poses");
    const fs::path dir = c.output;
    fs::create_directories(dir);
    Manifest m;
    for (std::size_t s = 0; s < c.synth_subjects; ++s) {
        synth::RenderOptions ro;
        ro.texture_seed = s + 1;
        const auto poses = synth::sample_poses(grid, c.synth_count, c.seed + s);
        const auto images = synth::render_dataset(poses, ro, c.threads);
        const std::string subject = "tex" + std::to_string(s + 1);
        for (std::size_t i = 0; i < images.size(); ++i) {
            const std::string name = subject + "_" + std::to_string(i) + ".pgm";
            write_pgm(dir / name, images[i].image);
            m.rows.push_back({name, images[i].label, c.synth_subjects > 1 ? subject : "", m.rows.size() + 2});
        }
    }
    io::write_file(dir / "manifest.csv", format_manifest(m));
    std::printf("images=%zu manifest=%s\n", m.rows.size(), (dir / "manifest.csv").string().c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CliConfig c;
    CLI::App app{"Head pose estimation from partitioned iterated function system codes"};
    app.require_subcommand(1);

    auto* enc = app.add_subcommand("encode", "fractal-encode a PGM image");
    enc->add_option("image", c.input, "input PGM")->required();
    enc->add_option("code", c.output, "output code file")->required();
    add_encoder_flags(enc, c);
    add_threads_flag(enc, c);

    auto* dec = app.add_subcommand("decode", "decode a code file to PGM");
    dec->add_option("code", c.input, "input code file")->required();
    dec->add_option("image", c.output, "output PGM")->required();
    dec->add_option("--iterations", c.encoder.decode_iterations, "decoder iterations")->capture_default_str();
    dec->add_option("--reference", c.reference, "print PSNR against this PGM");

    auto* build = app.add_subcommand("build-gallery", "encode every manifest image into a gallery");
    build->add_option("manifest", c.input, "CSV manifest: path,pitch,yaw,roll[,subject]")->required();
    build->add_option("gallery", c.output, "output gallery file")->required();
    add_encoder_flags(build, c);
    add_threads_flag(build, c);

    auto* est = app.add_subcommand("estimate", "print source_id pitch yaw roll distance per image");
    est->add_option("gallery", c.input, "gallery file")->required();
    est->add_option("images", c.images, "query PGMs")->required();
    est->add_option("--hamming", c.hamming, "distance mode")
        ->check(CLI::IsMember({"symbol", "bit"}))
        ->capture_default_str();
    add_threads_flag(est, c);

    auto* ev = app.add_subcommand("evaluate", "run an evaluation protocol over a manifest");
    ev->add_option("manifest", c.input, "CSV manifest")->required();
    ev->add_option("--protocol", c.protocol, "evaluation protocol")
        ->check(CLI::IsMember({"loo", "random"}))
        ->capture_default_str();
    ev->add_option("--fraction", c.fraction, "model fraction for the random split (default 0.8)");
    ev->add_option("--seed", c.seed, "split seed")->capture_default_str();
    ev->add_option("--subject", c.subject, "run only this leave-one-subject-out fold");
    ev->add_option("--format", c.format, "stdout format")
        ->check(CLI::IsMember({"json", "text", "csv"}))
        ->capture_default_str();
    ev->add_option("--hamming", c.hamming, "distance mode")
        ->check(CLI::IsMember({"symbol", "bit"}))
        ->capture_default_str();
    ev->add_option("--out-dir", c.out_dir, "also write report.json, report.txt and the CSV files here");
    add_encoder_flags(ev, c);
    add_threads_flag(ev, c);

    auto* syn = app.add_subcommand("synth", "render a synthetic plate dataset with a manifest");
    syn->add_option("dir", c.output, "output directory")->required();
    syn->add_option("--count", c.synth_count, "poses per subject")->capture_default_str();
    syn->add_option("--subjects", c.synth_subjects, "number of textures")->capture_default_str();
    syn->add_option("--seed", c.seed, "pose sampling seed")->capture_default_str();
    add_threads_flag(syn, c);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInput;
    }

    try {
        if (*enc) return cmd_encode(c);
        if (*dec) return cmd_decode(c);
        if (*build) return cmd_build_gallery(c);
        if (*est) return cmd_estimate(c);
        if (*ev) return cmd_evaluate(c);
        if (*syn) return cmd_synth(c);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return kExitInput;
}
