#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "fmfusion/errors.hpp"
#include "fmfusion/manifest.hpp"
#include "fmfusion/synth.hpp"

using namespace fmfusion;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
    const fs::path dir = fs::temp_directory_path() / (std::string("fmfusion_test_") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

void write_text(const fs::path& p, const std::string& content) {
    std::ofstream out(p);
    out << content;
}

}  // namespace

TEST_CASE("manifest parsing") {
    const fs::path dir = temp_dir("manifest");

    SUBCASE("well-formed manifest with 2 subjects and 4 snippets") {
        write_text(dir / "m.txt",
                   "dataset: demo\n"
                   "subject: A\nsubject: B\n"
                   "snippet: a1 subject=A label=FM+ video=a1.csv\n"
                   "snippet: a2 subject=A label=FM-\n"
                   "snippet: b1 subject=B label=FM+\n"
                   "snippet: b2 subject=B label=FM-\n");
        const DatasetManifest m = load_manifest(dir / "m.txt");
        CHECK(m.dataset_name == "demo");
        CHECK(m.subjects.size() == 2);
        REQUIRE(m.snippets.size() == 4);
        CHECK(m.snippets[0].video_path.has_value());
        CHECK_FALSE(m.snippets[1].video_path.has_value());
        CHECK(m.snippets[0].label == Label::FMplus);
    }
    SUBCASE("dangling subject is rejected") {
        write_text(dir / "m.txt",
                   "dataset: demo\nsubject: A\n"
                   "snippet: x subject=GHOST label=FM+\n");
        CHECK_THROWS_WITH_AS(load_manifest(dir / "m.txt"),
                             doctest::Contains("dangling subject"), DataError);
    }
    SUBCASE("duplicate snippet ids are rejected") {
        write_text(dir / "m.txt",
                   "dataset: demo\nsubject: A\n"
                   "snippet: x subject=A label=FM+\nsnippet: x subject=A label=FM-\n");
        CHECK_THROWS_WITH_AS(load_manifest(dir / "m.txt"),
                             doctest::Contains("duplicate snippet id"), DataError);
    }
    SUBCASE("empty snippet list is a valid manifest") {
        write_text(dir / "m.txt", "dataset: demo\nsubject: A\n");
        const DatasetManifest m = load_manifest(dir / "m.txt");
        CHECK(m.snippets.empty());
    }
}

TEST_CASE("load_snippet shape handling") {
    const fs::path dir = temp_dir("load");
    write_csv_matrix(Eigen::MatrixXd::Random(kVideoFrames, 30).cwiseAbs(), dir / "v.csv");
    write_csv_matrix(Eigen::MatrixXd::Random(kMatFrames, 1024).cwiseAbs(), dir / "m.csv");
    write_csv_matrix(Eigen::MatrixXd::Random(299, 36), dir / "i.csv");  // one frame short
    write_text(dir / "man.txt",
               "dataset: demo\nsubject: A\n"
               "snippet: good subject=A label=FM+ video=v.csv mat=m.csv\n"
               "snippet: bad subject=A label=FM- imu=i.csv\n");
    const DatasetManifest m = load_manifest(dir / "man.txt");

    const Snippet s = load_snippet(m, "good");
    CHECK(s.video->frames.rows() == kVideoFrames);
    CHECK(s.video->frames.cols() == 30);
    CHECK(s.mat->frames.cols() == 1024);
    CHECK_FALSE(s.imu.has_value());

    CHECK_THROWS_WITH_AS(load_snippet(m, "bad"), doctest::Contains("imu frame count"), DataError);
    CHECK_THROWS_AS(load_snippet(m, "missing"), DataError);
}

TEST_CASE("synthesis is a pure function of the config") {
    SynthConfig cfg;
    cfg.n_subjects = 2;
    cfg.snippets_per_subject = 3;
    cfg.seed = 1;
    const SynthDataset a = synthesize_dataset(cfg);
    const SynthDataset b = synthesize_dataset(cfg);
    REQUIRE(a.snippets.size() == b.snippets.size());
    for (std::size_t i = 0; i < a.snippets.size(); ++i) {
        CHECK(a.snippets[i].label == b.snippets[i].label);
        CHECK(a.snippets[i].video->frames == b.snippets[i].video->frames);
        CHECK(a.snippets[i].mat->frames == b.snippets[i].mat->frames);
        CHECK(a.snippets[i].imu->frames == b.snippets[i].imu->frames);
    }
}

TEST_CASE("at separability 0 the content is independent of the labels") {
    // Different class balances permute the labels only; with the oscillation
    // gated to zero the raw arrays must be bit-identical.
    SynthConfig cfg;
    cfg.n_subjects = 2;
    cfg.snippets_per_subject = 4;
    cfg.seed = 9;
    cfg.separability = 0.0;
    cfg.class_balance = 0.25;
    const SynthDataset a = synthesize_dataset(cfg);
    cfg.class_balance = 0.75;
    const SynthDataset b = synthesize_dataset(cfg);
    bool labels_differ = false;
    for (std::size_t i = 0; i < a.snippets.size(); ++i) {
        labels_differ |= a.snippets[i].label != b.snippets[i].label;
        CHECK(a.snippets[i].video->frames == b.snippets[i].video->frames);
        CHECK(a.snippets[i].mat->frames == b.snippets[i].mat->frames);
        CHECK(a.snippets[i].imu->frames == b.snippets[i].imu->frames);
    }
    CHECK(labels_differ);
}

TEST_CASE("config validation") {
    SynthConfig cfg;
    cfg.separability = 1.5;
    CHECK_THROWS_AS(synthesize_dataset(cfg), std::invalid_argument);
    cfg.separability = 0.5;
    cfg.class_balance = 1.0;
    CHECK_THROWS_AS(synthesize_dataset(cfg), std::invalid_argument);
    cfg.class_balance = 0.5;
    cfg.n_subjects = 0;
    CHECK_THROWS_AS(synthesize_dataset(cfg), std::invalid_argument);
}

TEST_CASE("save/load round-trips raw arrays to 9 significant digits") {
    SynthConfig cfg;
    cfg.n_subjects = 1;
    cfg.snippets_per_subject = 2;
    cfg.seed = 3;
    const SynthDataset ds = synthesize_dataset(cfg);
    const fs::path dir = temp_dir("roundtrip");
    save_dataset(ds, dir);

    const DatasetManifest m = load_manifest(dir / "manifest.txt");
    REQUIRE(m.snippets.size() == ds.snippets.size());
    for (std::size_t i = 0; i < ds.snippets.size(); ++i) {
        const Snippet s = load_snippet(m, ds.snippets[i].snippet_id);
        const auto close = [](const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
            return ((x - y).array().abs() <=
                    1e-8 * y.array().abs().max(1.0))
                .all();
        };
        CHECK(close(s.video->frames, ds.snippets[i].video->frames));
        CHECK(close(s.mat->frames, ds.snippets[i].mat->frames));
        CHECK(close(s.imu->frames, ds.snippets[i].imu->frames));
        CHECK(s.label == ds.snippets[i].label);
    }

    // Saving again produces byte-identical files.
    const fs::path dir2 = temp_dir("roundtrip2");
    save_dataset(ds, dir2);
    std::ifstream f1(dir / "data/S001/S001_0000.vid.csv"), f2(dir2 / "data/S001/S001_0000.vid.csv");
    const std::string c1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    const std::string c2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(c1 == c2);
}
