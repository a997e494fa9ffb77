#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "forestlab/errors.hpp"
#include "forestlab/io.hpp"

using namespace forestlab;

TEST_CASE("format_double is the shortest round-tripping decimal") {
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(12.0) == "12");
    CHECK(format_double(1.0 / 3.0) == "0.3333333333333333");
    CHECK(format_double(0.8660254037844386) == "0.8660254037844386");
    for (double x : {0.1, 1e-17, 3.141592653589793, -2.5e11, 1234.5678901234567}) {
        std::string s = format_double(x);
        CHECK(std::strtod(s.c_str(), nullptr) == x);
    }
}

TEST_CASE("honeycomb matrix carries the exact surd mirror") {
    Matrix h = honeycomb_matrix();
    REQUIRE(h.n() == 2);
    CHECK(h.numeric()(0, 0) == 1.0);
    CHECK(h.numeric()(0, 1) == 0.5);
    CHECK(h.numeric()(1, 0) == 0.0);
    CHECK(format_double(h.numeric()(1, 1)) == "0.8660254037844386");
    CHECK(h.has_exact());
}

TEST_CASE("presets load as forests") {
    Forest square = load_forest("square");
    CHECK(square.k() == 1);
    CHECK(square.dim() == 2);
    Forest pair = load_forest("square-pair");
    CHECK(pair.k() == 2);
    CHECK(pair.grids[1].shift[0] == doctest::Approx(0.5));
    Forest honey = load_forest("honeycomb");
    CHECK(honey.k() == 1);
    CHECK(honey.grids[0].basis.numeric()(1, 1) ==
          doctest::Approx(0.8660254037844386));
    CHECK_THROWS_AS(load_forest("no-such-preset"), ValidationError);
}

TEST_CASE("forest json round trip preserves structure") {
    Forest pair = load_forest("square-pair");
    Json doc = forest_to_json(pair);
    Forest back = parse_forest(doc);
    CHECK(back.k() == pair.k());
    CHECK(back.dim() == pair.dim());
    for (int i = 0; i < pair.k(); ++i) {
        CHECK((back.grids[i].basis.numeric() - pair.grids[i].basis.numeric())
                  .norm() == 0.0);
        CHECK((back.grids[i].shift - pair.grids[i].shift).norm() == 0.0);
    }
}

TEST_CASE("grid documents parse rational strings exactly") {
    Json doc;
    doc["dimension"] = 2;
    doc["grids"] = Json::array();
    Json g;
    g["matrix"] = Json::array({Json::array({"1", "1/2"}), Json::array({"0", "1"})});
    g["translation"] = Json::array({0.25, 0.75});
    doc["grids"].push_back(g);
    Forest f = parse_forest(doc);
    REQUIRE(f.k() == 1);
    const Matrix& m = f.grids[0].basis;
    CHECK(m.has_exact());
    CHECK(m.exact().at(0, 1) == Rational(1, 2));
    CHECK(m.numeric()(0, 1) == 0.5);
    CHECK(f.grids[0].shift[1] == 0.75);
}

TEST_CASE("grid documents reject dimension mismatches and bad shapes") {
    Json doc;
    doc["dimension"] = 3;
    doc["grids"] = Json::array();
    Json g;
    g["matrix"] = Json::array({Json::array({1, 0}), Json::array({0, 1})});
    doc["grids"].push_back(g);
    CHECK_THROWS_AS(parse_forest(doc), ValidationError);
    Json empty;
    empty["grids"] = Json::array();
    CHECK_THROWS_AS(parse_forest(empty), ValidationError);
}

TEST_CASE("verdict json carries the witness only when defeated") {
    std::vector<Matrix> mats{Matrix::identity(2), Matrix::identity(2)};
    auto verdict = dense_forest_check(mats, 50, 1e-9);
    Json j = verdict_to_json(verdict);
    CHECK(j["status"] == "not-dense-forest");
    CHECK(j.contains("witnesses"));
    CHECK(j.contains("common_direction"));
    CHECK(j["exact"] == true);

    std::vector<Matrix> good{Matrix::identity(2),
                             Matrix::rotation2d(std::atan(1.0 / std::numbers::e))};
    auto open = dense_forest_check(good, 30, 1e-9);
    Json j2 = verdict_to_json(open);
    CHECK(j2["status"] == "no-obstruction-up-to");
    CHECK_FALSE(j2.contains("witnesses"));
    CHECK(j2["height"] == 30);
}

TEST_CASE("filling json distinguishes finite from infinite") {
    Eigen::VectorXd e2(2);
    e2 << 0.0, 1.0;
    auto inf = filling_time(e2, 0.25);
    Json ji = filling_to_json(inf);
    CHECK(ji["infinite"] == true);
    CHECK_FALSE(ji.contains("value"));
    CHECK(ji.contains("obstruction"));

    Eigen::VectorXd diag(2);
    diag << 1.0, 1.0;
    auto fin = filling_time(diag.normalized(), 0.3);
    Json jf = filling_to_json(fin);
    CHECK(jf["infinite"] == false);
    CHECK(jf.contains("value"));
}

TEST_CASE("manifest parsing applies defaults and round trips") {
    Json doc;
    doc["d"] = 1;
    doc["k"] = 3;
    doc["levels"] = Json::array({2, 3, 4, 5});
    doc["samples"] = 2;
    auto m = parse_manifest(doc);
    CHECK(m.d == 1);
    CHECK(m.k == 3);
    CHECK(m.samples == 2);
    CHECK(m.anchors == 8);
    CHECK(m.seed == 1);
    CHECK(m.mode == "rotations");
    Json again = manifest_to_json(m);
    CHECK(again["lambda_resolved"] ==
          doctest::Approx(sigma_exponent(1, 3) + 0.5));
    auto m2 = parse_manifest(again);
    CHECK(m2.levels == m.levels);
    CHECK(m2.direction_budget == m.direction_budget);
}

TEST_CASE("experiment csv starts with the manifest comment and header") {
    ExperimentManifest m;
    m.d = 1;
    m.k = 3;
    m.levels = {2, 3, 4, 5};
    m.samples = 1;
    m.anchors = 4;
    m.direction_budget = 8;
    auto res = run_experiment(m);
    std::string csv = experiment_csv(res);
    CHECK(csv.rfind("# ", 0) == 0);
    auto nl = csv.find('\n');
    REQUIRE(nl != std::string::npos);
    std::string header = csv.substr(nl + 1, csv.find('\n', nl + 1) - nl - 1);
    CHECK(header.rfind("sample_id,level,epsilon,v_hat,blocked", 0) == 0);
    // One data line per sample and level.
    int lines = 0;
    for (char c : csv) lines += c == '\n';
    CHECK(lines >= 2 + 4);
}

TEST_CASE("persist writes both artifacts") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "forestlab-io-test";
    fs::remove_all(dir);
    ExperimentManifest m;
    m.d = 1;
    m.k = 3;
    m.levels = {2, 3};
    m.samples = 1;
    m.anchors = 4;
    m.direction_budget = 8;
    m.out_dir = dir.string();
    auto res = run_experiment(m);
    CHECK(fs::exists(dir / "raw.csv"));
    CHECK(fs::exists(dir / "summary.json"));
    Json summary = read_json_file((dir / "summary.json").string());
    CHECK(summary.contains("manifest"));
    CHECK(summary.contains("samples"));
    fs::remove_all(dir);
}

TEST_CASE("read_json_file raises on missing or malformed input") {
    CHECK_THROWS_AS(read_json_file("/nonexistent/nowhere.json"), ValidationError);
    namespace fs = std::filesystem;
    fs::path p = fs::temp_directory_path() / "forestlab-bad.json";
    std::ofstream(p) << "{ not json";
    CHECK_THROWS_AS(read_json_file(p.string()), ValidationError);
    fs::remove(p);
}
