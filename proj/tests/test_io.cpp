#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "boxfollow/config.hpp"
#include "boxfollow/family_io.hpp"
#include "boxfollow/manifest.hpp"

using namespace boxfollow;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("boxfollow_io_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

CoveringFamily sample_family() {
  const FunctionMap map(2, [](std::span<const double> x, double a, std::span<double> y) {
    y[0] = 1 - a * x[0] * x[0] + x[1];
    y[1] = 0.3 * x[0];
  });
  SamplerSpec s;
  s.points_per_axis = 2;
  auto f = compute_attractor(BoxTree::create_root({-2, -0.5}, {2, 0.5}), map, 1.4, 9, s);
  f.provenance = Provenance{1.0 / 3.0, 4};
  return f;
}

std::string expect_validation(const std::function<void()>& body) {
  try {
    body();
  } catch (const ValidationError& e) {
    return e.what();
  }
  ADD_FAILURE() << "no ValidationError";
  return {};
}

json lorenz_json() {
  return json::parse(R"({
    "model": {"name": "lorenz", "params": {"rho": 28}},
    "lambda": 2.6666666666666665,
    "T": 0.05,
    "domain": {"lower": [-30, -30, -13], "upper": [30, 30, 67]},
    "depth": 6,
    "sampler": {"strategy": "grid", "points_per_axis": 2},
    "schedule": {"lambda0": 2.6666666666666665, "step": -0.1, "count": 2, "K_policy": "fixed", "K": 3},
    "analysis": {"lifetime": {"center": [0, 0, 27], "radius": 1.5}},
    "output": "somewhere"
  })");
}

}  // namespace

TEST(DoubleText, ShortestRoundTrip) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  for (int i = 0; i < 2000; ++i) {
    const double v = u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20);
    EXPECT_EQ(parse_double(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(8.0 / 3.0), "2.6666666666666665");
  EXPECT_THROW(parse_double("1.5x"), ValidationError);
}

TEST(FamilyFile, RoundTripIsExact) {
  const auto f = sample_family();
  std::stringstream ss;
  write_family(ss, f);
  const auto g = read_family(ss);
  EXPECT_EQ(g.tree, f.tree);
  EXPECT_EQ(g.lambda, f.lambda);
  ASSERT_TRUE(g.provenance.has_value());
  EXPECT_EQ(g.provenance->parent_lambda, 1.0 / 3.0);
  EXPECT_EQ(g.provenance->reuse_depth, 4);
  std::stringstream again;
  write_family(again, g);
  EXPECT_EQ(again.str(), ss.str());
}

TEST(FamilyFile, SaveAndLoad) {
  const auto dir = scratch_dir("save");
  const auto f = sample_family();
  save_family(dir / family_filename(3), f);
  EXPECT_TRUE(fs::exists(dir / "family_00003.bft"));
  EXPECT_EQ(load_family(dir / "family_00003.bft").tree, f.tree);
  EXPECT_THROW(load_family(dir / "missing.bft"), std::exception);
}

TEST(FamilyFile, RejectsGarbage) {
  std::stringstream bad("not-a-family 1\n");
  EXPECT_THROW(read_family(bad), ValidationError);
  std::stringstream truncated;
  write_family(truncated, sample_family());
  std::string s = truncated.str();
  s.resize(s.size() / 2);
  std::stringstream half(s);
  EXPECT_THROW(read_family(half), ValidationError);
}

TEST(Csv, DepthZeroIsTheDomain) {
  const auto tree = BoxTree::create_root({-30, -30, -13}, {30, 30, 67});
  std::stringstream ss;
  write_boxes_csv(ss, tree, 0);
  EXPECT_EQ(ss.str(), "depth,center_1,center_2,center_3,radius_1,radius_2,radius_3\n0,0,0,27,30,30,40\n");
}

TEST(Csv, RowsFollowSnapshotAndCarryLifetime) {
  auto tree = BoxTree::create_root({0}, {1});
  tree.set_snapshot(1, {0, 1});
  tree.set_snapshot(2, {1, 2});
  std::stringstream ss;
  const std::vector<double> life{3.5, 300};
  write_boxes_csv(ss, tree, 2, life);
  EXPECT_EQ(ss.str(), "depth,center_1,radius_1,lifetime\n2,0.375,0.125,3.5\n2,0.625,0.125,300\n");
}

TEST(Csv, ParsesBackToTheSameBoxes) {
  const auto f = sample_family();
  std::stringstream ss;
  write_boxes_csv(ss, f.tree, 9);
  std::string line;
  std::getline(ss, line);
  std::size_t i = 0;
  const auto boxes = f.tree.boxes(9);
  while (std::getline(ss, line)) {
    std::stringstream row(line);
    std::string cell;
    std::vector<double> v;
    while (std::getline(row, cell, ',')) v.push_back(parse_double(cell));
    ASSERT_EQ(v.size(), 5u);
    EXPECT_EQ(v[1], boxes[i].center[0]);
    EXPECT_EQ(v[2], boxes[i].center[1]);
    EXPECT_EQ(v[3], boxes[i].radius[0]);
    ++i;
  }
  EXPECT_EQ(i, boxes.size());
}

TEST(Csv, UnknownFormat) {
  EXPECT_EQ(parse_export_format("csv"), ExportFormat::kCsv);
  EXPECT_NE(expect_validation([] { parse_export_format("hdf5"); }).find("supported: csv"),
            std::string::npos);
}

TEST(Config, ParsesAndEchoesExactly) {
  const auto c = parse_config(lorenz_json());
  EXPECT_EQ(c.model.name, "lorenz");
  EXPECT_EQ(c.lower.size(), 3u);
  EXPECT_EQ(c.T, 0.05);
  ASSERT_TRUE(c.schedule.has_value());
  EXPECT_EQ(c.schedule->policy.K, 3);
  const json echo = to_json(c);
  EXPECT_EQ(to_json(parse_config(echo)), echo);
  EXPECT_EQ(config_hash(to_json(parse_config(echo))), config_hash(echo));
}

TEST(Config, DefaultsComeFromTheModel) {
  json j = {{"model", {{"name", "waleffe4"}}},
            {"domain", {{"lower", {-1, -1, -1, -1}}, {"upper", {1, 1, 1, 1}}}}};
  EXPECT_EQ(expect_validation([&] { parse_config(j); }), "depth: required");
  j["depth"] = 3;
  const auto c = parse_config(j);
  EXPECT_EQ(c.lambda, 400.0);
  EXPECT_EQ(c.T, 20.0);
  const auto s = build_system(c);
  EXPECT_EQ(s.lambda_name(), "R");
}

TEST(Config, ErrorsNameTheField) {
  auto with = [](const std::function<void(json&)>& edit) {
    json j = lorenz_json();
    edit(j);
    return expect_validation([&] { parse_config(j); });
  };
  EXPECT_NE(with([](json& j) { j["schedule"]["step"] = 0; }).find("schedule.step"), std::string::npos);
  EXPECT_NE(with([](json& j) { j["schedule"]["stepp"] = 1; }).find("schedule.stepp: unknown field"),
            std::string::npos);
  EXPECT_NE(with([](json& j) { j["depth"] = 99; }).find("depth"), std::string::npos);
  EXPECT_NE(with([](json& j) { j["T"] = -1; }).find("T: must be positive"), std::string::npos);
  EXPECT_NE(with([](json& j) { j["model"]["name"] = "rossler"; }).find("model.name"), std::string::npos);
  EXPECT_NE(with([](json& j) { j["model"]["params"]["gamma"] = 1; }).find("model.params.gamma"),
            std::string::npos);
  EXPECT_NE(with([](json& j) { j["domain"]["upper"] = {30, 30}; }).find("domain"), std::string::npos);
  EXPECT_NE(with([](json& j) { j["sampler"]["strategy"] = "sobol"; }).find("sampler.strategy"),
            std::string::npos);
  EXPECT_NE(with([](json& j) { j["analysis"]["lifetime"]["center"] = {0, 0}; })
                .find("analysis.lifetime.center"),
            std::string::npos);
  EXPECT_NE(with([](json& j) { j["schedule"]["K"] = 7; }).find("schedule.K"), std::string::npos);
  EXPECT_NE(with([](json& j) { j["lambda"] = "two"; }).find("lambda: expected a number"),
            std::string::npos);
}

TEST(Config, LoadFromFile) {
  const auto dir = scratch_dir("config");
  std::ofstream(dir / "c.json") << lorenz_json().dump();
  EXPECT_EQ(load_config(dir / "c.json").depth, 6);
  std::ofstream(dir / "broken.json") << "{\"model\": ";
  EXPECT_THROW(load_config(dir / "broken.json"), ValidationError);
  EXPECT_THROW(load_config(dir / "absent.json"), ValidationError);
}

TEST(Manifest, TornLastLineIsIgnored) {
  const auto dir = scratch_dir("manifest");
  {
    ManifestWriter w(dir / "m.jsonl");
    w.write(header_record("follow", "abc", false));
    w.write(end_record("ok", "", 1.5));
  }
  std::ofstream(dir / "m.jsonl", std::ios::app) << "{\"record\": \"fam";
  const auto recs = read_manifest(dir / "m.jsonl");
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0]["record"], "header");
  EXPECT_EQ(recs[0]["config_hash"], "abc");
  EXPECT_EQ(recs[1]["last_good_lambda"], 1.5);
}

TEST(Manifest, FamilyRecordMatchesFamily) {
  const auto f = sample_family();
  StepDiagnostics d;
  d.index = 2;
  d.lambda = f.lambda;
  d.K = 4;
  d.box_counts = f.box_counts();
  d.map_evaluations = f.map_evaluations();
  const json r = family_record(d, f, family_filename(2));
  EXPECT_EQ(r["record"], "family");
  EXPECT_EQ(r["index"], 2);
  EXPECT_EQ(r["file"], "family_00002.bft");
  EXPECT_EQ(r["box_counts"].get<std::vector<std::size_t>>(), f.box_counts());
}

TEST(Manifest, HashIsStableAndSensitive) {
  const json a = to_json(parse_config(lorenz_json()));
  json b = a;
  b["depth"] = 7;
  EXPECT_EQ(config_hash(a), config_hash(a));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_NE(config_hash(a), config_hash(b));
}
