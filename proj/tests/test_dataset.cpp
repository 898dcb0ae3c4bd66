#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "dlrec/dataset.hpp"
#include "dlrec/errors.hpp"
#include "dlrec/pipeline.hpp"
#include "oracles.hpp"

using namespace dlrec;
namespace fs = std::filesystem;

namespace {

std::string write_temp(const std::string& name, const std::string& text) {
  const auto path = fs::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path.string();
}

SearchSpace small_space() {
  ComponentSpec init;
  init.name = "initialization";
  init.kind = ComponentKind::CategoricalExclusive;
  init.categories = {"Kaiming", "Xavier", "Zero"};
  ComponentSpec epochs;
  epochs.name = "epochs";
  epochs.kind = ComponentKind::IntegerRange;
  epochs.lo = 20;
  epochs.hi = 5000;
  epochs.aliases = {"Epochs"};
  ComponentSpec bs;
  bs.name = "batch_size";
  bs.kind = ComponentKind::IntegerRange;
  bs.lo = 32;
  bs.hi = 8192;
  ComponentSpec aug;
  aug.name = "data_augmentation";
  aug.kind = ComponentKind::CategoricalMultiSelect;
  aug.categories = {"mixup", "cutmix", "flip"};
  return SearchSpace({init, epochs, bs, aug});
}

}  // namespace

TEST_CASE("load_csv reads records") {
  const auto path = write_temp("dlrec_ds1.csv",
                               "epochs,batch_size,initialization,data_augmentation,top1_accuracy,source_id,notes\n"
                               "300,256,Kaiming,mixup;cutmix,78.32,resnet50,x\n"
                               "100,64,,flip,70.5,\"a, b\",y\n");
  std::vector<std::string> ignored;
  const auto ds = load_csv(path, small_space(), &ignored);
  REQUIRE(ds.records.size() == 2);
  CHECK(ignored == std::vector<std::string>{"notes"});
  const auto& r0 = ds.records[0];
  CHECK(std::get<std::int64_t>(r0.values.at("epochs")) == 300);
  CHECK(std::get<std::int64_t>(r0.values.at("batch_size")) == 256);
  CHECK(r0.top1_accuracy == 78.32);
  CHECK(r0.source_id == "resnet50");
  CHECK(std::get<CategorySet>(r0.values.at("data_augmentation")).labels.size() == 2);
  CHECK_FALSE(ds.records[1].values.count("initialization"));
  CHECK(ds.records[1].source_id == "a, b");
}

TEST_CASE("load_csv errors name the row") {
  const auto space = small_space();
  const auto bad = write_temp("dlrec_ds2.csv", "epochs,top1_accuracy\n300,78\n300,182\n");
  try {
    load_csv(bad, space);
    FAIL("expected an error");
  } catch (const IoError& e) {
    CHECK(std::string(e.what()).find("row 2") != std::string::npos);
  }
  CHECK_THROWS_AS(load_csv(write_temp("dlrec_ds3.csv", "epochs\n300\n"), space), IoError);
  CHECK_THROWS_AS(load_csv(write_temp("dlrec_ds4.csv", "epochs,top1_accuracy\n99999,50\n"), space), IoError);
  CHECK_THROWS_AS(load_csv(write_temp("dlrec_ds5.csv", "epochs,top1_accuracy\n300\n"), space), IoError);
  CHECK_THROWS_AS(load_csv((fs::temp_directory_path() / "dlrec_absent.csv").string(), space), IoError);
}

TEST_CASE("aliases are accepted as headers") {
  const auto ds = load_csv(write_temp("dlrec_ds6.csv", "Epochs,top1_accuracy\n300,78\n"), small_space());
  CHECK(std::get<std::int64_t>(ds.records[0].values.at("epochs")) == 300);
}

TEST_CASE("to_matrix shape, determinism and median imputation") {
  const auto space = small_space();
  const auto path = write_temp("dlrec_ds7.csv",
                               "epochs,batch_size,top1_accuracy\n"
                               "100,,50\n"
                               "40,64,60\n"
                               "100,,50\n"
                               "500,512,70\n"
                               "20,128,65\n");
  const auto ds = load_csv(path, space);
  const EncodingSchema schema(space);
  const auto [X, y] = to_matrix(ds, schema);
  CHECK(X.rows() == 5);
  CHECK(X.cols() == schema.width());
  CHECK(X.row(0) == X.row(2));
  CHECK(y[3] == 70.0);
  const auto bs_col = schema.span(*space.index_of("batch_size")).first;
  // Median of the observed {64, 512, 128}, computed by sort.
  CHECK(X(0, bs_col) == oracle::median({64.0, 512.0, 128.0}));
  CHECK(X(1, bs_col) == 64.0);
  const auto init_col = schema.span(*space.index_of("initialization")).first;
  CHECK(X(0, init_col) == 3.0);

  // No observed values at all: midpoint of the bounds.
  const auto none = load_csv(write_temp("dlrec_ds8.csv", "epochs,top1_accuracy\n100,50\n"), space);
  const auto [X2, y2] = to_matrix(none, schema);
  CHECK(X2(0, bs_col) == (32.0 + 8192.0) / 2.0);
}

TEST_CASE("split") {
  TabularDataset ds{small_space(), {}};
  for (int i = 0; i < 10; ++i) {
    ModelRecord r;
    r.top1_accuracy = i;
    r.source_id = std::to_string(i);
    ds.records.push_back(r);
  }
  const auto [a, b] = split(ds, 0.8, 3);
  CHECK(a.records.size() == 8);
  CHECK(b.records.size() == 2);
  const auto [a2, b2] = split(ds, 0.8, 3);
  std::vector<std::string> ids, ids2;
  for (const auto& r : a.records) ids.push_back(r.source_id);
  for (const auto& r : a2.records) ids2.push_back(r.source_id);
  CHECK(ids == ids2);
  for (const auto& r : b.records) ids.push_back(r.source_id);
  std::sort(ids.begin(), ids.end());
  std::vector<std::string> all;
  for (int i = 0; i < 10; ++i) all.push_back(std::to_string(i));
  std::sort(all.begin(), all.end());
  CHECK(ids == all);
  CHECK_THROWS_AS(split(ds, 1.0, 0), ValidationError);
  CHECK_THROWS_AS(split(ds, 0.0, 0), ValidationError);
}

TEST_CASE("save then load is row-equivalent") {
  const auto ds = make_synthetic_dataset(30, 5);
  const auto path = (fs::temp_directory_path() / "dlrec_ds_rt.csv").string();
  save_csv(ds, path);
  const auto back = load_csv(path, default_space());
  REQUIRE(back.records.size() == ds.records.size());
  for (std::size_t i = 0; i < ds.records.size(); ++i) {
    CHECK(back.records[i].values == ds.records[i].values);
    CHECK(back.records[i].top1_accuracy == ds.records[i].top1_accuracy);
    CHECK(back.records[i].source_id == ds.records[i].source_id);
  }
}

TEST_CASE("dataset modes") {
  const auto ds = load_csv(write_temp("dlrec_ds9.csv",
                                      "initialization,epochs,data_augmentation,top1_accuracy\n"
                                      "Xavier,40,flip,50\nKaiming,300,mixup,50\nXavier,100,flip,50\n"
                                      "Kaiming,,mixup,50\n"),
                           small_space());
  const auto modes = dataset_modes(ds);
  // Tie between Kaiming and Xavier goes to the earlier category.
  CHECK(std::get<Category>(modes.at("initialization")).label == "Kaiming");
  CHECK(std::get<std::int64_t>(modes.at("epochs")) == 100);
  // Tied sets resolve to the smaller text form.
  CHECK(std::get<CategorySet>(modes.at("data_augmentation")).labels == std::set<std::string>{"flip"});
  // Never observed: range midpoint.
  CHECK(std::get<std::int64_t>(modes.at("batch_size")) == (32 + 8192) / 2);
  CHECK(validate(ds.space, modes).pass);
}
