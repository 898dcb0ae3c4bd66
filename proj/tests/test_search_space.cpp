#include <doctest.h>

#include <cstdio>
#include <filesystem>

#include "dlrec/errors.hpp"
#include "dlrec/rng.hpp"
#include "dlrec/search_space.hpp"

using namespace dlrec;

namespace {

ComponentSpec exclusive(const std::string& name, std::vector<std::string> cats) {
  ComponentSpec c;
  c.name = name;
  c.dimension = Dimension::ModelArchitecture;
  c.kind = ComponentKind::CategoricalExclusive;
  c.categories = std::move(cats);
  return c;
}

ComponentSpec multi(const std::string& name, std::vector<std::string> cats) {
  auto c = exclusive(name, std::move(cats));
  c.kind = ComponentKind::CategoricalMultiSelect;
  return c;
}

Configuration valid_default(std::uint64_t seed = 3) { return sample_uniform(default_space(), seed); }

}  // namespace

TEST_CASE("default space mirrors the component table") {
  const auto& s = default_space();
  CHECK(s.size() == 27);
  CHECK(s.at("batch_size").lo == 32);
  CHECK(s.at("batch_size").hi == 8192);
  CHECK(s.at("batch_size").kind == ComponentKind::IntegerRange);
  CHECK(s.at("learning_rate").lo == doctest::Approx(0.0000025));
  CHECK(s.at("learning_rate").hi == 4.8);
  CHECK(s.at("learning_rate").log_scale);
  CHECK(s.at("epochs").lo == 20);
  CHECK(s.at("epochs").hi == 5000);
  CHECK(s.at("epochs").kind == ComponentKind::IntegerRange);
  CHECK(s.at("size_of_parameter").lo == doctest::Approx(0.18));
  CHECK(s.at("size_of_parameter").hi == 632);
  CHECK(s.at("gpu_count").kind == ComponentKind::IntegerRange);
  CHECK(s.at("data_augmentation").categories.size() == 23);
  CHECK(s.at("data_augmentation").kind == ComponentKind::CategoricalMultiSelect);
  CHECK_FALSE(s.at("cosine_similarity").searchable);
  CHECK(s.at("cosine_similarity").kind == ComponentKind::ContinuousRange);
  CHECK(s.at("framework").dimension == Dimension::Framework);
  CHECK(s.at("gpu_type").dimension == Dimension::Hardware);
  CHECK(s.at("size_of_training_set").dimension == Dimension::Data);
}

TEST_CASE("space construction rejects malformed components") {
  CHECK_THROWS_AS(SearchSpace({exclusive("a", {"x"}), exclusive("a", {"y"})}), ValidationError);
  CHECK_THROWS_AS(SearchSpace({exclusive("a", {})}), ValidationError);
  CHECK_THROWS_AS(SearchSpace({exclusive("a", {"x", "x"})}), ValidationError);
  ComponentSpec r;
  r.name = "r";
  r.kind = ComponentKind::ContinuousRange;
  r.lo = 2.0;
  r.hi = 1.0;
  CHECK_THROWS_AS(SearchSpace({r}), ValidationError);
  r.lo = 0.0;
  r.hi = 1.0;
  r.log_scale = true;
  CHECK_THROWS_AS(SearchSpace({r}), ValidationError);
}

TEST_CASE("validate") {
  auto c = valid_default();
  SUBCASE("batch size 64 passes") {
    c["batch_size"] = std::int64_t{64};
    CHECK(validate(default_space(), c).pass);
  }
  SUBCASE("learning rate 10 fails on learning_rate") {
    c["learning_rate"] = 10.0;
    const auto r = validate(default_space(), c);
    CHECK_FALSE(r.pass);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].component == "learning_rate");
  }
  SUBCASE("missing epochs fails") {
    c.erase("epochs");
    const auto r = validate(default_space(), c);
    CHECK_FALSE(r.pass);
    REQUIRE(r.violations.size() == 1);
    CHECK(r.violations[0].component == "epochs");
  }
  SUBCASE("wrong kind, unknown label, empty set, unknown component") {
    c["epochs"] = 3.5;
    c["framework"] = Category{"Caffe9"};
    c["data_augmentation"] = CategorySet{};
    c["colour"] = Category{"red"};
    const auto r = validate(default_space(), c);
    CHECK_FALSE(r.pass);
    CHECK(r.violations.size() == 4);
  }
}

TEST_CASE("sample_uniform") {
  SUBCASE("same seed gives the same configuration") {
    CHECK(sample_uniform(default_space(), 42) == sample_uniform(default_space(), 42));
    CHECK_FALSE(sample_uniform(default_space(), 42) == sample_uniform(default_space(), 43));
  }
  SUBCASE("two-category frequencies stay within the binomial band") {
    const SearchSpace s({exclusive("coin", {"a", "b"})});
    Rng rng(7);
    int a = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) a += std::get<Category>(sample_uniform(s, rng).at("coin")).label == "a";
    const double f = static_cast<double>(a) / n;
    CHECK(f >= 0.47);
    CHECK(f <= 0.53);
  }
  SUBCASE("multi-select never yields the empty set") {
    const SearchSpace s({multi("m", {"a", "b", "c"})});
    Rng rng(1);
    for (int i = 0; i < 5000; ++i) CHECK_FALSE(std::get<CategorySet>(sample_uniform(s, rng).at("m")).labels.empty());
  }
  SUBCASE("samples validate for 1000 seeds") {
    int failures = 0;
    for (std::uint64_t seed = 0; seed < 1000; ++seed) failures += !validate(default_space(), sample_uniform(default_space(), seed)).pass;
    CHECK(failures == 0);
  }
  SUBCASE("log-scale sampling is uniform in log space") {
    Rng rng(5);
    const auto& spec = default_space().at("learning_rate");
    const double mid = std::sqrt(spec.lo * spec.hi);
    int below = 0;
    const int n = 10000;
    for (int i = 0; i < n; ++i) below += std::get<double>(sample_value(spec, rng)) < mid;
    CHECK(below > 0.47 * n);
    CHECK(below < 0.53 * n);
  }
}

TEST_CASE("restrict_space") {
  const auto& s = default_space();
  const auto base = valid_default(9);
  SUBCASE("three free components") {
    const std::set<std::string> free = {"epochs", "batch_size", "data_augmentation"};
    Configuration fixed;
    for (const auto& [k, v] : base)
      if (!free.count(k)) fixed.emplace(k, v);
    const auto r = restrict_space(s, free, fixed);
    CHECK(r.free.size() == 3);
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
      const auto full = r.complete(sample_uniform(r.free, rng));
      CHECK(validate(s, full).pass);
      for (const auto& [k, v] : fixed) CHECK(full.at(k) == v);
    }
  }
  SUBCASE("all free is the identity") {
    std::set<std::string> free;
    for (const auto& c : s.components()) free.insert(c.name);
    CHECK(restrict_space(s, free, {}).free == s);
  }
  SUBCASE("overlap is rejected") {
    std::set<std::string> free;
    for (const auto& c : s.components()) free.insert(c.name);
    CHECK_THROWS_AS(restrict_space(s, free, {{"epochs", base.at("epochs")}}), ValidationError);
  }
  SUBCASE("uncovered component is rejected") {
    CHECK_THROWS_AS(restrict_space(s, {"epochs"}, {}), ValidationError);
  }
}

TEST_CASE("space file round trip") {
  const auto path = std::filesystem::temp_directory_path() / "dlrec_space_rt.json";
  save_space(default_space(), path.string());
  CHECK(load_space(path.string()) == default_space());
  CHECK(space_from_json(space_to_json(default_space())) == default_space());
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_space(path.string()), IoError);
}

TEST_CASE("value text form") {
  const auto& s = default_space();
  const auto v = parse_value(s.at("data_augmentation"), " mixup;cutmix ");
  CHECK(std::get<CategorySet>(v).labels == std::set<std::string>{"mixup", "cutmix"});
  CHECK(format_value(v) == "cutmix;mixup");
  CHECK(std::get<std::int64_t>(parse_value(s.at("epochs"), "300")) == 300);
  CHECK(std::get<double>(parse_value(s.at("learning_rate"), "0.001")) == 0.001);
  CHECK_THROWS_AS(parse_value(s.at("epochs"), "3.5"), ValidationError);
  CHECK(std::get<double>(parse_value(s.at("learning_rate"), format_value(0.1 + 0.2))) == 0.1 + 0.2);
}

TEST_CASE("config JSON round trip") {
  const auto c = valid_default(11);
  CHECK(config_from_json(default_space(), config_to_json(c)) == c);
}
