#include <doctest.h>

#include <cmath>

#include "dlrec/encoding.hpp"
#include "dlrec/errors.hpp"
#include "dlrec/rng.hpp"

using namespace dlrec;

namespace {

ComponentSpec cat(const std::string& name, std::vector<std::string> cats, bool multiselect = false) {
  ComponentSpec c;
  c.name = name;
  c.kind = multiselect ? ComponentKind::CategoricalMultiSelect : ComponentKind::CategoricalExclusive;
  c.categories = std::move(cats);
  return c;
}

ComponentSpec range(const std::string& name, double lo, double hi, bool log_scale = false,
                    bool integer = false) {
  ComponentSpec c;
  c.name = name;
  c.kind = integer ? ComponentKind::IntegerRange : ComponentKind::ContinuousRange;
  c.lo = lo;
  c.hi = hi;
  c.log_scale = log_scale;
  return c;
}

}  // namespace

TEST_CASE("schema column rules") {
  const EncodingSchema two(SearchSpace({cat("skip", {"none", "residual"})}));
  CHECK(two.width() == 1);
  CHECK(two.columns()[0].role == ColumnRole::Binary);

  const EncodingSchema s(default_space());
  const auto aug = *default_space().index_of("data_augmentation");
  CHECK(s.span(aug).second == 23);
  const auto bs = *default_space().index_of("batch_size");
  CHECK(s.span(bs).second == 1);
  CHECK(s.columns()[static_cast<std::size_t>(s.span(bs).first)].role == ColumnRole::Numeric);

  Eigen::Index total = 0;
  for (std::size_t i = 0; i < default_space().size(); ++i) {
    CHECK(s.span(i).second >= 1);
    CHECK(s.span(i).first == total);
    total += s.span(i).second;
  }
  CHECK(total == s.width());
  CHECK(EncodingSchema(default_space()).fingerprint() == s.fingerprint());
  CHECK(two.fingerprint() != s.fingerprint());
}

TEST_CASE("encode values") {
  const SearchSpace space({cat("abc", {"A", "B", "C"}), cat("aug", {"mixup", "cutmix", "cutout", "flip"}, true),
                           range("lr", 0.0000025, 4.8, true), range("bs", 32, 8192, false, true)});
  const EncodingSchema schema(space);
  Configuration c{{"abc", Category{"B"}},
                  {"aug", CategorySet{{"mixup", "cutmix"}}},
                  {"lr", 0.001},
                  {"bs", std::int64_t{256}}};
  const auto x = encode(schema, c);
  REQUIRE(x.size() == 7);
  CHECK(x[0] == 1.0);
  CHECK(x.segment(1, 4).sum() == 2.0);
  CHECK(x[1] == 1.0);
  CHECK(x[2] == 1.0);
  // ln(0.001) = -3 ln(10)
  CHECK(std::fabs(x[5] - (-3.0 * 2.302585092994045684)) < 1e-9);
  CHECK(std::fabs(x[5] - (-6.9078)) < 1e-4);
  CHECK(x[6] == 256.0);

  c["abc"] = Category{"D"};
  CHECK_THROWS_AS(encode(schema, c), ValidationError);
  c["abc"] = Category{"A"};
  c.erase("bs");
  CHECK_THROWS_AS(encode(schema, c), ValidationError);
}

TEST_CASE("decode rules") {
  const SearchSpace space({cat("abc", {"A", "B", "C"}), cat("aug", {"p", "q", "r"}, true),
                           range("lr", 0.0000025, 4.8, true), range("bs", 32, 8192, false, true),
                           cat("two", {"off", "on"})});
  const EncodingSchema schema(space);
  Eigen::VectorXd v(7);
  v << 1.4, 0.2, 0.1, 0.3, std::log(0.0000001), 100.6, 0.7;
  const auto c = decode(schema, v);
  CHECK(std::get<Category>(c.at("abc")).label == "B");
  // All-zero after thresholding: the largest column is kept.
  CHECK(std::get<CategorySet>(c.at("aug")).labels == std::set<std::string>{"r"});
  CHECK(std::get<double>(c.at("lr")) == 0.0000025);
  CHECK(std::get<std::int64_t>(c.at("bs")) == 101);
  CHECK(std::get<Category>(c.at("two")).label == "on");

  v[0] = 7.0;
  v[5] = 1e9;
  const auto d = decode(schema, v);
  CHECK(std::get<Category>(d.at("abc")).label == "C");
  CHECK(std::get<std::int64_t>(d.at("bs")) == 8192);

  CHECK_THROWS_AS(decode(schema, Eigen::VectorXd::Zero(3)), ShapeError);
}

TEST_CASE("round trip and injectivity over the default space") {
  const EncodingSchema schema(default_space());
  Rng rng(17);
  std::vector<Eigen::VectorXd> seen;
  std::vector<Configuration> configs;
  for (int i = 0; i < 1000; ++i) {
    const auto c = sample_uniform(default_space(), rng);
    const auto x = encode(schema, c);
    CHECK(x.size() == schema.width());
    CHECK(approx_equal(decode(schema, x), c));
    CHECK(encode(schema, decode(schema, x)).isApprox(x, 1e-14));
    for (std::size_t j = 0; j < seen.size(); ++j) {
      if (seen[j] == x) CHECK(configs[j] == c);
    }
    seen.push_back(x);
    configs.push_back(c);
  }
}

TEST_CASE("unit cube mapping") {
  const EncodingSchema schema(default_space());
  const auto x = encode(schema, sample_uniform(default_space(), 4));
  const auto u = to_unit(schema, x);
  CHECK(u.minCoeff() >= 0.0);
  CHECK(u.maxCoeff() <= 1.0);
  CHECK(from_unit(schema, u).isApprox(x, 1e-12));
}

TEST_CASE("partial records use the fill vector and missing codes") {
  const SearchSpace space({cat("abc", {"A", "B", "C"}), cat("aug", {"p", "q"}, true), range("x", 0, 10)});
  const EncodingSchema schema(space);
  Eigen::VectorXd fill = Eigen::VectorXd::Constant(schema.width(), -1.0);
  fill[3] = 4.0;
  const auto x = encode_partial(schema, {}, fill);
  CHECK(x[0] == 3.0);
  CHECK(x[1] == 0.0);
  CHECK(x[2] == 0.0);
  CHECK(x[3] == 4.0);
}
