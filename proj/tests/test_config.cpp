#include <gtest/gtest.h>

#include <sstream>

#include "stickslip/config.hpp"
#include "stickslip/errors.hpp"

using namespace stickslip;

TEST(KeyValueFile, ParsesCommentsAndWhitespace) {
  std::istringstream in("# model\nmu_s = 0.5\n  k=0.2   # stiffer\n\nlevels = 0.1, 0.2,0.3\nflag = yes\n");
  const auto f = KeyValueFile::parse(in);
  EXPECT_DOUBLE_EQ(f.get_double("mu_s", 0.0), 0.5);
  EXPECT_DOUBLE_EQ(f.get_double("k", 0.0), 0.2);
  EXPECT_EQ(f.get_doubles("levels", {}), (std::vector<double>{0.1, 0.2, 0.3}));
  EXPECT_TRUE(f.get_bool("flag", false));
  EXPECT_EQ(f.get_int("missing", 7), 7);
}

TEST(KeyValueFile, DuplicateKeyAndBadValuesNameTheLine) {
  std::istringstream dup("a = 1\nb = 2\na = 3\n");
  try {
    KeyValueFile::parse(dup, "cfg");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  std::istringstream bad("a = 1\nx = one\n");
  const auto f = KeyValueFile::parse(bad, "cfg");
  try {
    f.get_double("x", 0.0);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  std::istringstream noeq("just words\n");
  EXPECT_THROW(KeyValueFile::parse(noeq), ParseError);
}

TEST(FrictionConfig, OverridesAndAliases) {
  std::istringstream in("mu_s = 0.3\nC_l = 1000\n");
  const FrictionParams p = friction_params_from(KeyValueFile::parse(in));
  EXPECT_DOUBLE_EQ(p.mu_s, 0.3);
  EXPECT_DOUBLE_EQ(p.string_gain, 1000.0);
  EXPECT_DOUBLE_EQ(p.k, 0.1);

  std::istringstream both("C_l = 1\nstring_gain = 2\n");
  EXPECT_THROW(friction_params_from(KeyValueFile::parse(both)), ValidationError);
  std::istringstream unknown("mu = 0.3\n");
  EXPECT_THROW(friction_params_from(KeyValueFile::parse(unknown)), ParseError);
  std::istringstream invalid("k = -2\n");
  EXPECT_THROW(friction_params_from(KeyValueFile::parse(invalid)), InvalidParameter);
}

TEST(FrictionConfig, WriteThenReadRoundTrips) {
  FrictionParams p;
  p.mu_s = 0.123456789;
  p.c = 0.3;
  std::stringstream buf;
  write_friction_params(buf, p);
  const FrictionParams q = friction_params_from(KeyValueFile::parse(buf));
  EXPECT_EQ(q.mu_s, p.mu_s);
  EXPECT_EQ(q.c, p.c);
  EXPECT_EQ(q.string_gain, p.string_gain);
}

TEST(ParseBool, AcceptsCommonSpellings) {
  EXPECT_TRUE(parse_bool("TRUE"));
  EXPECT_FALSE(parse_bool(" off "));
  EXPECT_THROW(parse_bool("maybe"), InvalidParameter);
}
