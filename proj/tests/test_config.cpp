#include <gtest/gtest.h>

#include <sstream>

#include "bivop/config.hpp"

using namespace bivop;

namespace {

ExperimentConfig parse(const std::string& text) {
    std::istringstream is(text);
    return parse_config(is);
}

}  // namespace

TEST(Config, DefaultsWhenEmpty) {
    const ExperimentConfig c = parse("");
    const ExperimentConfig d;
    EXPECT_EQ(c.dims, d.dims);
    EXPECT_EQ(c.seed, d.seed);
    EXPECT_EQ(c.trials, d.trials);
}

TEST(Config, ParsesSectionsAndLists) {
    const ExperimentConfig c = parse(
        "; comment\n"
        "[run]\nseed = 99\ntolerance = 1e-9\nthreads = 2\nout = results\n"
        "[scan]\ndims = 2, 3,5\nps = 1, 2.5, inf\nsigmas = 0.5\ntrials = 7\n"
        "[search]\np = inf\ndims = 4\nrestarts = 3\n"
        "[converge]\nk_max = 30\n");
    EXPECT_EQ(c.seed, 99u);
    EXPECT_EQ(c.tolerance, 1e-9);
    EXPECT_EQ(c.threads, 2);
    EXPECT_EQ(c.out, "results");
    EXPECT_EQ(c.dims, (std::vector<int>{2, 3, 5}));
    ASSERT_EQ(c.ps.size(), 3u);
    EXPECT_TRUE(std::isinf(c.ps[2]));
    EXPECT_EQ(c.sigmas, (std::vector<double>{0.5}));
    EXPECT_EQ(c.trials, 7);
    EXPECT_TRUE(std::isinf(c.search.p));
    EXPECT_EQ(c.search.restarts, 3);
    EXPECT_EQ(c.converge.k_max, 30);
}

TEST(Config, RejectsUnknownKeysAndBadValues) {
    EXPECT_THROW(parse("[scan]\nfoo = 1\n"), ConfigError);
    EXPECT_THROW(parse("[scan]\ntrials = three\n"), ConfigError);
    EXPECT_THROW(parse("[scan]\ntrials = 0\n"), ConfigError);
    EXPECT_THROW(parse("[scan]\nps = 0.5\n"), ConfigError);
    EXPECT_THROW(parse("[scan]\ndims = 1\n"), ConfigError);
    EXPECT_THROW(parse("[search]\np = 1.5\n"), ConfigError);
    EXPECT_THROW(parse("seed = 3\n"), ConfigError);
}

TEST(Config, SyntaxErrorCarriesLineNumber) {
    try {
        parse("[run]\nseed = 1\nthis line has no equals sign\n");
        FAIL();
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 3u);
    }
}

TEST(Config, CanonicalTextRoundTripsAndHashesStably) {
    ExperimentConfig c;
    c.seed = 123;
    c.ps = {1.0, kInf};
    c.scale = 0.37;
    const std::string text = canonical_config_text(c);
    const ExperimentConfig back = parse(text);
    EXPECT_EQ(canonical_config_text(back), text);
    EXPECT_EQ(config_hash(back), config_hash(c));
    c.seed = 124;
    EXPECT_NE(config_hash(c), config_hash(back));
}

TEST(Config, FnvReferenceValues) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
    EXPECT_EQ(fnv1a_hex("foobar"), "85944171f73967e8");
}
