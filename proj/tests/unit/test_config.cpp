#include <gtest/gtest.h>

#include <cstdlib>

#include "fixtures.hpp"
#include "srp/config.hpp"
#include "srp/error.hpp"

namespace srp {
namespace {

struct ScopedEnv {
    ScopedEnv(const char* name, const char* value) : name(name) { ::setenv(name, value, 1); }
    ~ScopedEnv() { ::unsetenv(name); }
    const char* name;
};

TEST(ConfigFile, ParsesKeyValueLines) {
    const auto c = ConfigFile::parse("# comment\n\n  a.b = 1 \nname=  two words  \nempty =\n");
    EXPECT_EQ(c.get("a.b"), "1");
    EXPECT_EQ(c.get("name"), "two words");
    EXPECT_EQ(c.get("empty"), "");
    EXPECT_FALSE(c.get("missing").has_value());
    EXPECT_EQ(c.get_or("missing", "x"), "x");
    EXPECT_EQ(c.values().size(), 3u);
}

TEST(ConfigFile, MalformedLinesReportLineNumber) {
    try {
        ConfigFile::parse("a = 1\nno equals sign\n");
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 2u);
    }
    EXPECT_THROW(ConfigFile::parse(" = value\n"), ParseError);
    EXPECT_THROW(ConfigFile::load("/nonexistent/srp.conf"), ConfigError);
}

TEST(ConfigFile, EnvironmentOverridesFile) {
    auto c = ConfigFile::parse("llm.model = from-file\nsrp.max_reflections = 3\n");
    {
        ScopedEnv env("SRP_LLM_MODEL", "from-env");
        EXPECT_EQ(c.get("llm.model"), "from-env");
    }
    EXPECT_EQ(c.get("llm.model"), "from-file");
    ScopedEnv env("SRP_SRP_MAX_REFLECTIONS", "7");
    EXPECT_EQ(srp_config_from(c).max_reflections, 7u);
}

TEST(ConfigFile, NumericValidation) {
    const auto c = ConfigFile::parse("n = 12\nneg = -1\ntext = 12abc\nd = 0.25\nbad_d = x\n");
    EXPECT_EQ(c.get_size("n", 0), 12u);
    EXPECT_EQ(c.get_size("missing", 5), 5u);
    EXPECT_THROW(c.get_size("neg", 0), ConfigError);
    EXPECT_THROW(c.get_size("text", 0), ConfigError);
    EXPECT_DOUBLE_EQ(c.get_double("d", 0.0), 0.25);
    EXPECT_THROW(c.get_double("bad_d", 0.0), ConfigError);
}

TEST(ConfigFile, PathsResolveAgainstFileDirectory) {
    const auto c = ConfigFile::parse("rel = graph.tsv\nabs = /tmp/x.tsv\n", "/data/toy");
    EXPECT_EQ(c.get_path("rel"), std::filesystem::path("/data/toy/graph.tsv"));
    EXPECT_EQ(c.get_path("abs"), std::filesystem::path("/tmp/x.tsv"));
    EXPECT_FALSE(c.get_path("missing").has_value());
}

TEST(ConfigFile, SetOverridesValue) {
    auto c = ConfigFile::parse("srp.ablate = no-reflection\n");
    c.set("srp.ablate", "no-reference");
    EXPECT_TRUE(srp_config_from(c).ablations.no_reference);
    EXPECT_FALSE(srp_config_from(c).ablations.no_reflection);
}

TEST(ConfigFile, RejectsUnknownBackends) {
    EXPECT_THROW(provider_from(ConfigFile::parse("embed.provider = magic\n")), ConfigError);
    EXPECT_THROW(provider_from(ConfigFile::parse("embed.provider = remote\n")), ConfigError);
    EXPECT_THROW(knowledge_graph_from(ConfigFile::parse("kg.backend = magic\n")), ConfigError);
    EXPECT_THROW(knowledge_graph_from(ConfigFile::parse("kg.backend = memory\n")), ConfigError);
    EXPECT_THROW(knowledge_graph_from(ConfigFile::parse("kg.backend = sparql\n")), ConfigError);
    EXPECT_THROW(srp_config_from(ConfigFile::parse("srp.ablate = no-such-thing\n")), ConfigError);
    auto c = ConfigFile::load(testing::data_path("srp.conf"));
    c.set("llm.provider", "magic");
    EXPECT_THROW(build_runtime(c), ConfigError);
}

TEST(Runtime, BuildsFromToyConfigAndAnswers) {
    auto rt = build_runtime(ConfigFile::load(testing::data_path("srp.conf")));
    ASSERT_TRUE(rt.base.has_value());
    EXPECT_EQ(rt.srp.k_references, 4u);
    EXPECT_EQ(rt.srp.max_reflections, 3u);
    EXPECT_EQ(rt.provider->dimension(), 64u);
    const auto trace = answer_question(testing::golden_question(), rt.srp, rt.deps());
    ASSERT_FALSE(trace.answer.values.empty());
    EXPECT_EQ(trace.answer.values.front(), "Naked Movie");
    EXPECT_EQ(trace.terminal_state, TerminalState::answered);
}

}  // namespace
}  // namespace srp
