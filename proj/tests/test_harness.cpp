#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "qbl/qbl.hpp"

using namespace qbl;

namespace {

ExperimentConfig config(const std::string &text) { return parse_config(text); }

bool has_verdict(const ExperimentReport &r, const std::string &prefix) {
    for (const Verdict &v : r.verdicts)
        if (v.name.rfind(prefix, 0) == 0)
            return true;
    return false;
}

} // namespace

TEST(SpaceSpec, ParsesEveryKind) {
    const SpaceSpec lp = SpaceSpec::parse("lp dim=3 p=0.5");
    EXPECT_EQ(lp.kind, SpaceSpec::Kind::lp);
    EXPECT_EQ(lp.weights, (Vector{1, 1, 1}));
    EXPECT_TRUE(lp.unweighted_lp());
    EXPECT_EQ(lp.build().describe(), QuasiNormedSpace::lp(0.5, 3).describe());

    const SpaceSpec w = SpaceSpec::parse("  lp   p=inf weights=1,2 ");
    EXPECT_EQ(w.p, kInf);
    EXPECT_FALSE(w.unweighted_lp());

    const SpaceSpec s = SpaceSpec::parse("schatten rows=2 cols=3 p=0.5");
    EXPECT_EQ(s.dim(), 6u);

    const SpaceSpec half = SpaceSpec::parse("polytope half=1,0;0,1");
    const SpaceSpec full = SpaceSpec::parse("polytope vertices=1,0;0,1;-1,-0;-0,-1");
    EXPECT_EQ(half.points.size(), 4u);
    EXPECT_NEAR(half.build().gauge(Vector{0.5, 0.5}), 1.0, 1e-12);
    EXPECT_NEAR(full.build().gauge(Vector{0.5, 0.5}), 1.0, 1e-12);

    const SpaceSpec a = SpaceSpec::parse("atoms dim=2 r=0.5 atoms=1,0;0,1");
    EXPECT_EQ(a.r, 0.5);
    EXPECT_NEAR(a.build().gauge(Vector{1, 1}), 4.0, 1e-12);
}

TEST(SpaceSpec, RejectsBadText) {
    for (const char *bad : {"", "ball dim=2", "lp dim=2", "lp p=1", "lp dim=2 p=x", "lp dim=3 p=1 weights=1,1",
                            "schatten rows=2 p=1", "polytope dim=2", "polytope vertices=1,0;0", "atoms r=0.5",
                            "lp dim=2 p=1 r=3", "lp dim=2 p=1 junk"})
        EXPECT_THROW(SpaceSpec::parse(bad), ConfigError) << bad;
}

TEST(SpaceSpec, RoundTrip) {
    for (const char *text : {"lp dim=3 p=0.5", "lp p=0.1 weights=0.3333333333333333,2,7e-5", "lp dim=2 p=inf",
                             "schatten rows=2 cols=2 p=0.6666666666666666",
                             "polytope half=0.1,0.2;-0.7,1e-3;3,0.3333333333333333",
                             "atoms r=0.75 atoms=1,0.1;0.2,1;0.5,0.5"}) {
        const SpaceSpec s = SpaceSpec::parse(text);
        EXPECT_EQ(SpaceSpec::parse(s.format()), s) << text;
    }
}

TEST(ExperimentConfig, RoundTripIsLossless) {
    ExperimentConfig c;
    c.experiment = "suite:santalo";
    c.seed = 18446744073709551615ull;
    c.dims = {2, 3};
    c.exponents = {1.0 / 3.0, 0.1, kInf};
    c.samples = 123456;
    c.trials = 7;
    c.tolerance = 0.1 + 0.2;
    c.theta = 1.0 / 7.0;
    c.budget = SearchBudget{5, 77};
    c.method = "exact";
    c.threads = 3;
    c.output = "out.json";
    c.spaces = {SpaceSpec::parse("lp p=0.3 weights=1.1,2.2"), SpaceSpec::parse("polytope half=1,1;-1,1")};
    const std::string text = format_config(c);
    EXPECT_EQ(parse_config(text), c) << text;
    EXPECT_EQ(format_config(parse_config(text)), text);

    const ExperimentConfig minimal = config("experiment = volume");
    EXPECT_EQ(parse_config(format_config(minimal)), minimal);
}

TEST(ExperimentConfig, CommentsOverridesAndErrors) {
    const ExperimentConfig c = config("# header\nexperiment = volume   # trailing\n\nseed=9\nspace = lp dim=2 p=1\n");
    EXPECT_EQ(c.experiment, "volume");
    EXPECT_EQ(c.seed, 9u);
    ASSERT_EQ(c.spaces.size(), 1u);

    // file keys override the base, and a space list replaces the base's list
    ExperimentConfig base = c;
    base.spaces.push_back(SpaceSpec::parse("lp dim=3 p=2"));
    base.samples = 5;
    const ExperimentConfig merged = parse_config("seed = 11\nspace = lp dim=4 p=0.5\n", base);
    EXPECT_EQ(merged.seed, 11u);
    EXPECT_EQ(merged.samples, std::optional<std::uint64_t>(5));
    ASSERT_EQ(merged.spaces.size(), 1u);
    EXPECT_EQ(merged.spaces[0].dim(), 4u);

    EXPECT_THROW(config("nonsense"), ConfigError);
    EXPECT_THROW(config("colour = red"), ConfigError);
    EXPECT_THROW(config("seed = -1"), ConfigError);
    EXPECT_THROW(config("budget = 3"), ConfigError);
    EXPECT_THROW(config("space = cube"), ConfigError);
    EXPECT_THROW(load_config("/nonexistent/qbl.cfg"), ConfigError);
}

TEST(Run, ValidationErrors) {
    EXPECT_THROW(run(config("")), ConfigError);
    EXPECT_THROW(run(config("experiment = no-such-thing")), ConfigError);
    EXPECT_THROW(run(config("experiment = volume\nmethod = guess")), ConfigError);
    EXPECT_THROW(run(config("experiment = volume\ntolerance = 0")), ConfigError);
    EXPECT_THROW(run(config("experiment = volume\nthreads = 0")), ConfigError);
    EXPECT_THROW(run(config("experiment = volume\nmethod = monte-carlo\nsamples = 10")), ConfigError);
    EXPECT_THROW(run(config("experiment = volume\nspace = lp dim=2 p=-1")), ConfigError);
    EXPECT_THROW(run(config("experiment = suite:theorem6\nspace = lp dim=2 p=1")), ConfigError);
    EXPECT_THROW(run(config("experiment = suite:lemma11\nspace = lp dim=2 p=0.4")), ConfigError);
    EXPECT_THROW(run(config("experiment = sidon\ndims = 11")), ConfigError);
}

TEST(Catalogue, ContentsAndStability) {
    const auto &a = list_experiments();
    std::set<std::string> names;
    for (const ExperimentInfo &e : a) {
        EXPECT_TRUE(names.insert(e.name).second) << e.name;
        EXPECT_FALSE(e.summary.empty());
        EXPECT_NE(e.runner, nullptr);
    }
    for (const char *required :
         {"volume", "ellipsoid", "interp", "typecotype", "gamma2", "sidon", "suite:lemma11", "suite:santalo",
          "suite:horn", "suite:theorem6", "suite:theorem8", "suite:theorem15", "suite:lemma1", "suite:wcotype2",
          "suite:lemma5", "suite:rhull"})
        EXPECT_TRUE(names.count(required)) << required;
    const auto &b = list_experiments();
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        EXPECT_EQ(a[i].name, b[i].name);
}

TEST(Catalogue, EveryEntryRunsWithDefaults) {
    for (const ExperimentInfo &e : list_experiments()) {
        ExperimentConfig c;
        c.experiment = e.name;
        const ExperimentReport r = run(c);
        EXPECT_TRUE(r.passed()) << e.name;
        EXPECT_FALSE(r.records.empty()) << e.name;
        EXPECT_EQ(r.observational, e.observational);
        if (e.observational) {
            EXPECT_TRUE(r.verdicts.empty()) << e.name;
            EXPECT_NE(r.note.find("observational"), std::string::npos);
        }
    }
}

TEST(Run, VolumeOfCrossPolytope) {
    const ExperimentReport r = run(config("experiment = volume\nmethod = exact\nspace = lp dim=2 p=1"));
    ASSERT_EQ(r.records.size(), 1u);
    EXPECT_EQ(r.records[0]["value"].get<double>(), 2.0);
    EXPECT_EQ(r.records[0]["method"], "closed-form");
    EXPECT_TRUE(r.passed());
}

TEST(Run, HornDefaultsGiveOneThousandPasses) {
    const ExperimentReport r = run(config("experiment = suite:horn"));
    EXPECT_EQ(r.verdicts.size(), 1000u);
    EXPECT_EQ(r.failures(), 0u);
}

TEST(Run, FailingCheckIsReported) {
    // a Monte-Carlo volume cannot meet a 1e-12 relative tolerance
    const ExperimentReport r = run(config(
        "experiment = volume\nmethod = monte-carlo\nsamples = 20000\ntolerance = 1e-12\nspace = lp dim=2 p=1"));
    EXPECT_FALSE(r.passed());
    EXPECT_EQ(r.failures(), 1u);
    EXPECT_FALSE(r.payload()["passed"].get<bool>());
}

TEST(Run, DeterministicPayload) {
    for (const char *name : {"suite:santalo", "suite:theorem15", "sidon", "typecotype", "suite:wcotype2"}) {
        ExperimentConfig c;
        c.experiment = name;
        c.seed = 42;
        const ExperimentReport a = run(c), b = run(c);
        EXPECT_EQ(a.payload().dump(), b.payload().dump()) << name;
        c.seed = 43;
        if (std::string(name) == "suite:santalo") {
            EXPECT_NE(run(c).payload()["records"].dump(), a.payload()["records"].dump());
        }
    }
}

TEST(Run, ThreadsChangeNoValues) {
    for (const char *text : {"experiment = volume\nmethod = monte-carlo\nsamples = 200000\nspace = lp dim=3 p=0.5",
                             "experiment = suite:theorem15\ntrials = 2"}) {
        ExperimentConfig c = config(text);
        const ExperimentReport one = run(c);
        c.threads = 3;
        const ExperimentReport three = run(c);
        EXPECT_EQ(one.payload()["records"].dump(), three.payload()["records"].dump()) << text;
        EXPECT_EQ(one.payload()["verdicts"].dump(), three.payload()["verdicts"].dump());
    }
}

TEST(Report, JsonAndCsv) {
    ExperimentReport r;
    r.experiment = "demo";
    r.records.push_back({{"a", 1.5}, {"b", "x,y"}});
    r.records.push_back({{"a", json_number(kInf)}, {"c", 2}});
    r.check("first", true);
    r.wall_clock_seconds = 0.25;
    const Json j = r.to_json();
    EXPECT_EQ(j["schema"], kReportSchema);
    EXPECT_EQ(j["records"][1]["a"], "inf");
    EXPECT_TRUE(j["passed"].get<bool>());
    EXPECT_FALSE(r.payload().contains("wall_clock_seconds"));
    EXPECT_EQ(r.to_csv(), "a,b,c\n1.5,\"x,y\",\ninf,,2\n");
}

TEST(Report, EchoesConfig) {
    const ExperimentConfig c = config("experiment = suite:horn\ntrials = 3\nseed = 5");
    const ExperimentReport r = run(c);
    EXPECT_EQ(parse_config(r.payload()["config"].get<std::string>()), c);
    EXPECT_EQ(r.records.size(), 3u);
    EXPECT_TRUE(has_verdict(r, "horn[2]"));
}
