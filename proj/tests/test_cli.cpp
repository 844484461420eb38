/*
 * Copyright 2026 The desplan Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "desplan/cli.hpp"
#include "desplan/errors.hpp"

namespace desplan {
namespace {

namespace fs = std::filesystem;

struct Result {
    int status;
    std::string out;
    std::string err;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "desplan");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int status = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {status, out.str(), err.str()};
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) out.push_back(line);
    return out;
}

/// Drops the last comma-separated field (wall time).
std::string without_wall(const std::string& row) { return row.substr(0, row.rfind(',')); }

struct Cli : ::testing::Test {
    fs::path dir;
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("desplan-cli-" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const char* name) const { return (dir / name).string(); }
};

TEST_F(Cli, SynthSmallFactory) {
    const auto r = cli({"synth", "--builtin", "small-factory"});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(lines(r.out).at(0), "states=6 transitions=8");
    EXPECT_EQ(lines(r.out).at(1).rfind("wall_seconds=", 0), 0u);
}

TEST_F(Cli, SynthFmsFromFile) {
    const auto r = cli({"synth", "--model", "models/fms.des"});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(lines(r.out).at(0), "states=45504 transitions=200124");
}

TEST_F(Cli, SynthDump) {
    const auto r = cli({"synth", "--builtin", "small-factory", "--dump", path("sup.des")});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_NE(slurp(path("sup.des")).find(".states IWE tasks=1"), std::string::npos);
}

TEST_F(Cli, MissingModelFile) {
    const auto r = cli({"synth", "--model", path("absent.des")});
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.err.find(path("absent.des")), std::string::npos);
}

TEST_F(Cli, ExactlyOneModelSource) {
    EXPECT_NE(cli({"synth"}).status, 0);
    EXPECT_NE(cli({"synth", "--builtin", "fms", "--model", "models/fms.des"}).status, 0);
    EXPECT_NE(cli({"synth", "--builtin", "nope"}).status, 0);
    EXPECT_NE(cli({}).status, 0);
}

TEST_F(Cli, PlanSmallFactory) {
    const auto r = cli({"plan", "--builtin", "small-factory", "--algo", "pmt", "-N", "2", "--out", path("sf.plan")});
    ASSERT_EQ(r.status, 0) << r.err;
    EXPECT_EQ(without_wall(lines(r.out).at(0)), "pmt,2,25,6");
    EXPECT_EQ(slurp(path("sf.plan")), slurp("tests/golden/small_factory_n2_pmt.plan"));
}

TEST_F(Cli, PlanToStandardOutput) {
    const auto r = cli({"plan", "--builtin", "small-factory", "-N", "2"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto out = lines(r.out);
    ASSERT_EQ(out.size(), 12u);
    EXPECT_EQ(out[1], "makespan 25");
    EXPECT_EQ(out[4], "a1");
}

TEST_F(Cli, PlanFmsTenBatches) {
    const auto hmm = cli({"plan", "--builtin", "fms", "--algo", "hmm", "-N", "10", "--out", path("h.plan")});
    ASSERT_EQ(hmm.status, 0) << hmm.err;
    EXPECT_EQ(without_wall(lines(hmm.out).at(0)), "hmm,10,1652,1336");
    const auto pmt = cli({"plan", "--builtin", "fms", "--algo", "pmt", "-N", "10", "--out", path("p.plan")});
    ASSERT_EQ(pmt.status, 0) << pmt.err;
    EXPECT_EQ(without_wall(lines(pmt.out).at(0)), "pmt,10,1664,1488");
}

TEST_F(Cli, PlanRejectsBadArguments) {
    EXPECT_NE(cli({"plan", "--builtin", "fms", "--algo", "dfs", "-N", "1"}).status, 0);
    EXPECT_NE(cli({"plan", "--builtin", "fms", "-N", "0"}).status, 0);
    EXPECT_NE(cli({"plan", "--builtin", "fms"}).status, 0);
    const auto capped = cli({"plan", "--builtin", "fms", "-N", "1", "--max-frontier", "1"});
    EXPECT_NE(capped.status, 0);
    EXPECT_NE(capped.err.find("frontier"), std::string::npos);
}

TEST_F(Cli, Bench) {
    const auto r = cli({"bench", "--batches", "1,5"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto rows = lines(r.out);
    ASSERT_EQ(rows.size(), 5u);
    EXPECT_EQ(rows[0], "N,algo,makespan,parallelism,wall_seconds,optimal_formula");
    auto fields = [](const std::string& row) {
        std::vector<std::string> f;
        std::istringstream in(row);
        for (std::string x; std::getline(in, x, ',');) f.push_back(x);
        return f;
    };
    const auto pmt1 = fields(rows[1]);
    EXPECT_EQ(pmt1[0], "1");
    EXPECT_EQ(pmt1[1], "pmt");
    EXPECT_EQ(pmt1[3], "93");
    EXPECT_EQ(pmt1[5], "238");
    const auto hmm5 = fields(rows[4]);
    EXPECT_EQ(hmm5[1], "hmm");
    EXPECT_EQ(hmm5[2], "867");
    EXPECT_EQ(hmm5[5], "866");
}

TEST_F(Cli, BenchRecordsFailedRows) {
    const auto r = cli({"bench", "--batches", "1", "--algos", "pmt", "--max-frontier", "1"});
    EXPECT_NE(r.status, 0);
    EXPECT_EQ(lines(r.out).at(1), "1,pmt,,,,238");
}

TEST_F(Cli, SimulateIsReproducible) {
    ASSERT_EQ(cli({"plan", "--builtin", "fms", "--algo", "hmm", "-N", "2", "--out", path("p.plan")}).status, 0);
    const std::vector<std::string> args{"simulate", "--builtin", "fms", "--plan", path("p.plan"), "--sigmas", "0..5",
                                        "--reps", "4", "--seed", "7", "--raw", path("raw.csv")};
    const auto a = cli(args);
    ASSERT_EQ(a.status, 0) << a.err;
    const auto raw = slurp(path("raw.csv"));
    const auto b = cli(args);
    EXPECT_EQ(a.out, b.out);
    EXPECT_EQ(slurp(path("raw.csv")), raw);
    const auto rows = lines(a.out);
    ASSERT_EQ(rows.size(), 7u);
    EXPECT_EQ(rows[1].rfind("0,", 0), 0u);
    EXPECT_EQ(lines(raw).size(), 1u + 6 * 4);
}

TEST_F(Cli, SimulateNeedsAPlan) {
    const auto r = cli({"simulate", "--builtin", "fms", "--plan", path("none.plan")});
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.err.find("none.plan"), std::string::npos);
}

TEST_F(Cli, OracleSmallFactory) {
    const auto r = cli({"oracle", "--builtin", "small-factory", "-N", "2", "--mode", "enumerate"});
    ASSERT_EQ(r.status, 0) << r.err;
    const auto out = lines(r.out);
    EXPECT_EQ(out.at(0), "optimal_makespan=25");
    EXPECT_EQ(out.at(2), "max_parallelism=6");
    EXPECT_EQ(out.at(6), "authoritative=true");
}

TEST_F(Cli, OracleBudget) {
    const auto r = cli({"oracle", "--builtin", "small-factory", "-N", "4", "--mode", "enumerate", "--budget", "3"});
    EXPECT_NE(r.status, 0);
    EXPECT_NE(r.out.find("authoritative=false"), std::string::npos);
}

TEST(SigmaList, Forms) {
    EXPECT_EQ(parse_sigma_list("0..5"), (std::vector<double>{0, 1, 2, 3, 4, 5}));
    EXPECT_EQ(parse_sigma_list("2..2"), (std::vector<double>{2}));
    EXPECT_EQ(parse_sigma_list("0,0.5,3"), (std::vector<double>{0, 0.5, 3}));
    for (const char* bad : {"", "a", "1,,2", "5..1", "0..2.5", "-1", "1,"})
        EXPECT_THROW(parse_sigma_list(bad), InputError) << bad;
}

} // namespace
} // namespace desplan
