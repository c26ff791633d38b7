// End-to-end runs of the bnfuse binary: exit codes, golden files, formatting.
#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = BNFUSE_CLI_PATH;
const fs::path kFixtures = BNFUSE_FIXTURE_DIR;

struct RunResult {
    int exit_code = -1;
    std::string output; // stdout + stderr interleaved
};

RunResult run_cli(const std::string& args) {
    std::string command = kCli + " " + args + " 2>&1";
    FILE* pipe = popen(command.c_str(), "r");
    EXPECT_NE(pipe, nullptr) << command;
    RunResult result;
    char buffer[4096];
    std::size_t got;
    while ((got = fread(buffer, 1, sizeof buffer, pipe)) > 0)
        result.output.append(buffer, got);
    int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string fixture(const std::string& name) {
    return (kFixtures / name).string();
}

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

fs::path temp_file(const std::string& name) {
    return fs::temp_directory_path() / ("bnfuse_cli_test_" + name);
}

} // namespace

TEST(CliValidate, AcceptsFixturesRejectsGarbage) {
    auto ok = run_cli("validate " + fixture("walkthrough_first.json") + " " +
                      fixture("example_author1.json"));
    EXPECT_EQ(ok.exit_code, 0);
    EXPECT_NE(ok.output.find("structure, 6 nodes"), std::string::npos);
    EXPECT_NE(ok.output.find("bayes net, 2 nodes"), std::string::npos);

    fs::path bad = temp_file("bad.json");
    std::ofstream(bad) << "{\"nodes\": [{\"name\":\"x\"},{\"name\":\"y\"}], "
                          "\"arcs\": [[\"x\",\"y\"],[\"y\",\"x\"]]}";
    auto rejected = run_cli("validate " + bad.string());
    EXPECT_EQ(rejected.exit_code, 2);
    EXPECT_NE(rejected.output.find("cycle"), std::string::npos);
}

TEST(CliFuse, GoldenTraceAndOutputs) {
    fs::path out = temp_file("fused.json");
    fs::path trace = temp_file("fused.trace");
    fs::path dot = temp_file("fused.dot");
    auto result = run_cli("fuse " + fixture("walkthrough_first.json") + " " +
                          fixture("walkthrough_second.json") + " --checked --out " +
                          out.string() + " --trace " + trace.string() +
                          " --dot " + dot.string());
    ASSERT_EQ(result.exit_code, 0) << result.output;

    EXPECT_EQ(slurp(trace), slurp(kFixtures / "walkthrough.trace.txt"));
    EXPECT_EQ(slurp(out), slurp(kFixtures / "walkthrough.fused.json"));

    // Transformed companions land next to the fused file.
    fs::path t1 = out;
    t1.replace_filename("bnfuse_cli_test_fused.net1.json");
    fs::path t2 = out;
    t2.replace_filename("bnfuse_cli_test_fused.net2.json");
    EXPECT_TRUE(fs::exists(t1));
    EXPECT_TRUE(fs::exists(t2));

    // One edge line per arc, with origin attributes on each.
    std::string dot_text = slurp(dot);
    std::size_t edges = 0;
    for (std::size_t pos = dot_text.find("->"); pos != std::string::npos;
         pos = dot_text.find("->", pos + 2))
        ++edges;
    EXPECT_EQ(edges, 8u);
    EXPECT_NE(dot_text.find("origin=\"shared\""), std::string::npos);
    EXPECT_NE(dot_text.find("origin=\"first-only\""), std::string::npos);
    EXPECT_NE(dot_text.find("origin=\"second-only\""), std::string::npos);

    // Same command, same bytes.
    fs::path trace2 = temp_file("fused2.trace");
    run_cli("fuse " + fixture("walkthrough_first.json") + " " +
            fixture("walkthrough_second.json") + " --trace " + trace2.string());
    EXPECT_EQ(slurp(trace), slurp(trace2));
}

TEST(CliFuse, ExitCodes) {
    EXPECT_EQ(run_cli("fuse " + fixture("walkthrough_first.json")).exit_code, 2);

    fs::path cyclic = temp_file("cyclic.json");
    std::ofstream(cyclic) << "{\"nodes\": [{\"name\":\"x\"},{\"name\":\"y\"}], "
                             "\"arcs\": [[\"x\",\"y\"],[\"y\",\"x\"]]}";
    auto result = run_cli("fuse " + fixture("walkthrough_first.json") + " " +
                          cyclic.string());
    EXPECT_EQ(result.exit_code, 2);
    EXPECT_NE(result.output.find("cycle"), std::string::npos);
}

TEST(CliCompromise, BothRegimesOnTheWorkedExample) {
    auto result = run_cli("compromise " + fixture("example_author1.json") + " " +
                          fixture("example_author2.json") +
                          " --mode both --query A --evidence B=true");
    ASSERT_EQ(result.exit_code, 0) << result.output;
    EXPECT_NE(result.output.find("author 1 posterior: A=true 0.967742"),
              std::string::npos);
    EXPECT_NE(result.output.find("author 2 posterior: A=true 0.142857"),
              std::string::npos);
    EXPECT_NE(result.output.find("posterior compromise: A=true 0.555300"),
              std::string::npos);
    EXPECT_NE(result.output.find("prior compromise: A=true 0.658537"),
              std::string::npos);
}

TEST(CliCompromise, DegenerateWeightsMatchAuthorOne) {
    auto result = run_cli("compromise " + fixture("example_author1.json") + " " +
                          fixture("example_author2.json") +
                          " --mode both --query A --evidence B=true "
                          "--weights 1,0");
    ASSERT_EQ(result.exit_code, 0) << result.output;
    EXPECT_NE(result.output.find("posterior compromise: A=true 0.967742"),
              std::string::npos);
    EXPECT_NE(result.output.find("prior compromise: A=true 0.967742"),
              std::string::npos);
}

TEST(CliCompromise, UnknownVariableExitsTwo) {
    auto result = run_cli("compromise " + fixture("example_author1.json") + " " +
                          fixture("example_author2.json") + " --query ZZZ");
    EXPECT_EQ(result.exit_code, 2);
}

TEST(CliInfer, SingleNetPosterior) {
    auto result = run_cli("infer " + fixture("example_author1.json") +
                          " --query A --evidence B=true");
    ASSERT_EQ(result.exit_code, 0) << result.output;
    EXPECT_NE(result.output.find("posterior: A=true 0.967742"),
              std::string::npos);

    EXPECT_EQ(run_cli("infer " + fixture("walkthrough_first.json") + " --query a")
                  .exit_code,
              2);
}

TEST(CliGenRandom, DeterministicAndDensityExtremes) {
    fs::path a = temp_file("gen_a.json");
    fs::path b = temp_file("gen_b.json");
    ASSERT_EQ(run_cli("gen-random --nodes 6 --density 0.5 --seed 11 --out " +
                      a.string())
                  .exit_code,
              0);
    ASSERT_EQ(run_cli("gen-random --nodes 6 --density 0.5 --seed 11 --out " +
                      b.string())
                  .exit_code,
              0);
    EXPECT_EQ(slurp(a), slurp(b));

    auto empty = run_cli("gen-random --nodes 5 --density 0 --seed 1");
    EXPECT_EQ(empty.exit_code, 0);
    EXPECT_NE(empty.output.find("\"arcs\": []"), std::string::npos);

    fs::path full = temp_file("gen_full.json");
    run_cli("gen-random --nodes 5 --density 1 --seed 1 --out " + full.string());
    std::string text = slurp(full);
    std::size_t arcs = 0;
    for (std::size_t pos = text.find("[\n      \""); pos != std::string::npos;
         pos = text.find("[\n      \"", pos + 1))
        ++arcs;
    EXPECT_EQ(arcs, 10u); // complete DAG on 5 nodes

    fs::path pair = temp_file("gen_pair");
    ASSERT_EQ(run_cli("gen-random --nodes 5 --density 0.4 --seed 3 --pair "
                      "--cpt --out " +
                      pair.string())
                  .exit_code,
              0);
    EXPECT_TRUE(fs::exists(pair.string() + ".1.json"));
    EXPECT_TRUE(fs::exists(pair.string() + ".2.json"));
    auto validate = run_cli("validate " + pair.string() + ".1.json " +
                            pair.string() + ".2.json");
    EXPECT_EQ(validate.exit_code, 0);
    EXPECT_NE(validate.output.find("bayes net"), std::string::npos);
}

TEST(CliExportDot, OneEdgeLinePerArc) {
    auto result = run_cli("export-dot " + fixture("walkthrough_first.json"));
    ASSERT_EQ(result.exit_code, 0);
    std::size_t edges = 0;
    for (std::size_t pos = result.output.find("->"); pos != std::string::npos;
         pos = result.output.find("->", pos + 2))
        ++edges;
    EXPECT_EQ(edges, 5u);
}

TEST(CliBench, SmokeRunPrintsTable) {
    auto result = run_cli("bench --sizes 6,8 --trials 2 --seed 5");
    ASSERT_EQ(result.exit_code, 0) << result.output;
    EXPECT_NE(result.output.find("mean_ms"), std::string::npos);
    EXPECT_NE(result.output.find("n=6"), std::string::npos);
    EXPECT_NE(result.output.find("n=8"), std::string::npos);
}
