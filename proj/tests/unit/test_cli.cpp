#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "graphconc/cli/config.hpp"
#include "graphconc/cli/experiments.hpp"

using namespace graphconc;
using namespace graphconc::cli;
namespace fs = std::filesystem;

namespace {

json deviation_config() {
  return json::parse(R"({"experiment": "deviation", "master_seed": 1, "trials": 3, "delta": 0.1,
                         "matrix": "adjacency", "model": {"kind": "erdos-renyi", "n": 40, "p": 0.2}})");
}

bool mentions(const std::vector<Diagnostic>& diags, const std::string& key, const std::string& text = "") {
  for (const auto& d : diags)
    if (d.key == key && d.message.find(text) != std::string::npos) return true;
  return false;
}

std::string render(const CsvReport& r) {
  std::ostringstream out;
  r.write(out);
  return out.str();
}

int run_cli(const std::string& args, const std::string& out_file = "/dev/null") {
  const std::string cmd = std::string(GRAPHCONC_CLI_PATH) + " " + args + " > " + out_file + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_temp(const std::string& name, const std::string& text) {
  const auto path = fs::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Config, ValidConfigHasNoDiagnostics) {
  const auto r = parse_config(deviation_config());
  EXPECT_TRUE(r.diagnostics.empty());
  ASSERT_TRUE(r.config.has_value());
  EXPECT_EQ(r.config->n, 40u);
  EXPECT_EQ(r.config->matrix, GraphMatrix::Adjacency);
}

TEST(Config, UnknownKeysAreRejected) {
  auto doc = deviation_config();
  doc["colour"] = "blue";
  doc["model"]["extra"] = 1;
  const auto r = parse_config(doc);
  EXPECT_FALSE(r.config.has_value());
  EXPECT_TRUE(mentions(r.diagnostics, "colour", "unknown key"));
  EXPECT_TRUE(mentions(r.diagnostics, "model.extra", "unknown key"));
}

TEST(Config, DeltaAboveHalfNamesTheRange) {
  auto doc = deviation_config();
  doc["delta"] = 0.9;
  const auto r = parse_config(doc);
  EXPECT_FALSE(r.config.has_value());
  EXPECT_TRUE(mentions(r.diagnostics, "delta", "1/2"));
}

TEST(Config, ZeroTrialsIsAnError) {
  auto doc = deviation_config();
  doc["trials"] = 0;
  EXPECT_TRUE(mentions(validate(doc), "trials"));
  EXPECT_TRUE(has_errors(validate(doc)));
}

TEST(Config, MissingAndMistypedKeys) {
  auto doc = deviation_config();
  doc.erase("master_seed");
  doc["model"]["n"] = "forty";
  const auto d = validate(doc);
  EXPECT_TRUE(mentions(d, "master_seed", "missing"));
  EXPECT_TRUE(mentions(d, "model.n", "integer"));
  EXPECT_TRUE(has_errors(validate(json::array())));
  EXPECT_TRUE(mentions(validate(json::parse(R"({"experiment": "nope", "master_seed": 1, "trials": 1})")),
                       "experiment"));
}

TEST(Config, GraphonLargePIsAWarningOnly) {
  const auto doc = json::parse(R"({"experiment": "graphon-spectrum", "master_seed": 1, "trials": 1, "n": 20,
                                   "p": 0.5, "kernel": {"kind": "rank-one", "params": [4, 1]}})");
  const auto r = parse_config(doc);
  ASSERT_EQ(r.diagnostics.size(), 1u);
  EXPECT_EQ(r.diagnostics[0].severity, Diagnostic::Severity::Warning);
  EXPECT_NE(r.diagnostics[0].message.find("p <= 1/K"), std::string::npos);
  EXPECT_TRUE(r.config.has_value());
  EXPECT_NO_THROW(run(*r.config));
}

TEST(Config, KernelParameterErrors) {
  const auto doc = json::parse(R"({"experiment": "graphon-spectrum", "master_seed": 1, "trials": 1, "n": 20,
                                   "p": 0.1, "kernel": {"kind": "block", "params": [1, 2, 3]}})");
  EXPECT_TRUE(mentions(validate(doc), "kernel", "k*k"));
  auto smooth = doc;
  smooth["kernel"] = json::parse(R"({"kind": "cosine-product"})");
  EXPECT_TRUE(mentions(validate(smooth), "kernel.kind", "closed-form"));
  auto low_k = doc;
  low_k["kernel"] = json::parse(R"({"kind": "constant", "params": [2], "K": 1})");
  EXPECT_TRUE(mentions(validate(low_k), "kernel.K"));
}

TEST(Config, MissingGraphFileIsAnIoDiagnostic) {
  const auto doc = json::parse(R"({"experiment": "percolation-gap", "master_seed": 1, "trials": 1, "delta": 0.1,
                                   "p": 0.5, "graph": {"kind": "file", "graph_file": "/nonexistent/g.txt"}})");
  const auto d = validate(doc);
  ASSERT_FALSE(d.empty());
  EXPECT_TRUE(d[0].io);
}

TEST(Csv, NumberFormatting) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(1e-20), "1e-20");
  EXPECT_EQ(format_number(std::size_t{42}), "42");
  EXPECT_THROW(format_number(std::nan("")), Error);
}

TEST(Csv, SummaryRowsArePaddedToHeaderWidth) {
  CsvReport r({"a", "b", "c", "d"});
  r.add_row({"1", "2", "3", "4"});
  r.add_summary("rate", 0.5);
  EXPECT_EQ(render(r), "a,b,c,d\n1,2,3,4\n#summary,rate,0.5,\n");
  EXPECT_THROW(r.add_row({"1"}), Error);
  std::ostringstream lng;
  r.write_long(lng, "x");
  EXPECT_EQ(lng.str(), "experiment,row,variable,value\nx,0,a,1\nx,0,b,2\nx,0,c,3\nx,0,d,4\n");
}

TEST(Run, DeviationColumnsAndDeterminism) {
  const auto cfg = *parse_config(deviation_config()).config;
  const auto a = run(cfg);
  EXPECT_EQ(a.columns(), (std::vector<std::string>{"trial", "observed", "bound", "within"}));
  EXPECT_EQ(a.rows().size(), 3u);
  EXPECT_EQ(a.summary().front().first, "failure_fraction");
  EXPECT_EQ(render(a), render(run(cfg)));
}

TEST(Run, HelpDocumentsEveryColumn) {
  const auto help = schema_help();
  for (const auto& s : schemas()) {
    EXPECT_NE(help.find(experiment_name(s.experiment)), std::string::npos);
    for (const auto& c : s.columns) EXPECT_NE(help.find(std::string("  ") + c.name + ": "), std::string::npos);
    for (const auto& m : s.summary) EXPECT_NE(help.find(std::string("    ") + m.name + ": "), std::string::npos);
  }
}

TEST(Run, ValidatedCorpusRunsAndKeepsColumnCount) {
  std::size_t seen = 0;
  for (const auto& entry : fs::directory_iterator(GRAPHCONC_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    auto doc = read_config_file(entry.path());
    doc["trials"] = 2;
    const auto r = parse_config(doc, entry.path().parent_path());
    ASSERT_FALSE(has_errors(r.diagnostics)) << entry.path();
    const auto rep = run(*r.config);
    std::istringstream lines(render(rep));
    std::string line;
    while (std::getline(lines, line))
      EXPECT_EQ(std::count(line.begin(), line.end(), ','), static_cast<long>(rep.columns().size() - 1)) << line;
  }
  EXPECT_GE(seen, 6u);
}

TEST(Binary, ExitCodes) {
  const auto good = write_temp("gc_good.json", deviation_config().dump());
  const auto bad_key = write_temp("gc_bad_key.json", R"({"experiment": "deviation", "bogus": 1})");
  const auto bad_json = write_temp("gc_bad_json.json", "{ not json");
  const auto out = fs::temp_directory_path() / "gc_out.csv";
  EXPECT_EQ(run_cli("validate " + good.string()), 0);
  EXPECT_EQ(run_cli("validate " + bad_key.string()), 2);
  EXPECT_EQ(run_cli("run " + bad_json.string()), 2);
  EXPECT_EQ(run_cli("run /nonexistent/config.json"), 3);
  EXPECT_EQ(run_cli("run " + good.string() + " --out /nonexistent/dir/out.csv"), 3);
  EXPECT_EQ(run_cli("run " + good.string() + " --delta 3"), 2);
  EXPECT_EQ(run_cli("run " + good.string() + " --seed 5 --trials 2 --out " + out.string()), 0);
  const auto csv = slurp(out);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 2 + 4);
  EXPECT_EQ(run_cli("run " + good.string() + " --out " + out.string() + " --emit-plot-data"), 0);
  EXPECT_TRUE(fs::exists(fs::path(out).replace_extension(".plot.csv")));
}

TEST(Binary, HelpListsColumns) {
  const auto out = fs::temp_directory_path() / "gc_help.txt";
  EXPECT_EQ(run_cli("--help", out.string()), 0);
  const auto text = slurp(out);
  EXPECT_NE(text.find("q4_discrepancy"), std::string::npos);
  EXPECT_NE(text.find("contour_error"), std::string::npos);
}
