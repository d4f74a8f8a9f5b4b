#include "sentinel/cli.hpp"
#include "sentinel/corpus.hpp"
#include "sentinel/error.hpp"
#include "sentinel/text.hpp"
#include "test_support.hpp"

#include <json.hpp>

#include <sstream>

#include <gtest/gtest.h>

using namespace sentinel;
using sentinel::test::TempDir;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::vector<nlohmann::json> json_lines(const std::string& text) {
  std::vector<nlohmann::json> out;
  for (auto line : split_lines(text)) {
    out.push_back(nlohmann::json::parse(line));
  }
  return out;
}

/// Small corpus plus a fast model shared by the tests below.
class CliFixture : public ::testing::Test {
protected:
  static void SetUpTestSuite() {
    dir_ = new TempDir;
    auto r = cli({"synth", "--benign", "24", "--malicious", "12", "--ambiguity", "0", "--seed", "3", "--out",
                  (dir_->path() / "corpus").string()});
    ASSERT_EQ(r.code, 0) << r.err;
    r = cli({"train", "--manifest", manifest(), "--out", model(), "--learner", "nb", "--seed", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
  }
  static void TearDownTestSuite() { delete dir_; }

  static std::string manifest() { return (dir_->path() / "corpus" / "manifest.jsonl").string(); }
  static std::string model() { return (dir_->path() / "model.sdsm").string(); }

  static std::string spec_package(const TraitSpec& spec) {
    return synth_package(spec, dir_->path() / "fixtures").string();
  }

  static TempDir* dir_;
};

TempDir* CliFixture::dir_ = nullptr;

} // namespace

TEST(CliConfig, ParsesSections) {
  auto cfg = parse_cli_config("[tokenizer]\nnum_words = 100\nmode = tfidf\nstemming = yes\n"
                              "[scan]\nlong_string_threshold = 60\napi_list = exec, eval\n"
                              "[hyperparams]\nrf_trees = 5\nmlp_epochs = 7\n"
                              "[model]\nlearner = rf\nfeature_set = text\n"
                              "[ablation]\nfeature_sets = structured, text, combined\n"
                              "[extraction]\nmin_setup_keys = 2\n");
  EXPECT_EQ(cfg.tokenizer.num_words, 100u);
  EXPECT_EQ(cfg.tokenizer.mode, VectorMode::Tfidf);
  EXPECT_TRUE(cfg.tokenizer.stemming);
  EXPECT_EQ(cfg.scan.long_string_threshold, 60u);
  EXPECT_EQ(cfg.scan.api_list, (std::set<std::string>{"eval", "exec"}));
  EXPECT_EQ(cfg.hyperparams.rf_trees, 5u);
  EXPECT_EQ(cfg.hyperparams.mlp.epochs, 7u);
  EXPECT_EQ(cfg.learner, ModelKind::RandomForest);
  EXPECT_EQ(cfg.feature_set, FeatureSet::Text);
  EXPECT_EQ(cfg.ablation, (std::vector<FeatureSet>{FeatureSet::Structured, FeatureSet::Text, FeatureSet::Combined}));
  EXPECT_EQ(cfg.min_setup_keys, 2u);
}

TEST(CliConfig, RejectsUnknownOrBadValues) {
  EXPECT_THROW(parse_cli_config("[bogus]\nx = 1\n"), Error);
  EXPECT_THROW(parse_cli_config("[tokenizer]\ncolour = red\n"), Error);
  EXPECT_THROW(parse_cli_config("[tokenizer]\nnum_words = -3\n"), Error);
  EXPECT_THROW(parse_cli_config("[tokenizer]\nnum_words = 0\n"), Error);
  EXPECT_THROW(parse_cli_config("[model]\nlearner = knn\n"), Error);
  EXPECT_THROW(parse_cli_config("[hyperparams]\nsvm_c = abc\n"), Error);
}

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(cli({}).code, 2);
  EXPECT_EQ(cli({"frobnicate"}).code, 2);
  EXPECT_EQ(cli({"synth", "--out", "x", "--ambiguity", "2.0"}).code, 2);
  EXPECT_EQ(cli({"--help"}).code, 0);
}

TEST_F(CliFixture, TrainWritesModelAndIsDeterministic) {
  auto bytes = read_file(model());
  EXPECT_EQ(bytes.substr(0, 4), "SDSM");
  auto again = (dir_->path() / "again.sdsm").string();
  auto r = cli({"train", "--manifest", manifest(), "--out", again, "--learner", "nb", "--seed", "1"});
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(read_file(again), bytes);
  EXPECT_EQ(load_model(model()).kind, ModelKind::BernoulliNb);
  EXPECT_NE(r.out.find("vocabulary"), std::string::npos);
}

TEST_F(CliFixture, VetVerdictsAndExitCodes) {
  TraitSpec benign;
  benign.seed = 21;
  benign.name = "fixturebenign";
  TraitSpec bad;
  bad.label = Label::Malicious;
  bad.traits = {all_traits().begin(), all_traits().end()};
  bad.suspicious_apis = {"exec", "system", "b64decode"};
  bad.seed = 22;
  bad.name = "fixturebad";
  auto good_path = spec_package(benign);
  auto bad_path = spec_package(bad);

  auto r = cli({"vet", "--model", model(), "--json", good_path});
  EXPECT_EQ(r.code, 0) << r.out;
  auto lines = json_lines(r.out);
  ASSERT_EQ(lines.size(), 1u);
  EXPECT_EQ(lines[0]["verdict"], "benign");

  r = cli({"vet", "--model", model(), "--json", good_path, bad_path});
  EXPECT_EQ(r.code, 3);
  lines = json_lines(r.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_EQ(lines[1]["verdict"], "malicious");
  EXPECT_GE(lines[1]["score"].get<double>(), 0.5);
  std::size_t true_entries = 0;
  for (const auto& e : lines[1]["evidence"]) true_entries += e["value"].get<bool>();
  EXPECT_GE(true_entries, 7u);
  bool listing = false;
  for (const auto& e : lines[1]["evidence"]) {
    if (e["feature"] == "suspicious_api_calls") {
      ASSERT_FALSE(e["details"].empty());
      EXPECT_TRUE(e["details"][0]["lineno"].is_string());
      EXPECT_TRUE(e["details"][0].contains("filepath"));
      EXPECT_TRUE(e["details"][0].contains("api_name"));
      listing = true;
    }
  }
  EXPECT_TRUE(listing);

  r = cli({"vet", "--model", model(), "--json", good_path, "/nonexistent/pkg.tar.gz"});
  EXPECT_EQ(r.code, 2);
  lines = json_lines(r.out);
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_TRUE(lines[1].contains("error"));

  r = cli({"vet", "--model", "/nonexistent.sdsm", "--json", good_path});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(json_lines(r.out).size(), 1u);

  r = cli({"vet", "--model", model(), "--jobs", "3", good_path, bad_path});
  EXPECT_EQ(r.code, 3);
  EXPECT_LT(r.out.find("fixturebenign"), r.out.find("fixturebad"));
}

TEST_F(CliFixture, VetReproducesTrainingPredictions) {
  auto manifest_data = read_manifest(manifest());
  auto trained = load_model(model());
  auto records = extract_dataset(manifest(), trained.extraction_config());
  auto x = design_matrix(records, trained.vocab, trained.tokenizer.mode, trained.feature_set);
  std::vector<std::string> args{"vet", "--model", model(), "--json"};
  for (const auto& e : manifest_data.entries) {
    args.push_back((std::filesystem::path(manifest()).parent_path() / e.path).string());
  }
  auto r = cli(args);
  auto lines = json_lines(r.out);
  ASSERT_EQ(lines.size(), records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    EXPECT_DOUBLE_EQ(lines[i]["score"].get<double>(), predict_input(trained, x.row(i)).score);
  }
}

TEST_F(CliFixture, ExtractPrintsFlags) {
  TraitSpec all;
  all.label = Label::Malicious;
  all.traits = {all_traits().begin(), all_traits().end()};
  all.seed = 30;
  all.name = "fixtureall";
  auto r = cli({"extract", "--json", spec_package(all)});
  ASSERT_EQ(r.code, 0) << r.out;
  auto j = json_lines(r.out).at(0);
  for (const auto& [name, value] : j["structured"].items()) EXPECT_TRUE(value.get<bool>()) << name;
  EXPECT_FALSE(j["tokens"].empty());

  TempDir empty;
  r = cli({"extract", "--json", empty.path().string()});
  ASSERT_EQ(r.code, 0);
  auto e = json_lines(r.out).at(0)["structured"];
  EXPECT_EQ(e["invalid_homepage"], true);
  EXPECT_EQ(e["install_command"], false);
  EXPECT_EQ(e["minimum_setup_config"], true);

  r = cli({"extract", "--json", "/nonexistent/x.tar.gz"});
  EXPECT_EQ(r.code, 2);
  EXPECT_TRUE(json_lines(r.out).at(0).contains("error"));
  r = cli({"extract", spec_package(all)});
  EXPECT_NE(r.out.find("invalid_homepage"), std::string::npos);
}

TEST_F(CliFixture, EvaluateAblationRowsInOrder) {
  auto cfg = dir_->path() / "abl.ini";
  write_file(cfg, "[model]\nlearner = nb\n[ablation]\nfeature_sets = structured, text, combined\n");
  auto r = cli({"evaluate", "--manifest", manifest(), "--config", cfg.string(), "--folds", "3", "--repeats", "1",
                "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rows = json_lines(r.out);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0]["config"]["feature_set"], "structured");
  EXPECT_EQ(rows[1]["config"]["feature_set"], "text");
  EXPECT_EQ(rows[2]["config"]["feature_set"], "combined");

  r = cli({"evaluate", "--manifest", manifest(), "--learner", "nb", "--folds", "20", "--repeats", "1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("ClassTooSmall"), std::string::npos);
}

TEST_F(CliFixture, ImportanceTable) {
  auto r = cli({"importance", "--model", model(), "--manifest", manifest(), "--repeats", "1", "--top-k", "5",
                "--json"});
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = json_lines(r.out).at(0);
  EXPECT_EQ(j["importance"]["features"].size(), kStructuredCount + 5);
  for (const auto& f : j["importance"]["features"]) EXPECT_EQ(f["std_delta_f1"], 0.0);
  r = cli({"importance", "--model", model(), "--manifest", manifest(), "--repeats", "2"});
  EXPECT_NE(r.out.find("mean_delta"), std::string::npos);
}

TEST_F(CliFixture, SynthIsReproducible) {
  auto a = dir_->path() / "sa";
  auto b = dir_->path() / "sb";
  ASSERT_EQ(cli({"synth", "--benign", "10", "--malicious", "5", "--seed", "4", "--out", a.string()}).code, 0);
  ASSERT_EQ(cli({"synth", "--benign", "10", "--malicious", "5", "--seed", "4", "--out", b.string()}).code, 0);
  EXPECT_EQ(split_lines(read_file(a / "manifest.jsonl")).size(), 15u);
  EXPECT_EQ(read_file(a / "manifest.jsonl"), read_file(b / "manifest.jsonl"));
}
