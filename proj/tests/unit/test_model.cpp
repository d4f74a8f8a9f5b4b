#include "sentinel/error.hpp"
#include "sentinel/ml/model.hpp"
#include "sentinel/rng.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace sentinel;

namespace {

std::vector<DatasetRecord> toy_records(std::size_t n) {
  std::vector<DatasetRecord> out;
  Rng rng(5);
  for (std::size_t i = 0; i < n; ++i) {
    DatasetRecord r;
    r.id = "pkg" + std::to_string(i);
    r.label = i % 4 == 0 ? Label::Malicious : Label::Benign;
    bool mal = r.label == Label::Malicious;
    r.structured[2] = mal;
    r.structured[5] = rng.bernoulli(0.3);
    r.tokens = {"setup", "name"};
    if (mal) r.tokens.push_back("exec");
    if (rng.bernoulli(0.5)) r.tokens.push_back("requests");
    out.push_back(r);
  }
  return out;
}

ErrorCode load_error(std::string bytes) {
  try {
    deserialize_model(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected a load error";
  return ErrorCode::InvalidArgument;
}

} // namespace

TEST(Model, NamesRoundTrip) {
  for (auto k : {ModelKind::DecisionTree, ModelKind::RandomForest, ModelKind::LinearSvm, ModelKind::Mlp,
                 ModelKind::BernoulliNb, ModelKind::Stacking}) {
    EXPECT_EQ(model_kind_from_string(to_string(k)), k);
  }
  EXPECT_EQ(feature_set_from_string("text"), FeatureSet::Text);
  EXPECT_THROW(model_kind_from_string("knn"), Error);
}

TEST(Model, HyperparamValidation) {
  Hyperparams hp;
  EXPECT_NO_THROW(hp.validate());
  hp.rf_trees = 0;
  EXPECT_THROW(hp.validate(), Error);
  hp = Hyperparams{};
  hp.svm_c = -1;
  EXPECT_THROW(hp.validate(), Error);
}

TEST(Model, DesignMatrixLayout) {
  auto recs = toy_records(8);
  Vocabulary vocab({"exec", "setup"}, {2, 8}, 8);
  auto comb = design_matrix(recs, vocab, VectorMode::Binary, FeatureSet::Combined);
  EXPECT_EQ(comb.cols(), kStructuredCount + 2);
  EXPECT_EQ(comb.at(0, 2), 1.0);
  EXPECT_EQ(comb.at(0, kStructuredCount), 1.0);
  EXPECT_EQ(design_matrix(recs, vocab, VectorMode::Binary, FeatureSet::Structured).cols(), kStructuredCount);
  EXPECT_EQ(design_matrix(recs, vocab, VectorMode::Binary, FeatureSet::Text).cols(), 2u);
  EXPECT_EQ(label_vector(recs)[0], 1);
}

TEST(Model, TrainsEveryKindAndRoundTrips) {
  auto recs = toy_records(40);
  Hyperparams hp;
  hp.mlp.epochs = 30;
  for (auto k : {ModelKind::DecisionTree, ModelKind::RandomForest, ModelKind::LinearSvm, ModelKind::Mlp,
                 ModelKind::BernoulliNb, ModelKind::Stacking}) {
    auto m = train_model(recs, k, FeatureSet::Combined, hp, ExtractionConfig{}, 3);
    EXPECT_EQ(m.kind, k);
    EXPECT_EQ(m.input_width(), kStructuredCount + m.vocab.size());
    auto bytes = serialize_model(m);
    EXPECT_EQ(bytes.substr(0, 4), "SDSM");
    auto back = deserialize_model(bytes);
    EXPECT_EQ(serialize_model(back), bytes);
    auto x = design_matrix(recs, m.vocab, m.tokenizer.mode, m.feature_set);
    for (std::size_t r = 0; r < recs.size(); ++r) {
      EXPECT_DOUBLE_EQ(predict_input(back, x.row(r)).score, predict_input(m, x.row(r)).score);
    }
    auto p = predict_input(m, x.row(0));
    EXPECT_EQ(p.label == Label::Malicious, p.score >= 0.5);
  }
}

TEST(Model, RejectsBadFiles) {
  auto m = train_model(toy_records(20), ModelKind::BernoulliNb, FeatureSet::Combined, Hyperparams{},
                       ExtractionConfig{}, 1);
  auto bytes = serialize_model(m);
  EXPECT_EQ(load_error("XXXX" + bytes.substr(4)), ErrorCode::BadMagic);
  auto v2 = bytes;
  v2[4] = 2;
  EXPECT_EQ(load_error(v2), ErrorCode::VersionUnsupported);
  auto flipped = bytes;
  flipped[30] ^= 0x55;
  EXPECT_EQ(load_error(flipped), ErrorCode::Corrupt);
  EXPECT_EQ(load_error(bytes.substr(0, bytes.size() - 3)), ErrorCode::Corrupt);
  EXPECT_EQ(load_error(bytes + "x"), ErrorCode::Corrupt);
  EXPECT_EQ(load_error(""), ErrorCode::Corrupt);
  EXPECT_EQ(load_error("SD"), ErrorCode::Corrupt);
  EXPECT_EQ(load_error("PK"), ErrorCode::BadMagic);
}

TEST(Model, WidthChecks) {
  auto m = train_model(toy_records(20), ModelKind::BernoulliNb, FeatureSet::Combined, Hyperparams{},
                       ExtractionConfig{}, 1);
  EXPECT_THROW(predict_input(m, std::vector<double>(3)), Error);
  FeatureVector v;
  v.text.assign(m.vocab.size() + 1, 0.0);
  EXPECT_THROW(predict(m, v), Error);
}

TEST(Model, SaveAndLoadFile) {
  test::TempDir tmp;
  auto m = train_model(toy_records(20), ModelKind::DecisionTree, FeatureSet::Structured, Hyperparams{},
                       ExtractionConfig{}, 1);
  save_model(m, tmp / "m.sdsm");
  auto back = load_model(tmp / "m.sdsm");
  EXPECT_EQ(back.kind, ModelKind::DecisionTree);
  EXPECT_EQ(back.feature_set, FeatureSet::Structured);
  EXPECT_EQ(back.vocab, m.vocab);
  EXPECT_THROW(load_model(tmp / "missing.sdsm"), Error);
}

TEST(Model, SingleClassTrainingFails) {
  auto recs = toy_records(8);
  for (auto& r : recs) r.label = Label::Benign;
  EXPECT_THROW(train_model(recs, ModelKind::RandomForest, FeatureSet::Combined, Hyperparams{}, ExtractionConfig{}, 1),
               Error);
}
