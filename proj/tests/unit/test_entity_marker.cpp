#include <gtest/gtest.h>

#include "oracle.hpp"
#include "polyrc/entity_marker.hpp"

using namespace polyrc;

namespace {

Vocabulary words_of(const std::vector<RCExample>& ex) {
  Vocabulary v;
  for (const auto& e : ex) {
    for (const auto& w : Vocabulary::input_words(e.text)) v.add(w);
  }
  return v;
}

}  // namespace

TEST(EntityMarker, MarkersFollowRoles) {
  const auto ex = oracle::example("e", "r");
  const auto vocab = words_of({ex});
  const auto m = mark_entities(ex, vocab, 64);
  // <e1> Alice </e1> met <e2> Bob </e2> today .
  ASSERT_EQ(m.ids.size(), 9u);
  EXPECT_EQ(m.head_start, 0u);
  EXPECT_EQ(m.tail_start, 4u);
  EXPECT_EQ(m.ids[0], Vocabulary::kHeadStart);
  EXPECT_EQ(m.ids[4], Vocabulary::kTailStart);
  EXPECT_EQ(m.ids[6], Vocabulary::kTailEnd);

  auto swapped = ex;
  std::swap(swapped.head, swapped.tail);
  const auto s = mark_entities(swapped, vocab, 64);
  EXPECT_EQ(s.head_start, 4u);
  EXPECT_EQ(s.tail_start, 0u);
  EXPECT_EQ(s.ids[0], Vocabulary::kTailStart);
}

TEST(EntityMarker, OneHotPositionsAndSwap) {
  const auto ex = oracle::example("e", "r");
  const auto vocab = words_of({ex});
  OneHotPositionEncoder enc(16);
  const auto pair = encode_entity_starts(enc, mark_entities(ex, vocab, 64));
  EXPECT_EQ(pair.first, Eigen::VectorXd::Unit(16, 0));
  EXPECT_EQ(pair.second, Eigen::VectorXd::Unit(16, 4));

  auto swapped = ex;
  std::swap(swapped.head, swapped.tail);
  const auto back = encode_entity_starts(enc, mark_entities(swapped, vocab, 64));
  EXPECT_EQ(back.first, pair.second);
  EXPECT_EQ(back.second, pair.first);
}

TEST(EntityMarker, OverflowIsAnError) {
  const auto ex = oracle::example("e", "r");
  EXPECT_THROW(mark_entities(ex, words_of({ex}), 8), BackendError);
  EXPECT_NO_THROW(mark_entities(ex, words_of({ex}), 9));
}

TEST(EntityMarker, OverfitsTwoClasses) {
  std::vector<RCExample> ex{
      {"1", "Alice married Bob yesterday.", {0, 5}, {14, 17}, "has-spouse", "en"},
      {"2", "Carol married Dan in May.", {0, 5}, {14, 17}, "has-spouse", "en"},
      {"3", "Erin wrote Dune long ago.", {11, 15}, {0, 4}, "has-author", "en"},
      {"4", "Fay wrote Emma.", {10, 14}, {0, 3}, "has-author", "en"},
      {"5", "Gus married Hal.", {0, 3}, {12, 15}, "has-spouse", "en"},
      {"6", "Ivy wrote Jaws.", {10, 14}, {0, 3}, "has-author", "en"},
  };
  EntityMarkerConfig cfg;
  cfg.dim = 16;
  cfg.epochs = 60;
  cfg.batch_size = 2;
  EntityMarkerModel model(words_of(ex), {"has-author", "has-spouse"}, cfg);
  const auto losses = model.train(ex);
  ASSERT_EQ(losses.size(), 60u);
  EXPECT_LT(losses.back(), losses.front());
  for (const auto& e : ex) EXPECT_EQ(model.predict(e), e.relation) << e.id;
  EXPECT_EQ(model.head().weight.cols(), 32);
}
