#include <gtest/gtest.h>

#include <algorithm>

#include "support.hpp"

namespace physr {
namespace {

TEST(Parallel, VisitsEveryIndexOnce) {
  std::vector<int> hits(10007, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 1);
  EXPECT_TRUE(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
  parallel_for(0, [&](std::size_t) { FAIL(); });
}

TEST(Parallel, RethrowsWorkerFailure) {
  EXPECT_THROW(parallel_for(
                   1000, [](std::size_t i) { if (i == 777) throw ValidationError("boom"); }, 1),
               ValidationError);
}

}  // namespace
}  // namespace physr
