#include <gtest/gtest.h>

#include <cstdlib>
#include <stdexcept>
#include <vector>

#include "superres/parallel.hpp"

using namespace superres;

TEST(Parallel, VisitsEveryIndexOnce) {
  std::vector<int> hits(1000, 0);
  parallel_for(hits.size(), [&](std::size_t i) { hits[i] += 1; }, 4);
  for (int h : hits) EXPECT_EQ(h, 1);
}

TEST(Parallel, RethrowsLowestFailingIndex) {
  try {
    parallel_for(100, [](std::size_t i) {
      if (i % 10 == 7) throw std::runtime_error(std::to_string(i));
    }, 3);
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "7");
  }
}

TEST(Parallel, WorkerCountFromEnvironment) {
  setenv("SUPERRES_WORKERS", "3", 1);
  EXPECT_EQ(worker_count(), 3u);
  setenv("SUPERRES_WORKERS", "junk", 1);
  EXPECT_GE(worker_count(), 1u);
  unsetenv("SUPERRES_WORKERS");
}
