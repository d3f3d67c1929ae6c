#include <gtest/gtest.h>

#include <set>
#include <stdexcept>
#include <vector>

#include "manet/engine.hpp"

using namespace manet;

TEST(SimTime, ConversionsAndRendering) {
  EXPECT_EQ(SimTime::from_ms(3).ns(), 3'000'000);
  EXPECT_EQ(SimTime::from_us(20).ns(), 20'000);
  EXPECT_EQ(SimTime::from_seconds(1.5).ns(), 1'500'000'000);
  EXPECT_EQ(SimTime::from_seconds(12.0005).str(), "12.000500000");
  EXPECT_EQ(SimTime{}.str(), "0.000000000");
  EXPECT_LT(SimTime::from_ms(1), SimTime::from_ms(2));
  EXPECT_EQ((SimTime::from_ms(2) * 3).ns(), SimTime::from_ms(6).ns());
}

TEST(Scheduler, FiresInTimeThenInsertionOrder) {
  Scheduler s;
  std::vector<int> order;
  s.schedule(SimTime::from_ms(5), [&] { order.push_back(3); });
  s.schedule(SimTime::from_ms(1), [&] { order.push_back(1); });
  s.schedule(SimTime::from_ms(5), [&] { order.push_back(4); });
  s.schedule(SimTime::from_ms(2), [&] { order.push_back(2); });
  s.run_until(SimTime::from_seconds(1.0));
  EXPECT_EQ(order, (std::vector<int>{1, 2, 3, 4}));
  EXPECT_EQ(s.now(), SimTime::from_seconds(1.0));
  EXPECT_EQ(s.fired(), 4u);
}

TEST(Scheduler, SameTimeEventsScheduledDuringExecutionRunAfterEarlierOnes) {
  Scheduler s;
  std::vector<int> order;
  s.schedule(SimTime::from_ms(1), [&] {
    order.push_back(1);
    s.schedule_in(SimTime{}, [&] { order.push_back(3); });
  });
  s.schedule(SimTime::from_ms(1), [&] { order.push_back(2); });
  s.run_until(SimTime::from_ms(10));
  EXPECT_EQ(order, (std::vector<int>{1, 2, 3}));
}

TEST(Scheduler, CancelPreventsFiring) {
  Scheduler s;
  int fired = 0;
  auto h = s.schedule(SimTime::from_ms(1), [&] { ++fired; });
  EXPECT_TRUE(s.pending(h));
  EXPECT_TRUE(s.cancel(h));
  EXPECT_FALSE(s.pending(h));
  EXPECT_FALSE(s.cancel(h));
  EXPECT_FALSE(s.cancel(EventHandle{}));
  s.run_until(SimTime::from_ms(2));
  EXPECT_EQ(fired, 0);
}

TEST(Scheduler, SchedulingInThePastThrows) {
  Scheduler s;
  s.run_until(SimTime::from_ms(10));
  EXPECT_THROW(s.schedule(SimTime::from_ms(9), [] {}), std::logic_error);
  EXPECT_NO_THROW(s.schedule(SimTime::from_ms(10), [] {}));
}

TEST(Scheduler, RunUntilLeavesLaterEventsAsResidue) {
  Scheduler s;
  int fired = 0;
  s.schedule(SimTime::from_ms(1), [&] { ++fired; });
  s.schedule(SimTime::from_ms(10), [&] { ++fired; });
  s.schedule(SimTime::from_ms(11), [&] { ++fired; });
  s.run_until(SimTime::from_ms(10));
  EXPECT_EQ(fired, 2);
  EXPECT_EQ(s.residue(), 1u);
}

TEST(EventLog, FormatsTabSeparatedLines) {
  LogCollector c;
  EventLog log(c.sink());
  log.write(SimTime::from_ms(1500), 7, "RREQ", "{} {}", 3, "x");
  ASSERT_EQ(c.lines.size(), 1u);
  EXPECT_EQ(c.lines[0], "1.500000000\t7\tRREQ\t3 x");
  EventLog off;
  EXPECT_FALSE(off.enabled());
  off.write(SimTime{}, 0, "X", "nothing");
}

TEST(RngStream, SameSeedAndLabelReproduce) {
  RngStream a(42, "mobility", 3), b(42, "mobility", 3);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a.next(), b.next());
}

TEST(RngStream, LabelsAndIndicesAreIndependent) {
  std::set<std::uint64_t> seeds;
  for (const char* label : {"mobility", "traffic", "mac-backoff", "jitter", "reply-delay"})
    for (std::uint64_t i = 0; i < 10; ++i) seeds.insert(derive_seed(7, label, i));
  EXPECT_EQ(seeds.size(), 50u);
  EXPECT_NE(derive_seed(1, "traffic", 0), derive_seed(2, "traffic", 0));
}

TEST(RngStream, UniformRanges) {
  RngStream r(1, "test");
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = r.uniform_open_closed();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
    const auto k = r.uniform_int(1, 100);
    ASSERT_GE(k, 1u);
    ASSERT_LE(k, 100u);
  }
}

TEST(RngStream, UniformIntCoversRangeEvenly) {
  RngStream r(9, "test");
  std::vector<int> hist(6, 0);
  const int n = 60000;
  for (int i = 0; i < n; ++i) ++hist[r.uniform_int(0, 5)];
  for (int h : hist) EXPECT_NEAR(h, n / 6, n / 6 * 0.05);
}

TEST(SimTime, WholeSecondsRoundTripExactly) {
  // Trace lookups at the run end must not overshoot the duration.
  for (double s : {1.0, 30.0, 300.0, 500.0, 900.0}) EXPECT_EQ(SimTime::from_seconds(s).seconds(), s);
}
