#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <set>
#include <thread>

#include "ccsv/digest.hpp"
#include "ccsv/error.hpp"
#include "ccsv/index/measurement_index.hpp"
#include "support/test_support.hpp"

using namespace ccsv;
namespace ts = testing_support;

namespace {

std::string index_code(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return "none";
}

std::string result_text(const SearchResult& r) {
  std::string out = std::to_string(r.total) + "/" + std::to_string(r.offset) + "/" + std::to_string(r.limit) + "\n";
  for (const auto& rec : r.records) out += rec.record_id + "," + rec.timestamp.to_iso8601() + "," + rec.value + "\n";
  for (const auto& [f, counts] : r.facets)
    for (const auto& c : counts) out += f + "=" + c.value + ":" + std::to_string(c.count) + "\n";
  return out;
}

}  // namespace

TEST(FieldSchema, StandardShape) {
  const auto s = FieldSchema::standard();
  EXPECT_EQ(s.fields().size(), kFieldCount);
  EXPECT_EQ(s.find("timestamp")->kind, FieldKind::Instant);
  EXPECT_EQ(s.find("latitude")->kind, FieldKind::Decimal);
  EXPECT_EQ(s.find("instrument")->kind, FieldKind::Keyword);
  EXPECT_EQ(s.facetable(),
            (std::vector<std::string>{"characteristic", "unit", "instrument", "platform", "data_collection"}));
  EXPECT_EQ(s.fingerprint(), FieldSchema::standard().fingerprint());
  EXPECT_NE(s.fingerprint(), FieldSchema::standard({"instrument"}).fingerprint());
}

TEST(FieldSchema, RejectsBrokenSchemas) {
  EXPECT_EQ(index_code([] { FieldSchema({{"record_id", FieldKind::Keyword}, {"nope", FieldKind::Keyword}}); }),
            "SchemaInvalid");
  EXPECT_EQ(index_code([] {
              FieldSchema({{"record_id", FieldKind::Keyword},
                           {"timestamp", FieldKind::Instant},
                           {"value", FieldKind::Text, true}});
            }),
            "SchemaInvalid");
  EXPECT_EQ(index_code([] { FieldSchema({{"record_id", FieldKind::Keyword}, {"record_id", FieldKind::Keyword}}); }),
            "SchemaInvalid");
  EXPECT_EQ(index_code([] { FieldSchema::standard({"value"}); }), "SchemaInvalid");
}

TEST(Index, EmptyIndexAnswersNothing) {
  MeasurementIndex index;
  FacetedQuery q;
  q.facets = {"instrument"};
  const auto r = index.search(q);
  EXPECT_EQ(r.total, 0u);
  EXPECT_TRUE(r.records.empty());
  EXPECT_TRUE(r.facets.at("instrument").empty());
}

TEST(Index, QueryErrors) {
  MeasurementIndex index;
  FacetedQuery q;
  q.filters = {{"colour", "red"}};
  EXPECT_EQ(index_code([&] { index.search(q); }), "UnknownField");
  q = {};
  q.facets = {"value"};
  EXPECT_EQ(index_code([&] { index.search(q); }), "NotFacetable");
  q = {};
  q.limit = 0;
  EXPECT_EQ(index_code([&] { index.search(q); }), "InvalidQuery");
  q.limit = FacetedQuery::kMaxLimit + 1;
  EXPECT_EQ(index_code([&] { index.search(q); }), "InvalidQuery");
  q = {};
  q.from = Instant::from_epoch_seconds(10);
  q.to = Instant::from_epoch_seconds(5);
  EXPECT_EQ(index_code([&] { index.search(q); }), "InvalidQuery");
  q = {};
  q.sort.field = "nope";
  EXPECT_EQ(index_code([&] { index.search(q); }), "UnknownField");
}

// Oracle: linear scan over the records with last-write-wins per record_id.
TEST(Index, AgreesWithLinearScan) {
  std::mt19937_64 rng(42);
  const auto records = ts::random_records(rng, 3000);
  MeasurementIndex index;
  index.index_records(records);
  for (int i = 0; i < 150; ++i) {
    const auto q = ts::random_query(rng);
    EXPECT_EQ(ts::compare_with_oracle(index, q, ts::oracle_search(records, q)), "") << "query " << i;
  }
}

TEST(Index, TimestampEqualityFilter) {
  std::mt19937_64 rng(6);
  const auto records = ts::random_records(rng, 500);
  MeasurementIndex index;
  index.index_records(records);
  FacetedQuery q;
  q.filters = {{"timestamp", records[17].timestamp.to_iso8601()}};
  EXPECT_EQ(ts::compare_with_oracle(index, q, ts::oracle_search(records, q)), "");
  EXPECT_GE(index.search(q).total, 1u);
}

TEST(Index, FacetsPartitionTheTotal) {
  std::mt19937_64 rng(7);
  const auto records = ts::random_records(rng, 2000);
  MeasurementIndex index;
  index.index_records(records);
  for (int i = 0; i < 50; ++i) {
    auto q = ts::random_query(rng);
    q.facets = {"instrument", "platform", "characteristic", "unit", "data_collection"};
    const auto r = index.search(q);
    for (const auto& [field, counts] : r.facets) {
      std::size_t sum = 0;
      for (const auto& c : counts) sum += c.count;
      EXPECT_EQ(sum, r.total) << field;
      EXPECT_TRUE(std::is_sorted(counts.begin(), counts.end(), [](const FacetCount& a, const FacetCount& b) {
        return a.count != b.count ? a.count > b.count : a.value < b.value;
      }));
    }
  }
}

TEST(Index, AddingAFilterNeverGrowsTheResult) {
  std::mt19937_64 rng(8);
  const auto records = ts::random_records(rng, 1500);
  MeasurementIndex index;
  index.index_records(records);
  for (int i = 0; i < 60; ++i) {
    auto q = ts::random_query(rng);
    const auto before = index.search(q).total;
    auto narrower = q;
    narrower.filters.emplace_back("unit", records[rng() % records.size()].unit);
    EXPECT_LE(index.search(narrower).total, before);
  }
}

TEST(Index, PagesAreOrderedAndDisjoint) {
  std::mt19937_64 rng(9);
  const auto records = ts::random_records(rng, 800);
  MeasurementIndex index;
  index.index_records(records);
  for (const std::string field : {"timestamp", "value", "latitude", "instrument"}) {
    for (bool desc : {false, true}) {
      FacetedQuery q;
      q.sort = {field, desc};
      q.limit = 37;
      std::vector<MeasurementRecord> seen;
      for (q.offset = 0; q.offset < 800; q.offset += q.limit) {
        const auto page = index.search(q);
        seen.insert(seen.end(), page.records.begin(), page.records.end());
      }
      ASSERT_EQ(seen.size(), 800u);
      FacetedQuery all;
      all.sort = {field, desc};
      all.limit = 1000;
      const auto whole = index.search(all).records;
      EXPECT_EQ(seen, whole) << field;
      if (field == "timestamp") {
        EXPECT_TRUE(std::is_sorted(whole.begin(), whole.end(), [&](const auto& a, const auto& b) {
          return desc ? b.timestamp < a.timestamp : a.timestamp < b.timestamp;
        }));
      }
      if (field == "value") {
        EXPECT_TRUE(std::is_sorted(whole.begin(), whole.end(), [&](const auto& a, const auto& b) {
          return desc ? std::stod(b.value) < std::stod(a.value) : std::stod(a.value) < std::stod(b.value);
        }));
      }
    }
  }
}

TEST(Index, OffsetPastTheEnd) {
  std::mt19937_64 rng(10);
  MeasurementIndex index;
  index.index_records(ts::random_records(rng, 10));
  FacetedQuery q;
  q.offset = 50;
  const auto r = index.search(q);
  EXPECT_EQ(r.total, 10u);
  EXPECT_TRUE(r.records.empty());
}

TEST(Index, ReindexingIsIdempotentAndReplaces) {
  std::mt19937_64 rng(11);
  auto records = ts::random_records(rng, 400);
  MeasurementIndex index;
  EXPECT_EQ(index.index_records(records), 400u);
  index.index_records(records);
  EXPECT_EQ(index.size(), 400u);

  auto changed = records;
  for (std::size_t i = 0; i < changed.size(); i += 3) changed[i].instrument = ts::base() + "checkpoint-9";
  index.index_records(changed);
  EXPECT_EQ(index.size(), 400u);
  FacetedQuery q;
  q.filters = {{"instrument", ts::base() + "checkpoint-9"}};
  EXPECT_EQ(index.search(q).total, 134u);

  std::vector<MeasurementRecord> history = records;
  history.insert(history.end(), changed.begin(), changed.end());
  std::mt19937_64 qrng(12);
  for (int i = 0; i < 40; ++i) {
    const auto rq = ts::random_query(qrng);
    EXPECT_EQ(ts::compare_with_oracle(index, rq, ts::oracle_search(history, rq)), "");
  }
}

TEST(Index, BadBatchChangesNothing) {
  std::mt19937_64 rng(13);
  MeasurementIndex index;
  index.index_records(ts::random_records(rng, 50));
  const std::string before = index.snapshot_bytes();

  auto batch = ts::random_records(rng, 20);
  batch[19].record_id = "";
  EXPECT_EQ(index_code([&] { index.index_records(batch); }), "InvalidRecord");
  batch[19].record_id = "x";
  batch[19].latitude = "91";
  EXPECT_EQ(index_code([&] { index.index_records(batch); }), "InvalidRecord");
  batch[19].latitude = "-3.7";
  batch[19].instrument = "";
  EXPECT_EQ(index_code([&] { index.index_records(batch); }), "InvalidRecord");
  EXPECT_EQ(index.snapshot_bytes(), before);

  MeasurementIndex narrow(FieldSchema({{"record_id", FieldKind::Keyword},
                                       {"timestamp", FieldKind::Instant},
                                       {"instrument", FieldKind::Keyword, true},
                                       {"characteristic", FieldKind::Keyword},
                                       {"unit", FieldKind::Keyword},
                                       {"data_collection", FieldKind::Keyword},
                                       {"dataset", FieldKind::Keyword}}));
  EXPECT_EQ(index_code([&] { narrow.index_records(ts::random_records(rng, 3)); }), "SchemaMismatch");
  EXPECT_EQ(narrow.size(), 0u);
}

TEST(Index, ConcurrentSearchesDuringWrites) {
  std::mt19937_64 rng(14);
  const auto records = ts::random_records(rng, 2000);
  MeasurementIndex index;
  std::atomic<bool> done{false};
  std::atomic<int> torn{0};
  std::thread reader([&] {
    FacetedQuery q;
    q.facets = {"instrument"};
    while (!done) {
      const auto r = index.search(q);
      std::size_t sum = 0;
      for (const auto& c : r.facets.at("instrument")) sum += c.count;
      // Batches are 100 records; a partial batch would show up here.
      if (sum != r.total || r.total % 100 != 0) ++torn;
    }
  });
  for (std::size_t at = 0; at < records.size(); at += 100)
    index.index_records({records.begin() + at, records.begin() + at + 100});
  done = true;
  reader.join();
  EXPECT_EQ(torn, 0);
}

// ---- snapshots ---------------------------------------------------------------

TEST(Snapshot, RoundTripAnswersIdentically) {
  std::mt19937_64 rng(15);
  const auto records = ts::random_records(rng, 2500);
  MeasurementIndex a;
  a.index_records(records);
  ts::TempDir dir("snap");
  a.snapshot(dir / "i.snap");
  EXPECT_FALSE(std::filesystem::exists(dir / "i.snap.tmp"));
  MeasurementIndex b;
  b.restore(dir / "i.snap");
  EXPECT_EQ(b.size(), a.size());
  EXPECT_EQ(b.snapshot_bytes(), a.snapshot_bytes());
  for (int i = 0; i < 50; ++i) {
    const auto q = ts::random_query(rng);
    EXPECT_EQ(result_text(b.search(q)), result_text(a.search(q)));
  }
}

TEST(Snapshot, EmptyIndexRoundTrips) {
  MeasurementIndex a, b;
  b.restore_bytes(a.snapshot_bytes());
  EXPECT_EQ(b.size(), 0u);
}

TEST(Snapshot, HeaderLayout) {
  std::mt19937_64 rng(16);
  MeasurementIndex a;
  a.index_records(ts::random_records(rng, 3));
  const std::string bytes = a.snapshot_bytes();
  ASSERT_GT(bytes.size(), 32u + 32u);
  EXPECT_EQ(bytes.substr(0, 8), "CCSVSNAP");
  EXPECT_EQ(static_cast<unsigned char>(bytes[8]), 1u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[20]), 3u);  // record count, little-endian
  const auto trailer = bytes.substr(bytes.size() - 32);
  const auto digest = sha256(std::string_view(bytes).substr(0, bytes.size() - 32));
  EXPECT_EQ(trailer, std::string(digest.begin(), digest.end()));
}

TEST(Snapshot, DamageIsDetectedAndHarmless) {
  std::mt19937_64 rng(17);
  MeasurementIndex a;
  a.index_records(ts::random_records(rng, 200));
  const std::string good = a.snapshot_bytes();

  MeasurementIndex b;
  b.index_records(ts::random_records(rng, 7));
  const std::string before = b.snapshot_bytes();

  for (std::size_t cut : {std::size_t{0}, std::size_t{5}, std::size_t{30}, good.size() / 2, good.size() - 1}) {
    EXPECT_EQ(index_code([&] { b.restore_bytes(good.substr(0, cut)); }), "CorruptSnapshot") << cut;
  }
  for (int i = 0; i < 40; ++i) {
    std::string bad = good;
    const std::size_t at = 36 + rng() % (bad.size() - 36);
    bad[at] = static_cast<char>(bad[at] ^ (1 + rng() % 255));
    EXPECT_EQ(index_code([&] { b.restore_bytes(bad); }), "CorruptSnapshot") << at;
  }
  std::string bad = good;
  bad[0] = 'X';
  EXPECT_EQ(index_code([&] { b.restore_bytes(bad); }), "CorruptSnapshot");
  EXPECT_EQ(b.snapshot_bytes(), before);
  EXPECT_EQ(index_code([&] { b.restore("/nonexistent/dir/x.snap"); }), "SnapshotIO");
}

TEST(Snapshot, VersionAndSchemaMismatch) {
  MeasurementIndex a;
  std::string bytes = a.snapshot_bytes();
  bytes[8] = 2;
  MeasurementIndex b;
  EXPECT_EQ(index_code([&] { b.restore_bytes(bytes); }), "VersionMismatch");

  MeasurementIndex other(FieldSchema::standard({"instrument"}));
  EXPECT_EQ(index_code([&] { b.restore_bytes(other.snapshot_bytes()); }), "VersionMismatch");
}
