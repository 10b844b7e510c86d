#include "nliaudit/fetch.hpp"

#include <cstring>
#include <string>
#include <vector>

#include <zlib.h>

#include "doctest.h"
#include "nliaudit/errors.hpp"
#include "test_util.hpp"

using namespace nliaudit;
using testutil::TempDir;

namespace {

void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

struct ZipEntry {
  std::string name;
  std::string content;
  bool deflate = false;
};

std::string build_zip(const std::vector<ZipEntry>& entries) {
  std::string out;
  struct Placed {
    ZipEntry entry;
    std::string payload;
    std::uint32_t crc;
    std::uint32_t offset;
    std::uint16_t method;
  };
  std::vector<Placed> placed;

  for (const auto& e : entries) {
    Placed p;
    p.entry = e;
    p.offset = static_cast<std::uint32_t>(out.size());
    p.crc = static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(e.content.data()),
              static_cast<uInt>(e.content.size())));
    p.method = e.deflate ? 8 : 0;
    if (e.deflate) {
      z_stream strm{};
      deflateInit2(&strm, Z_DEFAULT_COMPRESSION, Z_DEFLATED, -MAX_WBITS, 8,
                   Z_DEFAULT_STRATEGY);
      std::string buf(e.content.size() + 64, '\0');
      strm.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(e.content.data()));
      strm.avail_in = static_cast<uInt>(e.content.size());
      strm.next_out = reinterpret_cast<Bytef*>(buf.data());
      strm.avail_out = static_cast<uInt>(buf.size());
      REQUIRE(deflate(&strm, Z_FINISH) == Z_STREAM_END);
      buf.resize(strm.total_out);
      deflateEnd(&strm);
      p.payload = buf;
    } else {
      p.payload = e.content;
    }

    put32(out, 0x04034b50);
    put16(out, 20);  // version needed
    put16(out, 0);   // flags
    put16(out, p.method);
    put16(out, 0);  // time
    put16(out, 0);  // date
    put32(out, p.crc);
    put32(out, static_cast<std::uint32_t>(p.payload.size()));
    put32(out, static_cast<std::uint32_t>(e.content.size()));
    put16(out, static_cast<std::uint16_t>(e.name.size()));
    put16(out, 0);  // extra len
    out += e.name;
    out += p.payload;
    placed.push_back(std::move(p));
  }

  std::uint32_t cd_offset = static_cast<std::uint32_t>(out.size());
  for (const auto& p : placed) {
    put32(out, 0x02014b50);
    put16(out, 20);  // made by
    put16(out, 20);  // needed
    put16(out, 0);   // flags
    put16(out, p.method);
    put16(out, 0);  // time
    put16(out, 0);  // date
    put32(out, p.crc);
    put32(out, static_cast<std::uint32_t>(p.payload.size()));
    put32(out, static_cast<std::uint32_t>(p.entry.content.size()));
    put16(out, static_cast<std::uint16_t>(p.entry.name.size()));
    put16(out, 0);  // extra
    put16(out, 0);  // comment
    put16(out, 0);  // disk
    put16(out, 0);  // internal attrs
    put32(out, 0);  // external attrs
    put32(out, p.offset);
    out += p.entry.name;
  }
  std::uint32_t cd_size = static_cast<std::uint32_t>(out.size()) - cd_offset;

  put32(out, 0x06054b50);
  put16(out, 0);  // disk
  put16(out, 0);  // cd disk
  put16(out, static_cast<std::uint16_t>(placed.size()));
  put16(out, static_cast<std::uint16_t>(placed.size()));
  put32(out, cd_size);
  put32(out, cd_offset);
  put16(out, 0);  // comment len
  return out;
}

}  // namespace

TEST_CASE("sha256 matches the known test vector") {
  TempDir dir;
  testutil::write_file(dir.file("abc.txt"), "abc");
  CHECK(sha256_file(dir.file("abc.txt")) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  testutil::write_file(dir.file("empty.txt"), "");
  CHECK(sha256_file(dir.file("empty.txt")) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("stored and deflated zip entries extract with directory structure") {
  TempDir dir;
  std::string zip = build_zip({
      {"data/", "", false},
      {"data/train.tsv", "p\th\tentailed\n", false},
      {"data/dev.tsv", std::string(5000, 'x') + "\tend\tnot-entailed\n", true},
  });
  testutil::write_file(dir.file("archive.zip"), zip);

  auto extracted = extract_zip(dir.file("archive.zip"), dir.file("out"));
  REQUIRE(extracted.size() == 2);
  CHECK(testutil::read_file(dir.path / "out" / "data" / "train.tsv") ==
        "p\th\tentailed\n");
  std::string dev = testutil::read_file(dir.path / "out" / "data" / "dev.tsv");
  CHECK(dev.size() == 5000 + std::strlen("\tend\tnot-entailed\n"));
  CHECK(dev.substr(0, 4) == "xxxx");
}

TEST_CASE("zip extraction rejects escaping paths and corrupt data") {
  TempDir dir;
  testutil::write_file(dir.file("escape.zip"), build_zip({{"../evil.txt", "x", false}}));
  CHECK_THROWS_WITH_AS(extract_zip(dir.file("escape.zip"), dir.file("out")),
                       doctest::Contains("escapes"), DataError);

  std::string corrupt = build_zip({{"a.txt", "hello", false}});
  corrupt[corrupt.find("hello")] = 'H';  // breaks the CRC
  testutil::write_file(dir.file("corrupt.zip"), corrupt);
  CHECK_THROWS_WITH_AS(extract_zip(dir.file("corrupt.zip"), dir.file("out2")),
                       doctest::Contains("CRC"), DataError);

  testutil::write_file(dir.file("not_a.zip"), "this is not an archive at all");
  CHECK_THROWS_AS(extract_zip(dir.file("not_a.zip"), dir.file("out3")), DataError);
}

TEST_CASE("fetch_archive over file:// downloads, checksums, and extracts") {
  TempDir dir;
  std::string zip = build_zip({{"spr/train.tsv", "p\th\tentailed\n", true}});
  testutil::write_file(dir.file("source.zip"), zip);

  std::string url = "file://" + dir.file("source.zip").string();
  FetchResult result = fetch_archive(url, dir.file("fetched"));
  CHECK(result.archive_path.filename() == "source.zip");
  CHECK(result.sha256_hex == sha256_file(dir.file("source.zip")));
  REQUIRE(result.extracted.size() == 1);
  CHECK(testutil::read_file(result.extracted[0]) == "p\th\tentailed\n");

  // the checksum seen is recorded next to the archive
  std::string recorded = testutil::read_file(dir.path / "fetched" / "source.zip.sha256");
  CHECK(recorded == result.sha256_hex + "  source.zip\n");
}

TEST_CASE("fetch_archive fails cleanly on unreachable sources") {
  TempDir dir;
  CHECK_THROWS_AS(fetch_archive("file:///nonexistent/nliaudit.zip", dir.file("out")),
                  DataError);
}
