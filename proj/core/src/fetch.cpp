#include "nliaudit/fetch.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

#include <curl/curl.h>
#include <openssl/evp.h>
#include <zlib.h>

#include "nliaudit/errors.hpp"

namespace nliaudit {

namespace {

size_t write_to_stream(char* ptr, size_t size, size_t nmemb, void* userdata) {
  auto* out = static_cast<std::ofstream*>(userdata);
  out->write(ptr, static_cast<std::streamsize>(size * nmemb));
  return out->good() ? size * nmemb : 0;
}

void download(std::string_view url, const std::filesystem::path& target) {
  std::ofstream out(target, std::ios::binary);
  if (!out)
    throw DataError("fetch", "cannot write " + target.string());

  CURL* curl = curl_easy_init();
  if (!curl)
    throw DataError("fetch", "curl initialization failed");
  std::string url_str(url);
  curl_easy_setopt(curl, CURLOPT_URL, url_str.c_str());
  curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
  curl_easy_setopt(curl, CURLOPT_MAXREDIRS, 10L);
  curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
  curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, write_to_stream);
  curl_easy_setopt(curl, CURLOPT_WRITEDATA, &out);
  curl_easy_setopt(curl, CURLOPT_USERAGENT, "nliaudit-fetch/0.1");
  CURLcode rc = curl_easy_perform(curl);
  curl_easy_cleanup(curl);
  out.flush();

  if (rc != CURLE_OK)
    throw DataError("fetch", "download of " + url_str + " failed: " +
                                 curl_easy_strerror(rc));
  if (!out)
    throw DataError("fetch", "write failed for " + target.string());
}

// Little-endian field readers for the zip structures.
std::uint16_t rd16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}
std::uint32_t rd32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::vector<unsigned char> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("fetch", "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<unsigned char> inflate_raw(const unsigned char* data, std::size_t csize,
                                       std::size_t usize) {
  std::vector<unsigned char> out(usize);
  z_stream strm{};
  if (inflateInit2(&strm, -MAX_WBITS) != Z_OK)
    throw DataError("fetch", "zlib init failed");
  strm.next_in = const_cast<unsigned char*>(data);
  strm.avail_in = static_cast<uInt>(csize);
  strm.next_out = out.data();
  strm.avail_out = static_cast<uInt>(usize);
  int rc = inflate(&strm, Z_FINISH);
  inflateEnd(&strm);
  if (rc != Z_STREAM_END || strm.total_out != usize)
    throw DataError("fetch", "corrupt deflate stream in archive");
  return out;
}

bool path_escapes(const std::filesystem::path& rel) {
  if (rel.is_absolute()) return true;
  for (const auto& part : rel)
    if (part == "..") return true;
  return false;
}

}  // namespace

std::string sha256_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw DataError("fetch", "cannot read " + path.string());

  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw DataError("fetch", "sha256 initialization failed");
  }
  char buf[1 << 16];
  while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    if (in.eof()) break;
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, digest, &len);
  EVP_MD_CTX_free(ctx);

  static const char hex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[digest[i] >> 4]);
    out.push_back(hex[digest[i] & 0xf]);
  }
  return out;
}

std::vector<std::filesystem::path> extract_zip(const std::filesystem::path& zip_path,
                                               const std::filesystem::path& dest) {
  const std::vector<unsigned char> bytes = read_file(zip_path);
  if (bytes.size() < 22)
    throw DataError("fetch", zip_path.string() + " is not a zip archive");

  // End-of-central-directory: scan backwards, the record allows a trailing
  // comment of up to 64K.
  constexpr std::uint32_t kEocdSig = 0x06054b50;
  std::size_t eocd = std::string::npos;
  std::size_t lo = bytes.size() > 22 + 65535 ? bytes.size() - 22 - 65535 : 0;
  for (std::size_t i = bytes.size() - 22 + 1; i-- > lo;) {
    if (rd32(&bytes[i]) == kEocdSig) {
      eocd = i;
      break;
    }
  }
  if (eocd == std::string::npos)
    throw DataError("fetch", zip_path.string() + ": end-of-central-directory not found");

  std::uint16_t entry_count = rd16(&bytes[eocd + 10]);
  std::uint32_t cd_offset = rd32(&bytes[eocd + 16]);
  if (entry_count == 0xFFFF || cd_offset == 0xFFFFFFFF)
    throw DataError("fetch", zip_path.string() + ": zip64 archives are not supported");

  std::vector<std::filesystem::path> extracted;
  std::size_t pos = cd_offset;
  for (std::uint16_t e = 0; e < entry_count; ++e) {
    if (pos + 46 > bytes.size() || rd32(&bytes[pos]) != 0x02014b50)
      throw DataError("fetch", zip_path.string() + ": corrupt central directory");
    std::uint16_t method = rd16(&bytes[pos + 10]);
    std::uint32_t crc = rd32(&bytes[pos + 16]);
    std::uint32_t csize = rd32(&bytes[pos + 20]);
    std::uint32_t usize = rd32(&bytes[pos + 24]);
    std::uint16_t nlen = rd16(&bytes[pos + 28]);
    std::uint16_t xlen = rd16(&bytes[pos + 30]);
    std::uint16_t clen = rd16(&bytes[pos + 32]);
    std::uint32_t local_off = rd32(&bytes[pos + 42]);
    if (pos + 46 + nlen + xlen + clen > bytes.size())
      throw DataError("fetch", zip_path.string() + ": corrupt central directory");
    std::string name(reinterpret_cast<const char*>(&bytes[pos + 46]), nlen);
    pos += 46 + nlen + xlen + clen;

    std::filesystem::path rel(name);
    if (path_escapes(rel))
      throw DataError("fetch", zip_path.string() + ": entry escapes destination: " + name);

    if (!name.empty() && name.back() == '/') {
      std::filesystem::create_directories(dest / rel);
      continue;
    }

    if (local_off + 30 > bytes.size() || rd32(&bytes[local_off]) != 0x04034b50)
      throw DataError("fetch", zip_path.string() + ": corrupt local header for " + name);
    std::uint16_t lnlen = rd16(&bytes[local_off + 26]);
    std::uint16_t lxlen = rd16(&bytes[local_off + 28]);
    std::size_t data_off = local_off + 30 + lnlen + lxlen;
    if (data_off + csize > bytes.size())
      throw DataError("fetch", zip_path.string() + ": truncated entry " + name);

    std::vector<unsigned char> data;
    if (method == 0) {
      if (csize != usize)
        throw DataError("fetch", zip_path.string() + ": bad stored entry " + name);
      data.assign(bytes.begin() + static_cast<std::ptrdiff_t>(data_off),
                  bytes.begin() + static_cast<std::ptrdiff_t>(data_off + csize));
    } else if (method == 8) {
      data = inflate_raw(&bytes[data_off], csize, usize);
    } else {
      throw DataError("fetch", zip_path.string() + ": unsupported compression method " +
                                   std::to_string(method) + " for " + name);
    }

    std::uint32_t actual_crc =
        static_cast<std::uint32_t>(crc32(0L, data.data(), static_cast<uInt>(data.size())));
    if (actual_crc != crc)
      throw DataError("fetch", zip_path.string() + ": CRC mismatch for " + name);

    std::filesystem::path target = dest / rel;
    std::filesystem::create_directories(target.parent_path());
    std::ofstream out(target, std::ios::binary);
    if (!out)
      throw DataError("fetch", "cannot write " + target.string());
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
    if (!out)
      throw DataError("fetch", "write failed for " + target.string());
    extracted.push_back(target);
  }
  return extracted;
}

FetchResult fetch_archive(std::string_view url, const std::filesystem::path& out_dir,
                          bool extract) {
  std::filesystem::create_directories(out_dir);

  std::string filename = "archive.zip";
  if (auto slash = url.find_last_of('/'); slash != std::string_view::npos &&
                                          slash + 1 < url.size())
    filename = std::string(url.substr(slash + 1));

  FetchResult result;
  result.archive_path = out_dir / filename;
  download(url, result.archive_path);
  result.sha256_hex = sha256_file(result.archive_path);

  // Record the checksum we saw next to the archive.
  std::filesystem::path sum_path = result.archive_path;
  sum_path += ".sha256";
  std::ofstream sum(sum_path, std::ios::binary);
  sum << result.sha256_hex << "  " << filename << "\n";

  if (extract) result.extracted = extract_zip(result.archive_path, out_dir);
  return result;
}

}  // namespace nliaudit
