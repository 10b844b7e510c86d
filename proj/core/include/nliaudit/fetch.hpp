#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace nliaudit {

struct FetchResult {
  std::filesystem::path archive_path;
  std::string sha256_hex;                        // recorded to <archive>.sha256
  std::vector<std::filesystem::path> extracted;  // empty when extract=false
};

// Downloads `url` into `out_dir`, records the SHA-256 it saw alongside the
// archive, and (by default) extracts it. Nothing in the library calls this
// implicitly; it backs the explicit `fetch` CLI subcommand only.
FetchResult fetch_archive(std::string_view url, const std::filesystem::path& out_dir,
                          bool extract = true);

std::string sha256_file(const std::filesystem::path& path);

// Minimal zip reader: stored and deflate entries, CRC-verified, rejects
// entries that would escape dest. Returns the extracted file paths.
std::vector<std::filesystem::path> extract_zip(const std::filesystem::path& zip_path,
                                               const std::filesystem::path& dest);

}  // namespace nliaudit
