// SPDX-License-Identifier: Apache-2.0
//
// Flat key=value text files and tab-separated tables. All numeric output is
// printed with 17 significant digits so doubles round-trip exactly.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace crbmo {

/// %.17g rendering of a double (bit-exact strtod round trip).
std::string format_g17(double v);

/// One parsed `key = value` line.
struct KvEntry {
  std::string key;
  std::string value;
  int line = 0;  // 1-based line number, for diagnostics
};

/// Parses `key = value` lines; '#' starts a comment, blank lines are
/// skipped. Throws std::runtime_error with file:line diagnostics.
std::vector<KvEntry> parse_kv_text(const std::string& text, const std::string& source_name);
std::vector<KvEntry> parse_kv_file(const std::string& path);

/// Ordered key=value view with typed, diagnostic-carrying accessors.
class KvReader {
 public:
  KvReader(std::vector<KvEntry> entries, std::string source_name);

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  int64_t get_int(const std::string& key) const;
  int64_t get_int(const std::string& key, int64_t fallback) const;
  uint64_t get_uint(const std::string& key) const;
  uint64_t get_uint(const std::string& key, uint64_t fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;  // comma-separated

  /// Keys never read through the accessors above; used to reject unknown keys.
  std::vector<std::string> unread_keys() const;

  const std::string& source_name() const { return source_name_; }
  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  const KvEntry* find(const std::string& key) const;
  std::vector<KvEntry> entries_;
  std::string source_name_;
  mutable std::vector<bool> read_;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Tab-separated table with '#' metadata lines and a one-line header.
class TableWriter {
 public:
  explicit TableWriter(std::vector<std::string> columns);
  void add_comment(const std::string& text);  // emitted as "# text"
  void begin_row();
  void add(const std::string& v);
  void add(double v);
  void add(int64_t v);
  std::string str() const;

 private:
  std::vector<std::string> columns_;
  std::vector<std::string> comments_;
  std::vector<std::vector<std::string>> rows_;
};

}  // namespace crbmo
