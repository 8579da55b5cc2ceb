// SPDX-License-Identifier: Apache-2.0

#include "crbmo/text_io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace crbmo {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<KvEntry> parse_kv_text(const std::string& text, const std::string& source_name) {
  std::vector<KvEntry> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(source_name + ":" + std::to_string(lineno) +
                               ": expected `key = value`");
    KvEntry e;
    e.key = trim(line.substr(0, eq));
    e.value = trim(line.substr(eq + 1));
    e.line = lineno;
    if (e.key.empty())
      throw std::runtime_error(source_name + ":" + std::to_string(lineno) + ": empty key");
    out.push_back(std::move(e));
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<KvEntry> parse_kv_file(const std::string& path) {
  return parse_kv_text(read_text_file(path), path);
}

KvReader::KvReader(std::vector<KvEntry> entries, std::string source_name)
    : entries_(std::move(entries)), source_name_(std::move(source_name)) {
  read_.assign(entries_.size(), false);
  for (std::size_t i = 0; i < entries_.size(); ++i)
    for (std::size_t j = i + 1; j < entries_.size(); ++j)
      if (entries_[i].key == entries_[j].key)
        throw std::runtime_error(source_name_ + ":" + std::to_string(entries_[j].line) +
                                 ": duplicate key '" + entries_[j].key + "'");
}

const KvEntry* KvReader::find(const std::string& key) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].key == key) {
      read_[i] = true;
      return &entries_[i];
    }
  }
  return nullptr;
}

bool KvReader::has(const std::string& key) const { return find(key) != nullptr; }

void KvReader::fail(const std::string& key, const std::string& message) const {
  int line = 0;
  for (const auto& e : entries_)
    if (e.key == key) line = e.line;
  throw std::runtime_error(source_name_ + ":" + std::to_string(line) + ": key '" + key +
                           "': " + message);
}

std::string KvReader::get_string(const std::string& key) const {
  const auto* e = find(key);
  if (!e) throw std::runtime_error(source_name_ + ": missing required key '" + key + "'");
  return e->value;
}

std::string KvReader::get_string(const std::string& key, const std::string& fallback) const {
  const auto* e = find(key);
  return e ? e->value : fallback;
}

double KvReader::get_double(const std::string& key) const {
  const std::string s = get_string(key);
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || s.empty()) fail(key, "not a number: '" + s + "'");
  return v;
}

double KvReader::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

int64_t KvReader::get_int(const std::string& key) const {
  const std::string s = get_string(key);
  char* end = nullptr;
  const long long v = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || s.empty()) fail(key, "not an integer: '" + s + "'");
  return v;
}

int64_t KvReader::get_int(const std::string& key, int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

uint64_t KvReader::get_uint(const std::string& key) const {
  const std::string s = get_string(key);
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || s.empty() || s[0] == '-')
    fail(key, "not an unsigned integer: '" + s + "'");
  return v;
}

uint64_t KvReader::get_uint(const std::string& key, uint64_t fallback) const {
  return has(key) ? get_uint(key) : fallback;
}

std::vector<double> KvReader::get_double_list(const std::string& key) const {
  const std::string s = get_string(key);
  std::vector<double> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) fail(key, "empty list element");
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end != item.c_str() + item.size()) fail(key, "not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) fail(key, "empty list");
  return out;
}

std::vector<std::string> KvReader::unread_keys() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < entries_.size(); ++i)
    if (!read_[i]) out.push_back(entries_[i].key);
  return out;
}

TableWriter::TableWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void TableWriter::add_comment(const std::string& text) { comments_.push_back(text); }

void TableWriter::begin_row() { rows_.emplace_back(); }

void TableWriter::add(const std::string& v) { rows_.back().push_back(v); }
void TableWriter::add(double v) { rows_.back().push_back(format_g17(v)); }
void TableWriter::add(int64_t v) { rows_.back().push_back(std::to_string(v)); }

std::string TableWriter::str() const {
  std::ostringstream out;
  for (const auto& c : comments_) out << "# " << c << "\n";
  for (std::size_t i = 0; i < columns_.size(); ++i)
    out << columns_[i] << (i + 1 < columns_.size() ? "\t" : "\n");
  for (const auto& row : rows_) {
    if (row.size() != columns_.size())
      throw std::logic_error("TableWriter: row width mismatch");
    for (std::size_t i = 0; i < row.size(); ++i)
      out << row[i] << (i + 1 < row.size() ? "\t" : "\n");
  }
  return out.str();
}

}  // namespace crbmo
