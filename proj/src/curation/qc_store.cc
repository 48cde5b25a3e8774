// Copyright 2026 The ulfsynth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ulfsynth/curation/qc_store.h"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "ulfsynth/util/csv.h"
#include "ulfsynth/util/errors.h"
#include "ulfsynth/util/time.h"

namespace ulfsynth {

namespace {

std::string JoinStructures(const std::vector<std::string>& s) {
  std::string out;
  for (size_t i = 0; i < s.size(); ++i) {
    if (i > 0) out += ';';
    out += s[i];
  }
  return out;
}

std::vector<std::string> SplitStructures(const std::string& text) {
  std::vector<std::string> out;
  if (text.empty()) return out;
  std::string cur;
  for (char c : text) {
    if (c == ';') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

csv::Row ToRow(const QCRecord& r) {
  return {r.subject_id, std::string(ToString(r.rating)), JoinStructures(r.affected_structures),
          r.rater, FormatIsoUtc(r.timestamp), r.note};
}

void Validate(const QCRecord& r) {
  if (r.subject_id.empty()) throw ValidationError("rating has an empty subject_id");
  for (const std::string& s : r.affected_structures) {
    if (s.empty() || s.find(';') != std::string::npos) {
      throw ValidationError("subject " + r.subject_id + ": invalid structure name '" + s + "'");
    }
  }
}

}  // namespace

QCStore::QCStore(const QCStore& other) {
  std::lock_guard lock(other.mu_);
  history_ = other.history_;
  latest_ = other.latest_;
  last_ts_ = other.last_ts_;
  history_path_ = other.history_path_;
}

QCStore& QCStore::operator=(const QCStore& other) {
  if (this == &other) return *this;
  QCStore copy(other);
  std::lock_guard lock(mu_);
  history_ = std::move(copy.history_);
  latest_ = std::move(copy.latest_);
  last_ts_ = std::move(copy.last_ts_);
  history_path_ = std::move(copy.history_path_);
  return *this;
}

QCStore QCStore::Open(const std::string& history_path) {
  QCStore store;
  if (std::filesystem::exists(history_path)) store = ImportCsv(history_path);
  store.history_path_ = history_path;
  if (!std::filesystem::exists(history_path)) {
    std::ofstream out(history_path);
    if (!out) throw IoError("cannot create ratings file '" + history_path + "'");
    out << kQcCsvHeader << '\n';
  }
  return store;
}

void QCStore::AppendLocked(const QCRecord& record) {
  Validate(record);
  const auto key = std::make_pair(record.subject_id, record.rater);
  if (auto it = last_ts_.find(key); it != last_ts_.end() && record.timestamp < it->second) {
    throw ValidationError("subject " + record.subject_id + ", rater '" + record.rater +
                          "': timestamp " + FormatIsoUtc(record.timestamp) +
                          " is older than " + FormatIsoUtc(it->second));
  }
  if (!history_path_.empty()) {
    std::ofstream out(history_path_, std::ios::app);
    out << csv::FormatRow(ToRow(record)) << '\n';
    out.flush();
    if (!out) throw IoError("cannot append to ratings file '" + history_path_ + "'");
  }
  history_.push_back(record);
  last_ts_[key] = record.timestamp;
  auto [it, inserted] = latest_.try_emplace(record.subject_id, history_.size() - 1);
  if (!inserted && history_[it->second].timestamp <= record.timestamp) {
    it->second = history_.size() - 1;
  }
}

QCRecord QCStore::Append(QCRecord record) {
  std::lock_guard lock(mu_);
  AppendLocked(record);
  return record;
}

QCRecord QCStore::AppendNow(QCRecord record) {
  std::lock_guard lock(mu_);
  record.timestamp = NowEpochSeconds();
  if (auto it = last_ts_.find({record.subject_id, record.rater}); it != last_ts_.end()) {
    record.timestamp = std::max(record.timestamp, it->second);
  }
  AppendLocked(record);
  return record;
}

std::vector<QCRecord> QCStore::History() const {
  std::lock_guard lock(mu_);
  return history_;
}

std::map<std::string, QCRecord> QCStore::Latest() const {
  std::lock_guard lock(mu_);
  std::map<std::string, QCRecord> out;
  for (const auto& [subject, index] : latest_) out.emplace(subject, history_[index]);
  return out;
}

std::optional<QCRecord> QCStore::LatestFor(const std::string& subject_id) const {
  std::lock_guard lock(mu_);
  auto it = latest_.find(subject_id);
  if (it == latest_.end()) return std::nullopt;
  return history_[it->second];
}

size_t QCStore::size() const {
  std::lock_guard lock(mu_);
  return history_.size();
}

std::string ExportCsv(const QCStore& store) {
  std::string out = std::string(kQcCsvHeader) + "\n";
  for (const auto& [subject, record] : store.Latest()) {
    out += csv::FormatRow(ToRow(record)) + "\n";
  }
  return out;
}

void ExportCsv(const QCStore& store, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  out << ExportCsv(store);
  if (!out) throw IoError("cannot write '" + path + "'");
}

QCStore ImportCsv(std::istream& in, const std::string& source) {
  csv::Reader reader(in);
  csv::Row row;
  std::istringstream header_text(kQcCsvHeader);
  csv::Row header;
  csv::Reader(header_text).Next(header);
  if (!reader.Next(row) || row != header) {
    throw ParseError(source + ": row 1: header must be " + kQcCsvHeader);
  }
  QCStore store;
  for (int r = 2; reader.Next(row); ++r) {
    const std::string where = source + ": row " + std::to_string(r);
    if (row.size() == 1 && row[0].empty()) continue;
    if (row.size() != header.size()) {
      throw ParseError(where + ": expected " + std::to_string(header.size()) + " fields, got " +
                       std::to_string(row.size()));
    }
    QCRecord rec;
    rec.subject_id = row[0];
    const auto rating = ParseQcStatus(row[1]);
    if (!rating) throw ParseError(where + ": unknown rating '" + row[1] + "'");
    rec.rating = *rating;
    rec.affected_structures = SplitStructures(row[2]);
    rec.rater = row[3];
    const auto ts = ParseIsoUtc(row[4]);
    if (!ts) throw ParseError(where + ": bad timestamp '" + row[4] + "'");
    rec.timestamp = *ts;
    rec.note = row[5];
    try {
      store.Append(rec);
    } catch (const ValidationError& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  return store;
}

QCStore ImportCsv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  return ImportCsv(in, path);
}

ApplyRatingsResult ApplyRatings(const Manifest& manifest, const QCStore& store) {
  ApplyRatingsResult result{manifest, {}};
  const auto latest = store.Latest();
  std::set<std::string> known;
  for (ManifestEntry& e : result.manifest.entries) {
    known.insert(e.subject_id);
    auto it = latest.find(e.subject_id);
    if (it != latest.end() && it->second.rating != QcStatus::kUnrated) {
      e.qc_status = it->second.rating;
    }
  }
  for (const auto& [subject, record] : latest) {
    if (!known.contains(subject)) {
      result.warnings.push_back("rating for subject '" + subject + "' not in manifest");
    }
  }
  return result;
}

}  // namespace ulfsynth
