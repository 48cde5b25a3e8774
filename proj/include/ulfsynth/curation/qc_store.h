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

#ifndef ULFSYNTH_CURATION_QC_STORE_H_
#define ULFSYNTH_CURATION_QC_STORE_H_

#include <cstdint>
#include <iosfwd>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ulfsynth/labelharm/manifest.h"

namespace ulfsynth {

struct QCRecord {
  std::string subject_id;
  QcStatus rating = QcStatus::kUnrated;
  std::vector<std::string> affected_structures;
  std::string rater;
  int64_t timestamp = 0;  // seconds since the Unix epoch, UTC
  std::string note;

  bool operator==(const QCRecord&) const = default;
};

// Append-only rating history with a latest-per-subject view. The latest
// record of a subject is the one with the greatest timestamp; ties go to the
// later append. Writers are serialized; readers get copies.
class QCStore {
 public:
  QCStore() = default;
  QCStore(const QCStore& other);
  QCStore& operator=(const QCStore& other);

  // Store backed by a history file in the QC CSV format. Existing rows are
  // replayed; every later Append is flushed to the file before returning.
  static QCStore Open(const std::string& history_path);

  // Throws ValidationError for an empty subject id, a structure name with ';'
  // or a timestamp older than the last one of the same (subject, rater).
  QCRecord Append(QCRecord record);
  // Append with timestamp = max(now, last timestamp of the (subject, rater)).
  QCRecord AppendNow(QCRecord record);

  std::vector<QCRecord> History() const;
  // Keyed and therefore ordered by subject id.
  std::map<std::string, QCRecord> Latest() const;
  std::optional<QCRecord> LatestFor(const std::string& subject_id) const;
  size_t size() const;

 private:
  void AppendLocked(const QCRecord& record);

  mutable std::mutex mu_;
  std::vector<QCRecord> history_;
  std::map<std::string, size_t> latest_;  // subject -> history index
  std::map<std::pair<std::string, std::string>, int64_t> last_ts_;
  std::string history_path_;
};

inline constexpr char kQcCsvHeader[] =
    "subject_id,rating,affected_structures,rater,timestamp,note";

// Latest view, one row per subject in subject-id order. Structures are
// joined with ';' and timestamps written as YYYY-MM-DDTHH:MM:SSZ.
std::string ExportCsv(const QCStore& store);
void ExportCsv(const QCStore& store, const std::string& path);

// Rows are appended as history in file order. Throws ParseError naming the
// row (the header is row 1) or IoError.
QCStore ImportCsv(std::istream& in, const std::string& source = "qc csv");
QCStore ImportCsv(const std::string& path);

struct ApplyRatingsResult {
  Manifest manifest;
  // One message per rated subject that is not in the manifest.
  std::vector<std::string> warnings;
};

// Sets qc_status of every entry from the subject's latest good/bad record.
// Entries without one keep their status.
ApplyRatingsResult ApplyRatings(const Manifest& manifest, const QCStore& store);

}  // namespace ulfsynth

#endif  // ULFSYNTH_CURATION_QC_STORE_H_
