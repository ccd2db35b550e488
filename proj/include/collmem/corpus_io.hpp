#pragma once

#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "collmem/corpus.hpp"
#include "collmem/scanner.hpp"

namespace collmem {

struct MalformedLine {
  std::size_t line_number;  // 1-based
  std::string error;
};

struct DocumentBatch {
  std::vector<Document> documents;
  std::vector<MalformedLine> malformed;
  std::size_t lines_read = 0;  // non-blank lines
};

// One JSON object per line with exactly the keys id, date, medium, title,
// body, domain (domain may be null or absent). Lines that fail to parse or
// violate the document invariants are reported, not thrown.
DocumentBatch read_documents_jsonl(std::istream& in);
std::string document_to_json(const Document& doc);
Document document_from_json(std::string_view line);

// JSON array of person records.
std::vector<Person> read_registry(std::istream& in);
void write_registry(std::ostream& out, const std::vector<Person>& persons);

// `person_id,medium,day,mention_docs` and `medium,day,total_docs`.
void write_mention_csv(std::ostream& out, const DailyMentionCounts& counts);
void write_totals_csv(std::ostream& out, const DailyMentionCounts& counts);
void read_mention_csv(std::istream& in, DailyMentionCounts& counts);
void read_totals_csv(std::istream& in, DailyMentionCounts& counts);

// One YYYY-MM-DD per line; blank lines and '#' comments ignored.
std::set<Day> read_day_list(std::istream& in);

// Splits one CSV record; supports double-quoted fields.
std::vector<std::string> split_csv(std::string_view line);
std::string csv_escape(std::string_view field);

}  // namespace collmem
