#include "collmem/corpus_io.hpp"

#include <charconv>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>

namespace collmem {

using nlohmann::json;

namespace {

const std::string& require_string(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    throw InputError(std::string("missing or non-string field '") + key + "'");
  return it->get_ref<const std::string&>();
}

Day require_day(const json& j, const char* key) {
  auto d = parse_day(require_string(j, key));
  if (!d) throw InputError(std::string("field '") + key + "' is not a YYYY-MM-DD date");
  return *d;
}

std::int64_t parse_int(std::string_view s, std::string_view what) {
  std::int64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || p != s.data() + s.size())
    throw InputError("bad integer '" + std::string(s) + "' in " + std::string(what));
  return v;
}

bool getline_nocr(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

}  // namespace

Document document_from_json(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InputError("document is not a JSON object");
  static const std::set<std::string> allowed{"id", "date", "medium", "title", "body", "domain"};
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw InputError("unexpected field '" + k + "'");

  Document d;
  d.doc_id = require_string(j, "id");
  d.date = require_day(j, "date");
  auto m = parse_medium(require_string(j, "medium"));
  if (!m) throw InputError("medium must be \"news\" or \"twitter\"");
  d.medium = *m;
  d.title = require_string(j, "title");
  d.body = require_string(j, "body");
  if (auto it = j.find("domain"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) throw InputError("field 'domain' must be a string or null");
    d.domain = it->get<std::string>();
  }
  if (d.medium == Medium::News && d.body.empty())
    throw InputError("news document with empty body");
  return d;
}

std::string document_to_json(const Document& doc) {
  json j = {{"id", doc.doc_id},
            {"date", format_day(doc.date)},
            {"medium", std::string(to_string(doc.medium))},
            {"title", doc.title},
            {"body", doc.body}};
  j["domain"] = doc.domain ? json(*doc.domain) : json(nullptr);
  return j.dump();
}

DocumentBatch read_documents_jsonl(std::istream& in) {
  DocumentBatch batch;
  std::string line;
  std::size_t n = 0;
  while (getline_nocr(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    ++batch.lines_read;
    try {
      batch.documents.push_back(document_from_json(line));
    } catch (const InputError& e) {
      batch.malformed.push_back({n, e.what()});
    }
  }
  return batch;
}

std::vector<Person> read_registry(std::istream& in) {
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("registry: invalid JSON: ") + e.what());
  }
  if (!j.is_array()) throw InputError("registry must be a JSON array");
  std::vector<Person> persons;
  for (const json& r : j) {
    Person p;
    try {
      p.id = require_string(r, "id");
      const auto names = r.find("names");
      if (names == r.end() || !names->is_array()) throw InputError("missing 'names' array");
      for (const json& n : *names) {
        AliasEntry a;
        a.surface = require_string(n, "surface");
        if (!n.contains("share") || !n["share"].is_number())
          throw InputError("name '" + a.surface + "' has no numeric share");
        a.share = n["share"].get<double>();
        auto kind = parse_name_kind(require_string(n, "kind"));
        if (!kind) throw InputError("name '" + a.surface + "' has unknown kind");
        a.kind = *kind;
        p.names.push_back(std::move(a));
      }
      if (auto it = r.find("death_date"); it != r.end() && !it->is_null()) {
        auto d = parse_day(it->is_string() ? it->get<std::string>() : std::string());
        if (!d) throw InputError("bad death_date");
        p.death_date = *d;
      }
      if (auto it = r.find("age_at_death"); it != r.end() && it->is_number_integer())
        p.age_at_death = it->get<int>();
      auto opt_string = [&](const char* key) {
        auto it = r.find(key);
        return (it != r.end() && it->is_string()) ? it->get<std::string>() : std::string();
      };
      p.gender = opt_string("gender");
      p.manner_of_death = opt_string("manner_of_death");
      p.notability_type = opt_string("notability_type");
      p.language_group = opt_string("language_group");
    } catch (const InputError& e) {
      throw InputError("registry record '" + p.id + "': " + e.what());
    }
    persons.push_back(std::move(p));
  }
  return persons;
}

void write_registry(std::ostream& out, const std::vector<Person>& persons) {
  json arr = json::array();
  for (const Person& p : persons) {
    json names = json::array();
    for (const AliasEntry& a : p.names)
      names.push_back({{"surface", a.surface}, {"share", a.share},
                       {"kind", std::string(to_string(a.kind))}});
    json r = {{"id", p.id}, {"names", names}};
    r["death_date"] = p.death_date ? json(format_day(*p.death_date)) : json(nullptr);
    r["age_at_death"] = p.age_at_death ? json(*p.age_at_death) : json(nullptr);
    r["gender"] = p.gender;
    r["manner_of_death"] = p.manner_of_death;
    r["notability_type"] = p.notability_type;
    r["language_group"] = p.language_group;
    arr.push_back(std::move(r));
  }
  out << arr.dump(1) << '\n';
}

std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_escape(std::string_view field) {
  if (field.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(field);
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void write_mention_csv(std::ostream& out, const DailyMentionCounts& counts) {
  out << "person_id,medium,day,mention_docs\n";
  for (const auto& [k, v] : counts.mentions)
    out << csv_escape(k.person_id) << ',' << to_string(k.medium) << ',' << format_day(k.day)
        << ',' << v << '\n';
}

void write_totals_csv(std::ostream& out, const DailyMentionCounts& counts) {
  out << "medium,day,total_docs\n";
  for (const auto& [k, v] : counts.totals)
    out << to_string(k.first) << ',' << format_day(k.second) << ',' << v << '\n';
}

void read_mention_csv(std::istream& in, DailyMentionCounts& counts) {
  std::string line;
  if (!getline_nocr(in, line) || line != "person_id,medium,day,mention_docs")
    throw InputError("mention CSV: unexpected header");
  while (getline_nocr(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 4) throw InputError("mention CSV: expected 4 fields: " + line);
    auto m = parse_medium(f[1]);
    auto d = parse_day(f[2]);
    if (!m || !d) throw InputError("mention CSV: bad medium or day: " + line);
    counts.mentions[MentionKey{f[0], *m, *d}] += parse_int(f[3], "mention CSV");
  }
}

void read_totals_csv(std::istream& in, DailyMentionCounts& counts) {
  std::string line;
  if (!getline_nocr(in, line) || line != "medium,day,total_docs")
    throw InputError("totals CSV: unexpected header");
  while (getline_nocr(in, line)) {
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 3) throw InputError("totals CSV: expected 3 fields: " + line);
    auto m = parse_medium(f[0]);
    auto d = parse_day(f[1]);
    if (!m || !d) throw InputError("totals CSV: bad medium or day: " + line);
    counts.totals[{*m, *d}] += parse_int(f[2], "totals CSV");
  }
}

std::set<Day> read_day_list(std::istream& in) {
  std::set<Day> days;
  std::string line;
  while (getline_nocr(in, line)) {
    const auto b = line.find_first_not_of(" \t");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t");
    auto d = parse_day(std::string_view(line).substr(b, e - b + 1));
    if (!d) throw InputError("day list: bad date '" + line + "'");
    days.insert(*d);
  }
  return days;
}

}  // namespace collmem
