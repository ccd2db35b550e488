#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "collmem/corpus_io.hpp"
#include "collmem/inclusion.hpp"
#include "collmem/scanner.hpp"
#include "collmem/token_automaton.hpp"
#include "helpers.hpp"

using namespace collmem;
using testutil::doc;
using testutil::person;

namespace {

std::vector<Person> houston_registry() {
  return {person("houston", {{"Whitney Houston", 0.99, NameKind::FullName},
                             {"Houston", 0.95, NameKind::Suffix}})};
}

}  // namespace

TEST_CASE("tokenizer splits on punctuation and folds case") {
  CHECK(Tokenizer::tokenize("RIP Whitney-Houston!!") ==
        std::vector<std::string>{"rip", "whitney", "houston"});
  CHECK(Tokenizer::tokenize("Édith PIAF, 1915") == std::vector<std::string>{"édith", "piaf", "1915"});
  CHECK(Tokenizer::tokenize("").empty());
  CHECK(Tokenizer::normalize("  Whitney   HOUSTON ") == "whitney houston");
  // malformed UTF-8 separates tokens instead of throwing
  CHECK(Tokenizer::tokenize(std::string("ab\xff" "cd")) == std::vector<std::string>{"ab", "cd"});
}

TEST_CASE("token automaton finds overlapping whole-token patterns") {
  TokenAutomaton a;
  std::vector<TokenAutomaton::TokenId> p1{1, 2}, p2{2}, p3{2, 3, 4};
  a.add(p1);
  a.add(p2);
  a.add(p3);
  a.compile();
  std::vector<TokenAutomaton::TokenId> text{1, 2, 3, 4, 2};
  auto m = a.find_all(text);
  std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> got;
  for (auto x : m) got.emplace_back(x.pattern, x.begin, x.end);
  std::sort(got.begin(), got.end());
  std::vector<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> want{
      {0, 0, 2}, {1, 1, 2}, {1, 4, 5}, {2, 1, 4}};
  CHECK(got == want);
}

TEST_CASE("alias admission by ambiguity share") {
  auto reg = houston_registry();
  auto idx = AliasIndex::build(reg, 0.9);
  REQUIRE(idx.admitted().size() == 2);
  for (const auto& a : idx.admitted())
    CHECK(a.kind == (a.surface == "whitney houston" ? NameKind::FullName : NameKind::Suffix));
  CHECK(idx.excluded().empty());

  std::vector<Person> low{person("h", {{"Whitney Houston", 0.99, NameKind::FullName},
                                       {"Houston", 0.30, NameKind::Suffix}})};
  auto idx2 = AliasIndex::build(low, 0.9);
  REQUIRE(idx2.admitted().size() == 1);
  CHECK(idx2.admitted()[0].surface == "whitney houston");

  std::vector<Person> ambiguous{person("x", {{"John Smith", 0.5, NameKind::FullName}})};
  auto idx3 = AliasIndex::build(ambiguous, 0.9);
  CHECK(idx3.excluded() == std::vector<std::string>{"x"});

  CHECK_THROWS_AS(AliasIndex::build(reg, 0.0), InputError);
}

TEST_CASE("surface claimed by two persons is rejected") {
  std::vector<Person> reg{person("a", {{"Alex Kay", 0.95, NameKind::FullName}}),
                          person("b", {{"Alex Kay", 0.95, NameKind::FullName}})};
  auto idx = AliasIndex::build(reg, 0.9);
  CHECK(idx.admitted().empty());
  REQUIRE(idx.rejected().size() == 1);
  CHECK(idx.excluded().size() == 2);
}

TEST_CASE("mention rules per medium") {
  auto reg = houston_registry();
  auto idx = AliasIndex::build(reg);
  CHECK(mentioned_ids(doc(Medium::Twitter, "RIP Whitney Houston"), idx) ==
        std::vector<std::string>{"houston"});
  CHECK(mentioned_ids(doc(Medium::News, "Singer Whitney Houston died today."), idx).empty());
  CHECK(mentioned_ids(doc(Medium::News, "Whitney Houston was found ... Houston was 48"), idx) ==
        std::vector<std::string>{"houston"});
  // second reference may be in the title
  CHECK(mentioned_ids(doc(Medium::News, "Whitney Houston dies", "Houston"), idx) ==
        std::vector<std::string>{"houston"});
  // suffix alone never counts
  CHECK(mentioned_ids(doc(Medium::Twitter, "Houston we have a problem"), idx).empty());
  // no substring hits inside words
  std::vector<Person> rose{person("r", {{"Rose", 0.99, NameKind::FullName}})};
  auto ridx = AliasIndex::build(rose);
  CHECK(mentioned_ids(doc(Medium::Twitter, "Roseanne"), ridx).empty());
  CHECK(mentioned_ids(doc(Medium::Twitter, "rose."), ridx) == std::vector<std::string>{"r"});
}

TEST_CASE("daily counts are document level") {
  auto reg = houston_registry();
  auto idx = AliasIndex::build(reg);
  CorpusWindow w{Day{16000}, Day{16010}};
  std::vector<Document> docs{doc(Medium::Twitter, "Whitney Houston"), doc(Medium::Twitter, "nothing"),
                             doc(Medium::Twitter, "Whitney Houston and Whitney Houston"),
                             doc(Medium::News, "Whitney Houston, Whitney Houston")};
  auto c = aggregate_counts(docs, idx, w, 2);
  CHECK(c.total(Medium::Twitter, Day{16000}) == 3);
  CHECK(c.mention("houston", Medium::Twitter, Day{16000}) == 2);
  CHECK(c.mention("houston", Medium::News, Day{16000}) == 1);
  CHECK(c.total(Medium::News, Day{16000}) == 1);

  docs.push_back(doc(Medium::News, "late", "", Day{17000}));
  auto q = aggregate_counts(docs, idx, w, 1);
  CHECK(q.quarantined.at(Medium::News) == 1);
  CHECK(q.total(Medium::News, Day{17000}) == 0);
}

TEST_CASE("validate rejects mention above total") {
  DailyMentionCounts c;
  c.totals[{Medium::News, Day{1}}] = 2;
  c.mentions[MentionKey{"p", Medium::News, Day{1}}] = 3;
  CHECK_THROWS_AS(c.validate(), AnalysisError);
  c.mentions[MentionKey{"p", Medium::News, Day{1}}] = 2;
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("scanner agrees with brute force; order and sharding do not matter") {
  std::mt19937_64 gen(42);
  const std::vector<std::string> words{"ana", "bel", "cor", "dun", "eli", "fox", "gal", "hum", "the", "and"};
  std::vector<Person> reg;
  for (int i = 0; i < 12; ++i) {
    std::string first = words[gen() % words.size()], last = words[gen() % words.size()] + "x";
    const double s1 = (gen() % 10) < 8 ? 0.95 : 0.5;
    const double s2 = (gen() % 10) < 5 ? 0.92 : 0.2;
    reg.push_back(person("p" + std::to_string(i), {{first + " " + last, s1, NameKind::FullName},
                                                    {last, s2, NameKind::Suffix}}));
  }
  auto idx = AliasIndex::build(reg, 0.9);
  std::vector<std::string> vocab = words;
  for (const auto& p : reg) vocab.push_back(Tokenizer::tokenize(p.names[1].surface)[0]);

  std::vector<Document> docs;
  for (int i = 0; i < 600; ++i) {
    std::string body, title;
    const int len = 3 + static_cast<int>(gen() % 25);
    for (int j = 0; j < len; ++j) body += vocab[gen() % vocab.size()] + ((gen() % 5) ? " " : ", ");
    if (gen() % 3 == 0) title = vocab[gen() % vocab.size()] + " " + vocab[gen() % vocab.size()];
    docs.push_back(doc(gen() % 2 ? Medium::News : Medium::Twitter, body, title,
                       Day{16000 + static_cast<int>(gen() % 5)}, "d" + std::to_string(i)));
  }
  for (const auto& d : docs) {
    auto got = mentioned_ids(d, idx);
    auto want = testutil::naive_mentions(d, reg, 0.9, d.medium == Medium::News);
    CHECK(std::set<std::string>(got.begin(), got.end()) == want);
    // news rule is stricter than the twitter rule
    auto strict = scan_document(d, idx, MentionRule::FullNamePlusSecond);
    auto loose = scan_document(d, idx, MentionRule::AnyFullName);
    CHECK(std::includes(loose.begin(), loose.end(), strict.begin(), strict.end()));
  }

  CorpusWindow w{Day{16000}, Day{16010}};
  auto whole = aggregate_counts(docs, idx, w, 1);
  whole.validate();
  auto shuffled = docs;
  std::shuffle(shuffled.begin(), shuffled.end(), gen);
  CHECK(aggregate_counts(shuffled, idx, w, 4) == whole);

  DailyMentionCounts merged;
  for (std::size_t start = 0; start < docs.size(); start += 97) {
    CountAccumulator acc(idx, w);
    for (std::size_t i = start; i < std::min(docs.size(), start + 97); ++i) acc.add(docs[i]);
    merged.merge(acc.finish());
  }
  CHECK(merged == whole);
}

TEST_CASE("document JSONL round trip and malformed lines") {
  Document d = doc(Medium::News, "body \"quoted\"", "title", Day{16001}, "x1");
  d.domain = "example.org";
  Document back = document_from_json(document_to_json(d));
  CHECK(back.doc_id == "x1");
  CHECK(back.body == d.body);
  CHECK(back.domain == d.domain);
  CHECK(back.date == d.date);

  std::istringstream in(document_to_json(d) + "\n{not json}\n\n" +
                        R"({"id":"y","date":"2013-02-30","medium":"news","title":"","body":"","domain":null})" +
                        "\n");
  auto batch = read_documents_jsonl(in);
  CHECK(batch.documents.size() == 1);
  CHECK(batch.malformed.size() == 2);
  CHECK(batch.lines_read == 3);
}

TEST_CASE("registry and counts CSV round trip") {
  auto reg = houston_registry();
  std::ostringstream out;
  write_registry(out, reg);
  std::istringstream in(out.str());
  auto back = read_registry(in);
  REQUIRE(back.size() == 1);
  CHECK(back[0].names.size() == 2);
  CHECK(back[0].death_date == reg[0].death_date);

  DailyMentionCounts c;
  c.totals[{Medium::News, Day{16000}}] = 10;
  c.totals[{Medium::Twitter, Day{16001}}] = 7;
  c.mentions[MentionKey{"houston", Medium::News, Day{16000}}] = 4;
  std::ostringstream m, t;
  write_mention_csv(m, c);
  write_totals_csv(t, c);
  DailyMentionCounts r;
  std::istringstream mi(m.str()), ti(t.str());
  read_mention_csv(mi, r);
  read_totals_csv(ti, r);
  CHECK(r.totals == c.totals);
  CHECK(r.mentions == c.mentions);
}

TEST_CASE("inclusion criteria") {
  CorpusWindow w{Day{15000}, Day{16500}};
  DailyMentionCounts c;
  for (int d = 15000; d <= 16500; ++d) {
    c.totals[{Medium::News, Day{d}}] = 100;
    c.totals[{Medium::Twitter, Day{d}}] = 100;
  }
  auto mention_days = [&](const std::string& id, Medium m, Day death, int n) {
    for (int i = 1; i <= n; ++i) c.mentions[MentionKey{id, m, death - i}] = 1;
  };
  const Day mid{15800};
  std::vector<Person> reg{
      person("ok", {{"Okay Person", 0.99, NameKind::FullName}}, mid),
      person("late", {{"Late Person", 0.99, NameKind::FullName}}, Day{16450}),
      person("sparse", {{"Sparse Person", 0.99, NameKind::FullName}}, mid),
      person("paren", {{"John Spence (Trinidad politician)", 0.99, NameKind::FullName}}, mid),
      person("gap", {{"Gap Person", 0.99, NameKind::FullName}}, Day{15900}),
  };
  mention_days("ok", Medium::News, mid, 5);
  mention_days("ok", Medium::Twitter, mid, 5);
  mention_days("late", Medium::News, Day{16450}, 10);
  mention_days("late", Medium::Twitter, Day{16450}, 10);
  mention_days("sparse", Medium::News, mid, 4);
  mention_days("sparse", Medium::Twitter, mid, 400);
  mention_days("paren", Medium::News, mid, 10);
  mention_days("paren", Medium::Twitter, mid, 10);
  mention_days("gap", Medium::News, Day{15900}, 10);
  mention_days("gap", Medium::Twitter, Day{15900}, 10);
  std::set<Day> missing{};
  InclusionConfig cfg;
  cfg.window = w;

  auto r = apply_inclusion_criteria(reg, c, missing, cfg);
  CHECK(r.excluded.at("late") == ExclusionReason::Boundary);
  CHECK(r.excluded.at("sparse") == ExclusionReason::SparsePreMortem);
  CHECK(r.excluded.at("paren") == ExclusionReason::ParenthesizedName);
  CHECK(r.included == std::vector<std::string>{"ok", "gap"});

  missing.insert(Day{15950});
  auto r2 = apply_inclusion_criteria(reg, c, missing, cfg);
  CHECK(r2.excluded.at("gap") == ExclusionReason::MissingDays);
  CHECK(r2.included == std::vector<std::string>{"ok"});

  std::vector<Person> nodate{person("n", {{"No Date", 0.99, NameKind::FullName}})};
  nodate[0].death_date.reset();
  CHECK_THROWS_AS(apply_inclusion_criteria(nodate, c, {}, cfg), InputError);
}
