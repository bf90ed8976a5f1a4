#include "mini_world.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "wikimrc/util/error.hpp"
#include "wikimrc/util/random.hpp"

namespace wikimrc::miniworld {
namespace {

struct LanguagePack {
  std::string site;
  std::vector<std::string> definition;  // per Kind, {X} {REL} {WORD}
  std::vector<std::string> sentences;   // {CITY} {COUNTRY} {PERSON} {ORG}
  std::vector<std::string> words;       // {WORD} fillers per Kind
  std::string history;
  std::string overview_titles[2];
  std::string category;
};

const LanguagePack &pack(const std::string &lang) {
  static const std::map<std::string, LanguagePack> packs = {
      {"en",
       {"MiniPedia",
        {"{X} is a country in the {WORD} part of the continent .",
         "{X} is a city in {REL} .",
         "{X} is a person known as a {WORD} from {REL} .",
         "{X} is an organization based in {REL} ."},
        {"{CITY} lies in the north of {COUNTRY} .",
         "{PERSON} was born in {CITY} .",
         "{PERSON} worked for {ORG} in {CITY} .",
         "{ORG} is based in {CITY} , the largest city of {COUNTRY} .",
         "In 1890 {PERSON} travelled from {CITY} to {CITY} .",
         "{COUNTRY} shares a border with {COUNTRY} .",
         "{ORG} was founded by {PERSON} .",
         "{PERSON} met {PERSON} in {COUNTRY} .",
         "The old road from {CITY} reaches {COUNTRY} after two days ."},
        {"northern", "harbour", "painter", "bank"},
        "History",
        {"History of the region", "List of places"},
        "Category"}},
      {"de",
       {"MiniWiki",
        {"{X} ist ein Land im {WORD} Teil des Kontinents .",
         "{X} ist eine Stadt in {REL} .",
         "{X} ist eine Person , bekannt als {WORD} aus {REL} .",
         "{X} ist eine Organisation mit Sitz in {REL} ."},
        {"{CITY} liegt im Norden von {COUNTRY} .",
         "{PERSON} wurde in {CITY} geboren .",
         "{PERSON} arbeitete für {ORG} in {CITY} .",
         "{ORG} hat seinen Sitz in {CITY} , der größten Stadt von {COUNTRY} .",
         "Im Jahr 1890 reiste {PERSON} von {CITY} nach {CITY} .",
         "{COUNTRY} grenzt an {COUNTRY} .",
         "{ORG} wurde von {PERSON} gegründet .",
         "{PERSON} traf {PERSON} in {COUNTRY} .",
         "Die alte Straße von {CITY} erreicht {COUNTRY} nach zwei Tagen ."},
        {"nördlichen", "Hafen", "Maler", "Bank"},
        "Geschichte",
        {"Geschichte der Region", "Liste der Orte"},
        "Kategorie"}},
  };
  auto it = packs.find(lang);
  if (it == packs.end()) throw UsageError("mini world has no language " + lang);
  return it->second;
}

const std::map<std::string, std::string> &aliases() {
  static const std::map<std::string, std::string> a = {
      {"Aldan", "Port Aldan"}, {"Tarrin", "New Tarrin"}, {"Brandt", "Ivo Brandt"}, {"NR", "Northwind Rail"}};
  return a;
}

const char *slot_name(Kind k) {
  switch (k) {
    case Kind::kCountry: return "{COUNTRY}";
    case Kind::kCity: return "{CITY}";
    case Kind::kPerson: return "{PERSON}";
    case Kind::kOrg: return "{ORG}";
  }
  return "";
}

std::string xml_escape(const std::string &s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

// Index of the entity related to `e` (home country, home city).
std::size_t related(std::size_t e) {
  const auto &all = entities();
  const Kind want = all[e].kind == Kind::kCity ? Kind::kCountry : Kind::kCity;
  std::vector<std::size_t> pool;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (all[i].kind == want) pool.push_back(i);
  }
  return pool[e % pool.size()];
}

class PageWriter {
 public:
  explicit PageWriter(std::ostringstream &out) : out_(out) {}
  void page(const std::string &title, int ns, const std::string &text,
            const std::string &redirect = {}) {
    ++id_;
    out_ << "  <page>\n    <title>" << xml_escape(title) << "</title>\n    <ns>" << ns
         << "</ns>\n    <id>" << id_ << "</id>\n";
    if (!redirect.empty()) out_ << "    <redirect title=\"" << xml_escape(redirect) << "\" />\n";
    out_ << "    <revision>\n      <id>" << (1000 + id_) << "</id>\n"
         << "      <text xml:space=\"preserve\">" << xml_escape(text) << "</text>\n"
         << "    </revision>\n  </page>\n";
  }

 private:
  std::ostringstream &out_;
  int id_ = 0;
};

}  // namespace

const std::vector<Entity> &entities() {
  static const std::vector<Entity> all = {
      {"Valdoria", Kind::kCountry, "LOC"},     {"Questra", Kind::kCountry, "LOC"},
      {"Morvania", Kind::kCountry, "LOC"},     {"Tessaly", Kind::kCountry, "LOC"},
      {"Orlandia", Kind::kCountry, "LOC"},     {"Kestovia", Kind::kCountry, "LOC"},
      {"Port Aldan", Kind::kCity, "LOC"},      {"Kirrow", Kind::kCity, "LOC"},
      {"Lemsa", Kind::kCity, "LOC"},           {"Orbury", Kind::kCity, "LOC"},
      {"New Tarrin", Kind::kCity, "LOC"},      {"Halvik", Kind::kCity, "LOC"},
      {"Dunmere", Kind::kCity, "LOC"},         {"Scarra", Kind::kCity, "LOC"},
      {"Ivo Brandt", Kind::kPerson, "PER"},    {"Mara Selin", Kind::kPerson, "PER"},
      {"Tomas Okar", Kind::kPerson, "PER"},    {"Lena Varga", Kind::kPerson, "PER"},
      {"Edvin Roos", Kind::kPerson, "PER"},    {"Alia Tenn", Kind::kPerson, "PER"},
      {"Northwind Rail", Kind::kOrg, "ORG"},   {"Kestrel Bank", Kind::kOrg, "ORG"},
      {"Ardent Press", Kind::kOrg, "ORG"},     {"Valdor Union", Kind::kOrg, "ORG"},
  };
  return all;
}

const std::vector<std::string> &languages() {
  static const std::vector<std::string> langs = {"en", "de"};
  return langs;
}

std::string dump_xml(const std::string &language, uint64_t seed, int min_mentions) {
  const LanguagePack &lp = pack(language);
  const auto &all = entities();
  Rng rng(stable_hash(seed, {"dump", language}));

  // Article bodies: one per entity, then the overview articles.
  const std::size_t n_articles = all.size() + 2;
  std::vector<std::vector<std::string>> sentences(n_articles);
  std::vector<int> linked(all.size(), 0);

  auto link = [&](std::size_t e) {
    ++linked[e];
    const std::string &name = all[e].name;
    for (const auto &[alias, target] : aliases()) {
      if (target == name && rng.below(10) < 3) return "[[" + alias + "]]";
    }
    if (all[e].kind == Kind::kCountry && rng.below(10) < 2) return "[[" + name + "|" + name + "n]]";
    return "[[" + name + "]]";
  };
  auto pick = [&](Kind kind, std::size_t self, std::size_t prefer) {
    if (prefer < all.size() && all[prefer].kind == kind && prefer != self) return prefer;
    std::vector<std::size_t> pool;
    for (std::size_t i = 0; i < all.size(); ++i) {
      if (all[i].kind == kind && i != self) pool.push_back(i);
    }
    // Least-linked first keeps the mention counts level.
    std::stable_sort(pool.begin(), pool.end(), [&](std::size_t a, std::size_t b) { return linked[a] < linked[b]; });
    const std::size_t span = std::min<std::size_t>(pool.size(), 3);
    return pool[rng.below(span)];
  };
  auto fill = [&](std::string tmpl, std::size_t self, std::size_t prefer) {
    for (Kind k : {Kind::kCountry, Kind::kCity, Kind::kPerson, Kind::kOrg}) {
      const std::string slot = slot_name(k);
      for (std::size_t p = tmpl.find(slot); p != std::string::npos; p = tmpl.find(slot)) {
        const std::size_t e = pick(k, self, prefer);
        if (e == prefer) prefer = all.size();
        tmpl.replace(p, slot.size(), link(e));
      }
    }
    return tmpl;
  };

  for (std::size_t e = 0; e < all.size(); ++e) {
    std::string def = lp.definition[static_cast<std::size_t>(all[e].kind)];
    const std::size_t pos = def.find("{X}");
    def.replace(pos, 3, "'''" + all[e].name + "'''");
    const std::size_t wpos = def.find("{WORD}");
    if (wpos != std::string::npos) def.replace(wpos, 6, lp.words[static_cast<std::size_t>(all[e].kind)]);
    const std::size_t rpos = def.find("{REL}");
    if (rpos != std::string::npos) def.replace(rpos, 5, link(related(e)));
    sentences[e].push_back(def);
  }
  // Keep adding sentences round-robin until every entity is linked often enough.
  std::size_t article = 0;
  for (int guard = 0; guard < 10000; ++guard) {
    const auto lowest = static_cast<std::size_t>(
        std::min_element(linked.begin(), linked.end()) - linked.begin());
    if (linked[lowest] >= min_mentions && guard >= static_cast<int>(4 * n_articles)) break;
    const std::size_t self = article < all.size() ? article : all.size();
    std::string tmpl;
    if (lowest != self) {
      std::vector<const std::string *> fitting;
      for (const auto &s : lp.sentences) {
        if (s.find(slot_name(all[lowest].kind)) != std::string::npos) fitting.push_back(&s);
      }
      tmpl = *fitting[rng.below(fitting.size())];
    } else {
      tmpl = lp.sentences[rng.below(lp.sentences.size())];
    }
    sentences[article].push_back(fill(tmpl, self, lowest));
    article = (article + 1) % n_articles;
  }

  std::ostringstream out;
  out << "<mediawiki xmlns=\"http://www.mediawiki.org/xml/export-0.10/\" version=\"0.10\" xml:lang=\""
      << language << "\">\n  <siteinfo>\n    <sitename>" << lp.site << "</sitename>\n"
      << "    <namespaces>\n      <namespace key=\"0\" case=\"first-letter\" />\n"
      << "      <namespace key=\"1\" case=\"first-letter\">Talk</namespace>\n"
      << "      <namespace key=\"14\" case=\"first-letter\">" << lp.category << "</namespace>\n"
      << "    </namespaces>\n  </siteinfo>\n";
  PageWriter writer(out);
  for (std::size_t a = 0; a < n_articles; ++a) {
    const bool entity_page = a < all.size();
    const std::string title = entity_page ? all[a].name : lp.overview_titles[a - all.size()];
    std::string text;
    if (entity_page && all[a].kind == Kind::kCity) {
      text += "{{Infobox settlement|name=" + title + "|country=[[" + all[related(a)].name +
              "]]|population={{formatnum:" + std::to_string(1000 + 37 * a) + "}}}}\n";
    }
    const auto &body = sentences[a];
    for (std::size_t s = 0; s < body.size(); ++s) {
      if (s == 2) text += "\n== " + lp.history + " ==\n";
      if (s == 3 && a % 3 == 0) text += "<!-- keep this section short -->";
      text += body[s];
      if (s == 1 && a % 2 == 0) text += "<ref>{{cite book|title=Annals of [[" + all[0].name + "]]}}</ref>";
      text += s + 1 == body.size() ? "\n" : " ";
    }
    if (a % 4 == 1) {
      text += "{| class=\"wikitable\"\n|-\n| [[" + all[7].name + "]] || 1200\n|}\n";
    }
    if (a % 5 == 2) text += "[[File:" + title + ".jpg|thumb|View of [[" + all[8].name + "]]]]\n";
    if (!entity_page && a == all.size()) text += "See also [[Loopa]] .\n";
    text += "[[" + lp.category + ":" + (entity_page ? all[a].ner_label : std::string("Overview")) + "]]\n";
    writer.page(title, 0, text);
  }
  for (const auto &[alias, target] : aliases()) writer.page(alias, 0, "#REDIRECT [[" + target + "]]", target);
  writer.page("Loopa", 0, "#REDIRECT [[Loopb]]", "Loopb");
  writer.page("Loopb", 0, "#REDIRECT [[Loopa]]", "Loopa");
  writer.page("Talk:" + all[7].name, 1, "Is [[" + all[7].name + "]] really that old?");
  writer.page(lp.category + ":LOC", 14, "Places in the world of [[" + all[0].name + "]].");
  out << "</mediawiki>\n";

  return out.str();
}

taskconv::Scheme conll_scheme() {
  taskconv::Scheme s;
  s.task = taskconv::TaskKind::kNer;
  s.query_template = taskconv::default_query_template(s.task);
  s.labels = {
      {"ORG", "Organization entities are limited to named corporate, governmental, or other organizational entities."},
      {"PER", "Person entities are named persons or family ."},
      {"LOC", "Location entities are the name of politically or geographically defined locations such as cities , countries ."},
      {"MISC", "Examples of miscellaneous entities include events , nationalities , products and works of art ."},
  };
  return s;
}

std::vector<taskconv::TaggingInstance> ner_sentences(std::size_t count, uint64_t seed,
                                                     const std::string &id_prefix) {
  static const std::vector<std::string> templates = {
      "{PERSON} visited {CITY} last year .",
      "Officials from {ORG} arrived in {COUNTRY} on Monday .",
      "{PERSON} and {PERSON} signed a contract with {ORG} .",
      "The train from {CITY} to {CITY} was late again .",
      "Two goals gave {COUNTRY} a narrow win over {COUNTRY} .",
      "Nobody expected the storm .",
      "{ORG} opened a new office in {CITY} , {COUNTRY} .",
      "Reporters asked {PERSON} about the harvest .",
      "The weather in {CITY} stayed mild .",
      "Prices rose sharply during the winter .",
  };
  const auto &all = entities();
  Rng rng(stable_hash(seed, {"ner"}));
  std::vector<taskconv::TaggingInstance> out;
  for (std::size_t n = 0; n < count; ++n) {
    taskconv::TaggingInstance x;
    x.id = id_prefix + std::to_string(n);
    x.language = "en";
    std::istringstream pieces(templates[rng.below(templates.size())]);
    for (std::string piece; pieces >> piece;) {
      Kind kind{};
      bool slot = false;
      for (Kind k : {Kind::kCountry, Kind::kCity, Kind::kPerson, Kind::kOrg}) {
        if (piece == slot_name(k)) {
          kind = k;
          slot = true;
        }
      }
      if (!slot) {
        x.tokens.push_back(piece);
        continue;
      }
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < all.size(); ++i) {
        if (all[i].kind == kind) pool.push_back(i);
      }
      const Entity &e = all[pool[rng.below(pool.size())]];
      const std::size_t start = x.tokens.size();
      std::istringstream words(e.name);
      for (std::string w; words >> w;) x.tokens.push_back(w);
      x.spans.push_back({e.ner_label, start, x.tokens.size() - 1});
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace wikimrc::miniworld
