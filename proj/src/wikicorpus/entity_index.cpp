#include "wikimrc/wikicorpus/entity_index.hpp"

#include <algorithm>

#include "wikimrc/util/error.hpp"
#include "wikimrc/util/log.hpp"

namespace wikimrc::wikicorpus {

void add_redirect(RedirectMap &redirects, const RawPage &page) {
  if (!page.redirect_target || page.redirect_target->empty()) return;
  std::string target = *page.redirect_target;
  target = target.substr(0, target.find('#'));
  redirects[EntityKey{page.language, normalize_title(page.title)}] = normalize_title(target);
}

const EntityRecord *EntityIndex::find(const EntityKey &key) const {
  auto it = entities_.find(key);
  return it == entities_.end() ? nullptr : &it->second;
}

const std::vector<int64_t> &EntityIndex::roster(const std::string &language) const {
  static const std::vector<int64_t> kEmpty;
  auto it = rosters_.find(language);
  return it == rosters_.end() ? kEmpty : it->second;
}

void EntityIndex::insert(EntityRecord record) {
  std::sort(record.mentions.begin(), record.mentions.end());
  EntityKey key = record.key;
  entities_[std::move(key)] = std::move(record);
}

void EntityIndex::set_roster(const std::string &language, std::vector<int64_t> ids) {
  std::sort(ids.begin(), ids.end());
  rosters_[language] = std::move(ids);
}

void EntityIndex::rebuild_rosters(const std::vector<Article> &articles) {
  rosters_.clear();
  for (const auto &a : articles) rosters_[a.language].push_back(a.article_id);
  for (auto &[lang, ids] : rosters_) std::sort(ids.begin(), ids.end());
}

void IndexBuilder::add(const Article &article) {
  EntityKey key{article.language, article.title};
  auto [it, inserted] = titles_.emplace(key, article.article_id);
  if (!inserted) {
    ++duplicate_titles_;
    it->second = std::min(it->second, article.article_id);
  }
  rosters_[article.language].push_back(article.article_id);
  for (std::size_t k = 0; k < article.anchors.size(); ++k) {
    mentions_.push_back(PendingMention{EntityKey{article.language, article.anchors[k].target},
                                       MentionRef{article.article_id, static_cast<uint32_t>(k)}});
  }
}

void IndexBuilder::merge(IndexBuilder &&other) {
  for (auto &[key, id] : other.titles_) {
    auto [it, inserted] = titles_.emplace(key, id);
    if (!inserted) {
      ++duplicate_titles_;
      it->second = std::min(it->second, id);
    }
  }
  duplicate_titles_ += other.duplicate_titles_;
  mentions_.insert(mentions_.end(), std::make_move_iterator(other.mentions_.begin()),
                   std::make_move_iterator(other.mentions_.end()));
  for (auto &[lang, ids] : other.rosters_) {
    auto &mine = rosters_[lang];
    mine.insert(mine.end(), ids.begin(), ids.end());
  }
  other = IndexBuilder{};
}

EntityIndex IndexBuilder::finish(const RedirectMap &redirects, IndexStats *stats) const {
  IndexStats local;
  local.duplicate_titles = duplicate_titles_;
  std::map<EntityKey, EntityRecord> records;
  for (const auto &[key, id] : titles_) {
    EntityRecord &r = records[key];
    r.key = key;
    r.definition = id;
  }
  for (const auto &pending : mentions_) {
    EntityKey resolved = pending.target;
    if (!titles_.count(resolved)) {
      auto hop = redirects.find(resolved);
      if (hop != redirects.end()) {
        EntityKey next{resolved.language, hop->second};
        auto back = redirects.find(next);
        const bool cycle = next == resolved || (back != redirects.end() && back->second == resolved.title);
        if (cycle) {
          ++local.redirect_cycles;
        } else {
          ++local.redirect_hops;
          resolved = std::move(next);
        }
      }
    }
    EntityRecord &r = records[resolved];
    r.key = resolved;
    r.mentions.push_back(pending.ref);
    ++local.mentions;
  }
  EntityIndex index;
  for (auto &[key, record] : records) {
    if (!record.has_definition()) ++local.definitionless;
    index.insert(std::move(record));
  }
  for (const auto &[lang, ids] : rosters_) index.set_roster(lang, ids);
  if (local.redirect_cycles > 0) {
    logger()->warn("{} anchor(s) hit a redirect cycle and were left unresolved", local.redirect_cycles);
  }
  if (stats != nullptr) *stats = local;
  return index;
}

EntityIndex build_entity_index(const std::vector<Article> &articles, const RedirectMap &redirects,
                               IndexStats *stats) {
  IndexBuilder builder;
  for (const auto &a : articles) builder.add(a);
  return builder.finish(redirects, stats);
}

std::size_t MinCounts::for_language(const std::string &language) const {
  auto it = per_language.find(language);
  return it == per_language.end() ? default_count : it->second;
}

EntityIndex filter_entities(const EntityIndex &index, const MinCounts &min_counts) {
  EntityIndex out;
  for (const auto &[key, record] : index.entities()) {
    if (!record.has_definition()) continue;
    const std::size_t threshold = std::max<std::size_t>(1, min_counts.for_language(key.language));
    if (record.mention_count() < threshold) continue;
    out.insert(record);
  }
  for (const auto &[lang, ids] : index.rosters()) out.set_roster(lang, ids);
  return out;
}

nlohmann::ordered_json entity_to_json(const EntityRecord &record) {
  nlohmann::ordered_json j;
  j["lang"] = record.key.language;
  j["title"] = record.key.title;
  if (record.definition) {
    j["definition"] = *record.definition;
  } else {
    j["definition"] = nullptr;
  }
  j["mention_count"] = record.mention_count();
  auto mentions = nlohmann::ordered_json::array();
  for (const auto &m : record.mentions) mentions.push_back({m.article_id, m.anchor_ordinal});
  j["mentions"] = std::move(mentions);
  return j;
}

EntityRecord entity_from_json(const nlohmann::json &j) {
  try {
    EntityRecord r;
    r.key.language = j.at("lang").get<std::string>();
    r.key.title = j.at("title").get<std::string>();
    if (!j.at("definition").is_null()) r.definition = j.at("definition").get<int64_t>();
    for (const auto &m : j.at("mentions")) {
      r.mentions.push_back(MentionRef{m.at(0).get<int64_t>(), m.at(1).get<uint32_t>()});
    }
    if (j.contains("mention_count") && j.at("mention_count").get<std::size_t>() != r.mentions.size()) {
      throw DataError("entity " + r.key.title + ": mention_count disagrees with mentions");
    }
    std::sort(r.mentions.begin(), r.mentions.end());
    return r;
  } catch (const nlohmann::json::exception &e) {
    throw DataError(std::string("bad index record: ") + e.what());
  }
}

}  // namespace wikimrc::wikicorpus
