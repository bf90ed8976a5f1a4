#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wikimrc/wikicorpus/article.hpp"
#include "wikimrc/wikicorpus/dump_reader.hpp"

namespace wikimrc::wikicorpus {

// Titles live in per-language namespaces, so entities are keyed by both.
struct EntityKey {
  std::string language;
  std::string title;

  auto operator<=>(const EntityKey &) const = default;
};

struct MentionRef {
  int64_t article_id = 0;
  uint32_t anchor_ordinal = 0;

  auto operator<=>(const MentionRef &) const = default;
};

struct EntityRecord {
  EntityKey key;
  std::optional<int64_t> definition;
  std::vector<MentionRef> mentions;  // sorted

  std::size_t mention_count() const { return mentions.size(); }
  bool has_definition() const { return definition.has_value(); }
  bool operator==(const EntityRecord &) const = default;
};

// (language, redirect title) -> target title, both normalized.
using RedirectMap = std::map<EntityKey, std::string>;

void add_redirect(RedirectMap &redirects, const RawPage &page);

class EntityIndex {
 public:
  const std::map<EntityKey, EntityRecord> &entities() const { return entities_; }
  const EntityRecord *find(const EntityKey &key) const;
  std::size_t size() const { return entities_.size(); }

  // Article ids per language, ascending.
  const std::vector<int64_t> &roster(const std::string &language) const;
  const std::map<std::string, std::vector<int64_t>> &rosters() const { return rosters_; }

  void insert(EntityRecord record);
  void set_roster(const std::string &language, std::vector<int64_t> ids);
  void rebuild_rosters(const std::vector<Article> &articles);

  bool operator==(const EntityIndex &) const = default;

 private:
  std::map<EntityKey, EntityRecord> entities_;
  std::map<std::string, std::vector<int64_t>> rosters_;
};

struct IndexStats {
  std::size_t mentions = 0;
  std::size_t redirect_hops = 0;
  std::size_t redirect_cycles = 0;
  std::size_t definitionless = 0;
  std::size_t duplicate_titles = 0;
};

// Accumulates article contributions. add() and merge() commute, so workers
// can build partial builders in any order and merge them.
class IndexBuilder {
 public:
  void add(const Article &article);
  void merge(IndexBuilder &&other);

  // Resolves anchor targets through at most one redirect hop and produces
  // the index. Targets without an article become definition-less entities.
  EntityIndex finish(const RedirectMap &redirects, IndexStats *stats = nullptr) const;

 private:
  struct PendingMention {
    EntityKey target;
    MentionRef ref;
  };

  std::map<EntityKey, int64_t> titles_;
  std::size_t duplicate_titles_ = 0;
  std::vector<PendingMention> mentions_;
  std::map<std::string, std::vector<int64_t>> rosters_;
};

EntityIndex build_entity_index(const std::vector<Article> &articles, const RedirectMap &redirects,
                               IndexStats *stats = nullptr);

struct MinCounts {
  std::size_t default_count = 5;
  std::map<std::string, std::size_t> per_language{{"en", 10}};

  std::size_t for_language(const std::string &language) const;
};

// Drops definition-less entities and entities mentioned fewer times than the
// threshold of their language. Rosters are kept.
EntityIndex filter_entities(const EntityIndex &index, const MinCounts &min_counts);

// index.jsonl record: {lang, title, definition, mention_count, mentions:[[article, ordinal]...]}.
nlohmann::ordered_json entity_to_json(const EntityRecord &record);
EntityRecord entity_from_json(const nlohmann::json &j);

}  // namespace wikimrc::wikicorpus
