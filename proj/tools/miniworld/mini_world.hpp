#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wikimrc/taskconv/convert.hpp"

// A small invented world rendered as MediaWiki dumps in two synthetic
// languages, plus a tagging set over the same entities. Everything is a pure
// function of the seed.
namespace wikimrc::miniworld {

enum class Kind { kCountry, kCity, kPerson, kOrg };

struct Entity {
  std::string name;
  Kind kind;
  std::string ner_label;  // LOC, PER or ORG
};

const std::vector<Entity> &entities();

// Languages rendered by dump_xml.
const std::vector<std::string> &languages();

// Complete export for one language: siteinfo, one definition article per
// entity, overview articles, redirects and a few non-article pages. Link
// targets are spread so every entity is linked at least `min_mentions` times.
std::string dump_xml(const std::string &language, uint64_t seed = 7, int min_mentions = 12);

// CoNLL-style label scheme (LOC, PER, ORG, MISC) with definitions phrased
// in the usual NER label-query style.
taskconv::Scheme conll_scheme();

// Sentences built from world entities with gold typed spans.
std::vector<taskconv::TaggingInstance> ner_sentences(std::size_t count, uint64_t seed,
                                                     const std::string &id_prefix);

}  // namespace wikimrc::miniworld
