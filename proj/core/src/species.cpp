#include "cytonet/species.hpp"

#include <array>

namespace cytonet {

namespace {

constexpr std::array<std::string_view, kSpeciesCount> kNames = {
    "Naive", "TH1id", "TH2id", "AntiId", "Macrophage", "CytA", "CytB", "CytC", "Antigen",
};

}  // namespace

std::string_view name(Species s) noexcept { return kNames[index(s)]; }

std::string_view name(SpeciesKind k) noexcept {
  switch (k) {
    case SpeciesKind::SelfMultiplicativeCell:
      return "cell";
    case SpeciesKind::NonSelfMultiplicative:
      return "mediator";
    case SpeciesKind::Decaying:
      return "decaying";
  }
  return "?";
}

std::optional<Species> parse_species(std::string_view text) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == text) return static_cast<Species>(i);
  }
  return std::nullopt;
}

std::optional<SpeciesKind> parse_species_kind(std::string_view text) noexcept {
  for (auto k : {SpeciesKind::SelfMultiplicativeCell, SpeciesKind::NonSelfMultiplicative,
                 SpeciesKind::Decaying}) {
    if (name(k) == text) return k;
  }
  return std::nullopt;
}

SpeciesKind canonical_kind(Species s) noexcept {
  switch (s) {
    case Species::Naive:
    case Species::TH1id:
    case Species::TH2id:
    case Species::AntiId:
      return SpeciesKind::SelfMultiplicativeCell;
    case Species::Macrophage:
    case Species::CytA:
    case Species::CytB:
    case Species::CytC:
      return SpeciesKind::NonSelfMultiplicative;
    case Species::Antigen:
      return SpeciesKind::Decaying;
  }
  return SpeciesKind::Decaying;
}

}  // namespace cytonet
