#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace cytonet {

/// The nine canonical species of the id/anti-id TH1-TH2 network.
enum class Species : std::uint8_t {
  Naive,
  TH1id,
  TH2id,
  AntiId,
  Macrophage,
  CytA,
  CytB,
  CytC,
  Antigen,
};

inline constexpr std::size_t kSpeciesCount = 9;

inline constexpr std::array<Species, kSpeciesCount> kAllSpecies = {
    Species::Naive,      Species::TH1id, Species::TH2id, Species::AntiId, Species::Macrophage,
    Species::CytA,       Species::CytB,  Species::CytC,  Species::Antigen,
};

/// How a species' rate law is built.
///
/// SelfMultiplicativeCell: proliferation terms scale with the species' own
/// concentration, plus a differentiation inflow from its origin species.
/// NonSelfMultiplicative: production is a clamped linear sum over the other
/// species (macrophages and cytokines).
/// Decaying: no endogenous production, first-order removal only.
enum class SpeciesKind : std::uint8_t {
  SelfMultiplicativeCell,
  NonSelfMultiplicative,
  Decaying,
};

constexpr std::size_t index(Species s) noexcept { return static_cast<std::size_t>(s); }

std::string_view name(Species s) noexcept;
std::string_view name(SpeciesKind k) noexcept;

std::optional<Species> parse_species(std::string_view text) noexcept;
std::optional<SpeciesKind> parse_species_kind(std::string_view text) noexcept;

SpeciesKind canonical_kind(Species s) noexcept;

/// Cytokines, i.e. species a gene knockout can target.
constexpr bool is_mediator(Species s) noexcept {
  return s == Species::CytA || s == Species::CytB || s == Species::CytC;
}

/// Naive, TH1id and TH2id together form the id-cell aggregate.
constexpr bool is_id_cell(Species s) noexcept {
  return s == Species::Naive || s == Species::TH1id || s == Species::TH2id;
}

}  // namespace cytonet
