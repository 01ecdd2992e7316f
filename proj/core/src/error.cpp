#include "cytonet/error.hpp"

#include <string>

namespace cytonet {

DivergenceError::DivergenceError(std::string species, double time)
    : Error("integration diverged: " + species + " became non-finite at t=" +
            std::to_string(time)),
      species_(std::move(species)),
      time_(time) {}

ParseError::ParseError(std::string source, std::size_t line, const std::string& message)
    : Error(source + (line > 0 ? ":" + std::to_string(line) : std::string{}) + ": " + message),
      source_(std::move(source)),
      line_(line) {}

}  // namespace cytonet
