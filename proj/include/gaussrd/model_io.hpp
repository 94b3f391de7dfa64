#ifndef GAUSSRD_MODEL_IO_HPP
#define GAUSSRD_MODEL_IO_HPP

#include <string>
#include <variant>

#include "gaussrd/duality.hpp"
#include "gaussrd/model.hpp"

namespace gaussrd {

using LoadedModel = std::variant<SourceModel, DirectModel>;

// Parses the JSON model format (see README). `origin` names the source in
// error messages. Throws ParseError citing the line or offending field.
LoadedModel parse_model(const std::string& text, const std::string& origin);

// Reads and parses a model file.
LoadedModel load_model_file(const std::string& path);

std::string to_json(const SourceModel& model);
std::string to_json(const DirectModel& model);

}  // namespace gaussrd

#endif  // GAUSSRD_MODEL_IO_HPP
