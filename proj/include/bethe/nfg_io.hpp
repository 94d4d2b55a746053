#pragma once

// JSON document form of an Nfg:
//   {"nodes":[{"id":str,"arity":int,"table":[float,...]}],
//    "edges":[{"id":str,"kind":"full"|"half","ends":[[node-id,port],...]}]}
// Tables are listed in bit-packed index order; ports are numbered from 0.

#include <filesystem>
#include <string>
#include <string_view>

#include "bethe/nfg.hpp"

namespace bethe {

/// Parses the JSON form. Structure is not validated here (see validate_nfg);
/// malformed JSON or wrong field types throw ValidationError.
[[nodiscard]] Nfg nfg_from_json(std::string_view text);
[[nodiscard]] std::string nfg_to_json(const Nfg& nfg);
[[nodiscard]] Nfg load_nfg(const std::filesystem::path& path);

}  // namespace bethe
