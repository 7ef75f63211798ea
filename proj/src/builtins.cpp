#include "hypo/builtins.hpp"

namespace hypo {

const std::vector<std::string>& builtin_ids() {
  static const std::vector<std::string> ids{"langevin-quad", "langevin-dw", "qgle-quad", "qgle-dw", "fhn"};
  return ids;
}

AnyModel make_builtin(std::string_view id) {
  if (id == "langevin-quad") return UnderdampedLangevin{{PotentialKind::kQuadratic}};
  if (id == "langevin-dw") return UnderdampedLangevin{{PotentialKind::kDoubleWell}};
  if (id == "qgle-quad") return QGle{{PotentialKind::kQuadratic}};
  if (id == "qgle-dw") return QGle{{PotentialKind::kDoubleWell}};
  if (id == "fhn") return Fhn{};
  std::string known;
  for (const auto& k : builtin_ids()) known += (known.empty() ? "" : ", ") + k;
  throw ConfigError("unknown model id '" + std::string(id) + "' (known: " + known + ")");
}

}  // namespace hypo
