#include "lsvr/density_field.hpp"

namespace lsvr {

const char* to_string(FieldKind kind) {
  switch (kind) {
    case FieldKind::hat_h: return "hat_h";
    case FieldKind::hat_h_star: return "hat_h_star";
    case FieldKind::source_q: return "source_q";
    case FieldKind::pullback_h: return "pullback_h";
    case FieldKind::response_h_star: return "response_h_star";
    case FieldKind::generic: break;
  }
  return "generic";
}

}  // namespace lsvr
